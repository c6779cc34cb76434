import json
import subprocess
import sys

import numpy as np
import pytest

from msrcodes.cli import main
from msrcodes.gf import binary_field, prime_field
from msrcodes.shard import (
    ShardFormatError,
    ShardHeader,
    bytes_to_symbols,
    pack_bytes,
    read_shard,
    shard_name,
    symbols_to_bytes,
    unpack_bytes,
    write_shard,
)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, [json.loads(x) for x in out.out.splitlines() if x.startswith("{")], out.err


def test_symbol_bytes_round_trip():
    v = np.array([0, 1, 255, 256, 65535, 70000])
    for w in (3, 4):
        assert np.array_equal(bytes_to_symbols(symbols_to_bytes(v, w), w), v)
    assert symbols_to_bytes(np.array([0x0102]), 2) == b"\x02\x01"


@pytest.mark.parametrize("F", [prime_field(7), prime_field(23), binary_field(4), binary_field(8)], ids=str)
def test_pack_unpack(F):
    rng = np.random.default_rng(0)
    for n in (0, 1, 7, 100):
        data = rng.integers(0, 256, n, dtype=np.uint8).tobytes()
        sym = pack_bytes(data, F, 40)
        assert sym.shape[1] == 40 and sym.max(initial=0) < F.q
        assert unpack_bytes(sym, F, n) == data


def test_shard_round_trip(tmp_path):
    h = ShardHeader("perm", (6, 2, 2, 4, 0), "gf(7)", 3, 10, 2, 3)
    payload = np.arange(128) % 7
    write_shard(tmp_path / "x", h, payload)
    raw = (tmp_path / "x").read_bytes()
    h2, p2 = read_shard(tmp_path / "x")
    assert h2 == h and np.array_equal(p2, payload)
    write_shard(tmp_path / "y", h2, p2)
    assert (tmp_path / "y").read_bytes() == raw
    assert raw[:4] == b"MSRA" and len(raw) - raw.index(b"gf(7)") > 128
    (tmp_path / "bad").write_bytes(b"NOPE" + raw[4:])
    with pytest.raises(ShardFormatError):
        read_shard(tmp_path / "bad")
    (tmp_path / "short").write_bytes(raw[:-1])
    with pytest.raises(ShardFormatError):
        read_shard(tmp_path / "short")
    with pytest.raises(ValueError):
        write_shard(tmp_path / "z", h, payload[:5])


def test_encode_decode_round_trip(tmp_path, capsys):
    src = tmp_path / "in.bin"
    src.write_bytes(bytes(range(256)) * 3)
    code, recs, _ = run(capsys, "encode", src, tmp_path / "s", "--params", "6,2,2,4,0", "--field", "gf(7)", "--gamma", "3")
    # 768 bytes at 2 bits per GF(7) symbol over 2 * 64 data symbols per stripe
    assert code == 0 and recs[0]["stripes"] == 24
    assert sorted(p.name for p in (tmp_path / "s").iterdir()) == [shard_name(i) for i in range(1, 7)]
    h, payload = read_shard(tmp_path / "s" / shard_name(1))
    assert payload.size == 24 * 64 and h.gamma == 3
    for i in (1, 3, 6, 2):
        (tmp_path / "s" / shard_name(i)).unlink()
    code, _, _ = run(capsys, "decode", tmp_path / "s", tmp_path / "out.bin")
    assert code == 0 and (tmp_path / "out.bin").read_bytes() == src.read_bytes()


def test_golden_shard_sizes(tmp_path, capsys):
    src = tmp_path / "in.bin"
    src.write_bytes(b"")
    code, recs, _ = run(capsys, "encode", src, tmp_path / "s", "--params", "6,2,2,4,0", "--field", "gf(7)")
    assert code == 0
    for i in range(1, 7):
        h, p = read_shard(tmp_path / "s" / shard_name(i))
        assert p.size == 64 and not p.any() and h.data_length == 0
    code, recs, _ = run(capsys, "verify", tmp_path / "s", "--mode", "exhaustive")
    assert code == 0 and recs[0]["mds"] and recs[0]["syndromes_zero"] and recs[0]["checked"] == 15


def test_repair_flow_and_exit_codes(tmp_path, capsys):
    src = tmp_path / "in.bin"
    src.write_bytes(np.random.default_rng(1).integers(0, 256, 900, dtype=np.uint8).tobytes())
    d = tmp_path / "s"
    run(capsys, "encode", src, d, "--params", "11,3,2,7,1", "--construction", "diag", "--field", "gf(23)")
    before = {i: (d / shard_name(i)).read_bytes() for i in (1, 2)}
    # nothing failed -> no-op
    code, recs, _ = run(capsys, "repair", d)
    assert code == 0 and recs[0]["outcome"] == "no-op" and recs[0]["total_download"] == 0
    for i in (1, 2):
        (d / shard_name(i)).unlink()
    tpath = tmp_path / "t.jsonl"
    code, _, _ = run(capsys, "repair", d, "--errors", "1", "--seed", "3", "--transcript", tpath)
    assert code == 0
    recs = [json.loads(x) for x in tpath.read_text().splitlines()]
    tr, audit = recs
    assert tr["total_download"] == 7168 and tr["total_access"] == 14336 and tr["outcome"] == "success"
    assert tr["flagged"] == tr["corrupted"] and audit["ok"]
    assert all((d / shard_name(i)).read_bytes() == before[i] for i in (1, 2))
    # budget exceeded -> parameter error
    code, _, err = run(capsys, "repair", d, "--failed", "1,2", "--errors", "2")
    assert code == 2 and "adversary-budget" in err
    # wrong failure count
    code, _, _ = run(capsys, "repair", d, "--failed", "1")
    assert code == 2
    # missing directory -> I/O
    code, _, _ = run(capsys, "verify", tmp_path / "nowhere")
    assert code == 3
    # corrupt a stored shard -> verify reports an integrity failure
    h, p = read_shard(d / shard_name(5))
    p[0] = (p[0] + 1) % 23
    write_shard(d / shard_name(5), h, p)
    code, recs, _ = run(capsys, "verify", d)
    assert code == 4 and recs[0]["syndromes_zero"] is False


def test_integrity_exit_code(tmp_path, capsys):
    # plant two lying helpers by editing shards while the budget allows one
    src = tmp_path / "in.bin"
    src.write_bytes(b"abc" * 50)
    d = tmp_path / "s"
    run(capsys, "encode", src, d, "--params", "11,3,2,7,1", "--construction", "diag", "--field", "gf(23)")
    for j in (4, 7):
        h, p = read_shard(d / shard_name(j))
        write_shard(d / shard_name(j), h, (p + 1) % 23)
    (d / shard_name(1)).unlink()
    (d / shard_name(2)).unlink()
    code, recs, err = run(capsys, "repair", d)
    assert code == 4 and "integrity" in err
    assert recs and recs[0]["outcome"] == "integrity-failure"


def test_perm_repair_chosen_victim(tmp_path, capsys):
    src = tmp_path / "in.bin"
    src.write_bytes(b"x" * 10)
    d = tmp_path / "s"
    run(capsys, "encode", src, d, "--params", "15,4,3,9,1", "--field", "gf(2^4)")
    code, recs, _ = run(capsys, "repair", d, "--failed", "1,2,3", "--victims", "8", "--adversary", "bit-flip")
    assert code == 0
    tr, audit = recs
    assert tr["total_download"] == tr["total_access"] == 147456 and tr["flagged"] == [8] and audit["ok"]


def test_compare_and_bench(capsys):
    code, recs, _ = run(capsys, "compare", "--params", "11,3,2,7,1", "15,4,3,9,1")
    assert code == 0 and recs[0]["l_ratio"] == str(15**11) and recs[0]["field_baseline_diag"] == 330
    assert recs[1]["lcm_ratio"] == "84"
    code, _, _ = run(capsys, "compare", "--params", "11,3,2,6,1")
    assert code == 2
    assert main(["compare", "--params", "11,3,2,7,1", "--table"]) == 0
    assert "(15)^11" in capsys.readouterr().out
    outs = []
    for _ in range(2):
        code, recs, _ = run(capsys, "bench", "--params", "6,2,2,4,0", "--field", "gf(7)", "--trials", "3", "--seed", "4", "--no-timing")
        outs.append(recs)
        assert code == 0 and "timing" not in recs[0]
    assert outs[0] == outs[1]
    code, recs, _ = run(capsys, "bench", "--params", "6,2,2,4,0", "--trials", "1")
    assert "timing" in recs[0]
    code, _, _ = run(capsys, "bench", "--params", "6,2,2,5,0")
    assert code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "msrcodes", "compare", "--params", "6,2,2,4,0"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["kind"] == "comparison"
    res = subprocess.run([sys.executable, "-m", "msrcodes", "encode"], capture_output=True, text=True)
    assert res.returncode == 2
