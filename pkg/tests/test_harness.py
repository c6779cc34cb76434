from fractions import Fraction

import numpy as np
import pytest

from msrcodes.errors import IntegrityError, ParameterError
from msrcodes.factory import build_code, default_field
from msrcodes.gf import prime_field
from msrcodes.harness import (
    AdversaryPolicy,
    Cluster,
    audit_bounds,
    bench,
    check_adversary_budget,
    compare_table,
    corrupt_helpers,
    simulate_repair,
)
from msrcodes.transcript import RepairTranscript


@pytest.fixture(scope="module")
def diag11():
    return build_code("diag", (11, 3, 2, 7, 1), prime_field(23))


@pytest.fixture(scope="module")
def perm6():
    return build_code("perm", (6, 2, 2, 4, 0), prime_field(7), 3)


def test_cluster_lifecycle(perm6):
    c = Cluster.random(perm6, seed=1)
    assert c.consistent() and c.matches_truth()
    c.fail([2])
    assert c.live_nodes == [1, 3, 4, 5, 6]
    with pytest.raises(RuntimeError):
        c.consistent()


def test_simulate_successful_repair(diag11):
    c = Cluster.random(diag11, seed=2)
    tr = simulate_repair(c, [1, 2], None, AdversaryPolicy(count=1, seed=5))
    assert tr.outcome == "success" and tr.total_download == 7168 and tr.total_access == 14336
    assert tr.corrupted == tr.flagged and len(tr.corrupted) == 1
    assert c.consistent() and c.matches_truth()
    assert audit_bounds(tr, diag11.params).ok


def test_count_zero_trivial(perm6):
    c = Cluster.random(perm6, seed=3)
    tr = simulate_repair(c, [3, 6], None, AdversaryPolicy())
    assert tr.outcome == "success" and tr.corrupted == [] and tr.total_download == 128
    rep = audit_bounds(tr, perm6.params)
    assert rep.ok and [n for n, _, _ in rep.checks] == [
        "bandwidth-equals-bound",
        "per-helper-equality",
        "subset-floor",
        "access",
        "ledger-reconciles",
    ]


def test_over_budget_reports_integrity(diag11):
    c = Cluster.random(diag11, seed=4)
    with pytest.raises(IntegrityError) as info:
        simulate_repair(c, [5, 6], None, AdversaryPolicy(count=2, seed=1))
    tr = info.value.transcript
    assert tr.outcome == "integrity-failure" and len(tr.corrupted) == 2


def test_helpers_must_be_alive(perm6):
    c = Cluster.random(perm6, seed=0)
    c.fail([5])
    with pytest.raises(ValueError):
        simulate_repair(c, [1, 2], [3, 4, 5, 6])


def test_corrupt_helpers_modes():
    rng = np.random.default_rng(0)
    resp = {j: rng.integers(0, 7, (2, 16)) for j in (3, 4, 5, 6)}
    same, victims = corrupt_helpers(resp, AdversaryPolicy(count=0), 7)
    assert victims == [] and all(np.array_equal(same[j], resp[j]) for j in resp)
    for seed in range(20):
        out, v = corrupt_helpers(resp, AdversaryPolicy("random-symbols", 2, seed), 7)
        assert len(v) == 2 and all(not np.array_equal(out[j], resp[j]) for j in v)
        assert all(np.array_equal(out[j], resp[j]) for j in resp if j not in v)
        flip, v = corrupt_helpers(resp, AdversaryPolicy("bit-flip", 1, seed), 7)
        diff = flip[v[0]] != resp[v[0]]
        assert diff.sum() == 1 and flip[v[0]].max() < 7
        x = int(flip[v[0]][diff][0]) ^ int(resp[v[0]][diff][0])
        assert x & (x - 1) == 0
    chosen, v = corrupt_helpers(resp, AdversaryPolicy(victims=[4]), 7)
    assert v == [4]
    a, _ = corrupt_helpers(resp, AdversaryPolicy("random-symbols", 1, 9), 7)
    b, _ = corrupt_helpers(resp, AdversaryPolicy("random-symbols", 1, 9), 7)
    assert all(np.array_equal(a[j], b[j]) for j in resp)
    with pytest.raises(ValueError):
        corrupt_helpers(resp, AdversaryPolicy("targeted", 1, 0), 7)
    with pytest.raises(ValueError):
        corrupt_helpers(resp, AdversaryPolicy(count=5), 7)
    with pytest.raises(ValueError):
        corrupt_helpers(resp, AdversaryPolicy(victims=[1]), 7)
    with pytest.raises(ValueError):
        AdversaryPolicy("sneaky")


def test_targeted_adversary_corrected(perm6, diag11):
    c = Cluster.random(diag11, seed=7)
    tr = simulate_repair(c, [2, 9], None, AdversaryPolicy("targeted", 1, 3))
    assert tr.outcome == "success" and tr.flagged == tr.corrupted


def test_audit_detects_off_by_one(perm6):
    c = Cluster.random(perm6, seed=3)
    tr = simulate_repair(c, [1, 2])
    rec = tr.to_record()
    bad = RepairTranscript.from_record(rec)
    bad.downloaded[3] += 1
    rep = audit_bounds(bad, perm6.params)
    failed = {n for n, ok, _ in rep.checks if not ok}
    assert "per-helper-equality" in failed and "bandwidth-equals-bound" in failed
    assert "ledger-reconciles" in failed


def test_transcript_round_trip_and_determinism(perm6):
    lines = set()
    for _ in range(2):
        c = Cluster.random(perm6, seed=11)
        tr = simulate_repair(c, [2, 4], None, AdversaryPolicy(seed=2))
        lines.add(tr.to_line())
        assert RepairTranscript.from_record(tr.to_record()).to_line() == tr.to_line()
    assert len(lines) == 1


def test_compare_table_figures():
    rows, notes = compare_table([(11, 3, 2, 7, 1), (15, 4, 3, 9, 1), (11, 3, 2, 6, 1)])
    assert len(rows) == 2 and len(notes) == 1 and "skipped" in notes[0]
    a, b = rows
    assert a.l_ours == 2**11 and a.l_baseline == 30**11 and a.l_ratio == 15**11
    assert a.field_baseline_diag == 330 and a.field_ours_diag == 22 and a.field_ours_perm == 12
    assert b.l_ratio == (3 * 7 * 4) ** 15 and b.lcm == 168
    assert b.guaranteed_factor == 24**15 and b.l_ratio >= b.guaranteed_factor
    assert isinstance(a.field_ratio, Fraction) and a.field_ratio == 15


def test_bench_is_deterministic(perm6):
    r1 = bench(perm6, 3, 5)
    r2 = bench(perm6, 3, 5)
    assert r1["report"] == r2["report"] and r1["report"]["failures"] == 0
    assert set(r1["timing"]) == {"p50", "p90", "p99"}


def test_budget_check_and_default_field():
    p = build_code("perm", (6, 2, 2, 4, 0)).params
    with pytest.raises(ParameterError):
        check_adversary_budget(p, 1)
    assert default_field("diag", 11, 3, 2, 7, 1).q == 23
    assert default_field("perm", 15, 4, 3, 9, 1).q == 17
    with pytest.raises(ValueError):
        build_code("other", (6, 2, 2, 4, 0))


def test_guaranteed_factor_needs_errors():
    rows, _ = compare_table(
        [(n, k, h, d, e) for n in range(6, 16) for k in range(1, 5) for h in (2, 3) for d in range(k, n) for e in range(0, 3)]
    )
    with_e = [r for r in rows if r.params[4] >= 1]
    assert with_e and all(r.l_ratio >= r.guaranteed_factor for r in with_e)
    (small,) = compare_table([(6, 2, 2, 4, 0)])[0]
    assert small.l_ratio == 6**6 < small.guaranteed_factor == 8**6
