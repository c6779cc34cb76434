"""``msrcodes`` command line: shard files, repairs, audits and tables.

Exit status: 0 success, 2 bad parameters, 3 I/O or shard format problem,
4 integrity failure, 5 audit failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import IntegrityError, MSRError, ParameterError
from .factory import CONSTRUCTIONS, build_code
from .gf import parse_field
from .harness import MODES, AdversaryPolicy, Cluster, audit_bounds, bench, check_adversary_budget, compare_table, simulate_repair
from .shard import ShardFormatError, ShardHeader, pack_bytes, read_shard, shard_name, unpack_bytes, write_shard

EXIT_OK = 0
EXIT_PARAM = 2
EXIT_IO = 3
EXIT_INTEGRITY = 4
EXIT_AUDIT = 5


class AuditFailure(Exception):
    pass


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _params(text: str) -> tuple[int, ...]:
    vals = _int_list(text)
    if len(vals) != 5:
        raise argparse.ArgumentTypeError(f"expected n,k,h,d,e, got {text!r}")
    return tuple(vals)


def _emit(records, out=None):
    lines = [r if isinstance(r, str) else json.dumps(r, sort_keys=True) for r in records]
    text = "".join(line + "\n" for line in lines)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _code_from_header(h: ShardHeader):
    return build_code(h.construction, h.params, parse_field(h.field), h.gamma)


def load_shards(directory) -> tuple[ShardHeader, object, dict[int, np.ndarray]]:
    """Read every shard in ``directory``; returns a header, the code and ``{node: payload}``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"no shard directory {directory}")
    found = {}
    ref = None
    for path in sorted(directory.glob("node_*.msra")):
        h, payload = read_shard(path)
        if ref is None:
            ref = h
        elif not ref.same_code(h):
            raise ShardFormatError(f"{path}: header disagrees with the other shards")
        if h.node in found:
            raise ShardFormatError(f"{path}: duplicate shard for node {h.node}")
        found[h.node] = payload
    if ref is None:
        raise ShardFormatError(f"{directory}: no shard files")
    code = _code_from_header(ref)
    return ref, code, found


def _stripe(payload: np.ndarray, t: int, l: int) -> np.ndarray:
    return payload[t * l : (t + 1) * l]


def cmd_encode(args) -> int:
    field = parse_field(args.field) if args.field else None
    code = build_code(args.construction, args.params, field, args.gamma)
    data = Path(args.input).read_bytes()
    F, l, k = code.field, code.l, code.k
    stripes = pack_bytes(data, F, k * l)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    words = [code.encode(s.reshape(k, l)) for s in stripes]
    gamma = getattr(code, "gamma", None)
    for i in range(1, code.n + 1):
        h = ShardHeader(code.construction, code.params.as_tuple(), F.spec_string(), i, len(data), len(words), gamma)
        write_shard(out / shard_name(i), h, np.concatenate([w[i - 1] for w in words]))
    _emit(
        [
            {
                "kind": "encode",
                "construction": code.construction,
                "params": list(code.params.as_tuple()),
                "field": F.spec_string(),
                "l": l,
                "stripes": len(words),
                "data_length": len(data),
                "shards": code.n,
            }
        ]
    )
    return EXIT_OK


def cmd_decode(args) -> int:
    h, code, found = load_shards(args.shards)
    if len(found) < code.k:
        raise IntegrityError(f"only {len(found)} shards present, need k = {code.k}")
    l, k = code.l, code.k
    data = []
    for t in range(h.stripes):
        avail = {i: _stripe(p, t, l) for i, p in found.items()}
        cw = code.erasure_decode(avail)
        if not code.is_codeword(cw):
            raise IntegrityError(f"stripe {t} is inconsistent: shards disagree")
        data.append(cw[:k].reshape(-1))
    Path(args.output).write_bytes(unpack_bytes(np.concatenate(data), code.field, h.data_length))
    _emit([{"kind": "decode", "data_length": h.data_length, "shards_used": sorted(found)}])
    return EXIT_OK


def cmd_repair(args) -> int:
    h, code, found = load_shards(args.shards)
    p = code.params
    missing = [i for i in range(1, p.n + 1) if i not in found]
    failed = sorted(set(missing) | set(args.failed if args.failed is not None else []))
    out = args.transcript
    if not failed:
        _emit([{"kind": "transcript", "failed": [], "helpers": [], "total_download": 0, "total_access": 0, "outcome": "no-op"}], out)
        return EXIT_OK
    if len(failed) != p.h:
        raise ParameterError("failure-count", f"{len(failed)} failed nodes {failed}; this code repairs exactly h = {p.h}")
    count = args.errors if args.victims is None else len(args.victims)
    check_adversary_budget(p, count)
    records, restored = [], {i: [] for i in failed}
    audit_ok = True
    for t in range(h.stripes):
        stores = {i: _stripe(found[i], t, code.l) for i in found if i not in failed}
        cluster = Cluster.from_stores(code, stores, seed=args.seed)
        policy = AdversaryPolicy(args.adversary, count, args.seed + t, args.victims)
        try:
            tr = simulate_repair(cluster, failed, args.helpers, policy)
        except IntegrityError as exc:
            if exc.transcript is not None:
                records.append(exc.transcript.to_record())
            _emit(records, out)
            raise
        audit = audit_bounds(tr, p)
        audit_ok &= audit.ok and tr.outcome == "success"
        records += [dict(tr.to_record(), stripe=t), dict(audit.to_record(), stripe=t)]
        for i in failed:
            restored[i].append(cluster.stores[i])
    for i in failed:
        hdr = ShardHeader(h.construction, h.params, h.field, i, h.data_length, h.stripes, h.gamma)
        write_shard(Path(args.shards) / shard_name(i), hdr, np.concatenate(restored[i]))
    _emit(records, out)
    if not audit_ok:
        raise AuditFailure("repair audit failed")
    return EXIT_OK


def cmd_verify(args) -> int:
    h, code, found = load_shards(args.shards)
    rep = code.verify_mds(args.mode, rng=np.random.default_rng(args.seed), cap=args.cap)
    complete = len(found) == code.n
    consistent = None
    if complete:
        consistent = all(
            code.is_codeword(np.stack([_stripe(found[i], t, code.l) for i in range(1, code.n + 1)]))
            for t in range(h.stripes)
        )
    _emit(
        [
            {
                "kind": "verify",
                "mode": rep.mode,
                "mds": rep.ok,
                "checked": rep.checked,
                "failure": rep.failure,
                "shards_present": sorted(found),
                "syndromes_zero": consistent,
            }
        ]
    )
    if not rep.ok:
        raise AuditFailure(rep.failure)
    if consistent is False:
        raise IntegrityError("stored shards are not a codeword")
    return EXIT_OK


def cmd_compare(args) -> int:
    rows, notes = compare_table(args.params)
    if args.table:
        head = ("params", "ours l", "baseline l", "l ratio", "guaranteed", "F diag", "F base", "F perm")
        body = []
        for r in rows:
            n = r.params[0]
            body.append(
                (
                    str(r.params),
                    f"{r.s}^{n}",
                    f"{r.lcm}^{n}",
                    f"({r.lcm_ratio})^{n}",
                    f"{r.params[2] * (r.params[3] - r.params[1] + r.params[2])}^{n}",
                    str(r.field_ours_diag),
                    str(r.field_baseline_diag),
                    str(r.field_ours_perm),
                )
            )
        widths = [max(len(x[c]) for x in [head] + body) for c in range(len(head))]
        for line in [head] + body:
            print("  ".join(x.ljust(w) for x, w in zip(line, widths)).rstrip())
        for n in notes:
            print(n)
    else:
        _emit([r.to_record() for r in rows] + [{"kind": "note", "note": n} for n in notes])
    return EXIT_OK if rows or not notes else EXIT_PARAM


def cmd_bench(args) -> int:
    field = parse_field(args.field) if args.field else None
    code = build_code(args.construction, args.params, field, args.gamma)
    errors = code.params.e if args.errors is None else args.errors
    check_adversary_budget(code.params, errors)
    res = bench(code, args.trials, args.seed, errors, args.adversary)
    rec = dict(res["report"])
    if not args.no_timing:
        rec["timing"] = res["timing"]
    _emit([rec])
    return EXIT_OK if rec["failures"] == 0 else EXIT_INTEGRITY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="msrcodes", description="MSR array codes with multi-node, error-tolerant repair")
    sub = ap.add_subparsers(dest="command", required=True)

    def code_opts(sp):
        sp.add_argument("--params", type=_params, required=True, help="n,k,h,d,e")
        sp.add_argument("--construction", choices=CONSTRUCTIONS, default="perm")
        sp.add_argument("--field", help="e.g. gf(23) or gf(2^4); default: smallest usable prime field")
        sp.add_argument("--gamma", type=int, help="permutation code multiplier (default: primitive element)")

    sp = sub.add_parser("encode", help="encode a file into one shard per node")
    sp.add_argument("input")
    sp.add_argument("out", help="output directory")
    code_opts(sp)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="rebuild the original file from any k shards")
    sp.add_argument("shards")
    sp.add_argument("output")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("repair", help="repair h failed shards from d helpers")
    sp.add_argument("shards")
    sp.add_argument("--failed", type=_int_list, help="failed nodes (default: the missing shard files)")
    sp.add_argument("--helpers", type=_int_list, help="helper nodes (default: the d lowest live nodes)")
    sp.add_argument("--errors", type=int, default=0, help="number of helpers to corrupt (at most e)")
    sp.add_argument("--adversary", choices=MODES, default="random-symbols")
    sp.add_argument("--victims", type=_int_list, help="corrupt exactly these helpers")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--transcript", help="write transcript lines here instead of stdout")
    sp.set_defaults(func=cmd_repair)

    sp = sub.add_parser("verify", help="check the MDS property and stored syndromes")
    sp.add_argument("shards")
    sp.add_argument("--mode", choices=("structural", "exhaustive"), default="structural")
    sp.add_argument("--cap", type=int, default=10_000, help="max erasure patterns in exhaustive mode")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("compare", help="sub-packetization and field-size comparison")
    sp.add_argument("--params", type=_params, nargs="+", required=True, help="one or more n,k,h,d,e tuples")
    sp.add_argument("--table", action="store_true", help="human-readable table instead of JSON lines")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("bench", help="repeated seeded repairs")
    code_opts(sp)
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--errors", type=int, help="helpers to corrupt per trial (default e)")
    sp.add_argument("--adversary", choices=MODES, default="random-symbols")
    sp.add_argument("--no-timing", action="store_true", help="omit timing so output is byte-identical across runs")
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc} [{exc.constraint}]", file=sys.stderr)
        return EXIT_PARAM
    except IntegrityError as exc:
        where = f" (group {exc.group})" if exc.group is not None else ""
        print(f"integrity failure{where}: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except AuditFailure as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (MSRError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
