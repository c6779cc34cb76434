"""Lying helpers: up to e are corrected and named, e + 1 are detected.

A corrupted helper is located by trying every choice of e helpers to ignore
and keeping the only reconstruction that passes the spare parity checks.
"""

from msrcodes import AdversaryPolicy, Cluster, IntegrityError, build_diag, prime_field, simulate_repair, validate

code = build_diag(validate(11, 3, 2, 7, 1, prime_field(23)))

for mode in ("random-symbols", "bit-flip", "targeted"):
    cluster = Cluster.random(code, seed=5)
    tr = simulate_repair(cluster, [3, 8], None, AdversaryPolicy(mode, count=1, seed=9))
    print(f"{mode:15s} corrupted {tr.corrupted} flagged {tr.flagged} -> {tr.outcome}")

cluster = Cluster.random(code, seed=5)
try:
    simulate_repair(cluster, [3, 8], None, AdversaryPolicy("random-symbols", count=2, seed=9))
except IntegrityError as exc:
    print("two liars:", exc, "| group", exc.group, "| outcome", exc.transcript.outcome)
    print("failed nodes left unwritten:", cluster.stores[3] is None and cluster.stores[8] is None)
