"""Sub-packetization and field size next to the lcm-based MSR codes."""

from msrcodes import compare_table

rows, notes = compare_table([(11, 3, 2, 7, 1), (15, 4, 3, 9, 1), (6, 2, 2, 4, 0), (20, 5, 4, 11, 1)])
for r in rows:
    n = r.params[0]
    print(f"{r.params}: l = {r.s}^{n} vs {r.lcm}^{n}, reduced by ({r.lcm_ratio})^{n}")
    g = r.params[2] * (r.params[3] - r.params[1] + r.params[2])
    print(f"    guaranteed factor {g}^{n}, reached: {r.l_ratio >= r.guaranteed_factor}")
    print(f"    field: {r.field_ours_diag} (diagonal) vs {r.field_baseline_diag}; permutation needs {r.field_ours_perm}")
# the guaranteed factor relies on e >= 1; with e = 0 it can be missed, as (6,2,2,4,0) shows
for n in notes:
    print(n)
