"""Two simultaneous failures repaired by the diagonal code (11,3,2,7,1) over GF(23).

Each of the 7 helpers sends one sum of two symbols per slot and group,
2 * 2^9 symbols in all; the repair center reads 2^11 symbols per helper.
"""

import numpy as np

from msrcodes import Cluster, audit_bounds, build_diag, prime_field, simulate_repair, validate

code = build_diag(validate(11, 3, 2, 7, 1, prime_field(23)))
p = code.params
print(f"n={p.n} k={p.k} h={p.h} d={p.d} e={p.e}: s={p.s}, l={p.l}, groups={p.groups}")

cluster = Cluster.random(code, seed=1)
tr = simulate_repair(cluster, failed=[1, 2])
print("outcome:", tr.outcome)
print("downloaded per helper:", tr.downloaded)
print("total download:", tr.total_download, "bound:", p.cut_set_bound())
print("total access:", tr.total_access, "= d * l =", p.d * p.l)
for name, ok, detail in audit_bounds(tr, p).checks:
    print(f"  {'ok ' if ok else 'BAD'} {name}: {detail}")
print("cluster consistent after repair:", cluster.consistent())
