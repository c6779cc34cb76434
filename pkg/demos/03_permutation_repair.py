"""Optimal-access repair with the permutation code.

First the small (6,2,2,4,0) code over GF(7) with gamma = 3, over every pair
of failed nodes; then (15,4,3,9,1) over GF(16) with nodes 1, 2, 3 down.
Helpers only read the rows they send, so access equals download.
"""

from itertools import combinations

import numpy as np

from msrcodes import Cluster, binary_field, build_perm, prime_field, simulate_repair, validate

small = build_perm(validate(6, 2, 2, 4, 0, prime_field(7)), gamma=3)
cw = small.random_codeword(np.random.default_rng(0))
for E in combinations(range(1, 7), 2):
    tr = simulate_repair(Cluster(small, cw), E)
    print(f"failed {E}: {tr.outcome}, download {tr.total_download}, access {tr.total_access}")

big = build_perm(validate(15, 4, 3, 9, 1, binary_field(4)))
print("\n(15,4,3,9,1): gamma =", big.gamma, "groups:", big.groups())
print("group (0,0,0) rows read by node 4 start with", big.access_rows(4, [1, 2, 3], (0, 0, 0))[:4].tolist())
print("shift-0 system:\n", big.group_matrix([1, 2, 3], (0, 0, 0), 0))
print("shift-1 system:\n", big.group_matrix([1, 2, 3], (0, 0, 0), 1))
tr = simulate_repair(Cluster.random(big, seed=3), [1, 2, 3])
print("outcome:", tr.outcome, "download:", tr.total_download, "access:", tr.total_access)
