"""Field arithmetic used by both constructions.

GF(16) is built from x^4 + x + 1, so x * x^3 = x + 1 and the element 2
(the polynomial x) generates the multiplicative group.
"""

import numpy as np

from msrcodes import parse_field, primitive_element

F = parse_field("gf(2^4)")
x = 2
print("field:", F.spec_string())
print("x * x^3 =", int(F.mul(x, F.pow(x, 3))), "(x + 1 is 3)")
print("primitive element:", int(primitive_element(F)))
print("powers of x:", [int(F.pow(x, i)) for i in range(15)])

G = parse_field("gf(23)")
A = np.array([[1, 2], [3, 4]])
b = np.array([5, 6])
sol = G.solve(A, b)
print("over GF(23), [[1,2],[3,4]] x = [5,6] gives x =", sol.tolist())
print("check:", (A @ sol % 23).tolist())
