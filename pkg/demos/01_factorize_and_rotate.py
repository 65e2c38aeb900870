"""Walkthrough: factor a tridiagonal operator and rotate its factors.

The running example is the p = 1 matrix with diagonal 2 and subdiagonal 1
(its first dual functional has Catalan-number moments). We factor J = L*U,
rotate to J(1) = U*L, and watch the classical kernel-polynomial formula
fall out of the rotation.
"""

from banded_darboux import (
    FreeEntrySpec,
    ShiftedInstance,
    chain_from_instance,
    characteristic_polys,
    darboux_transform,
    hessenberg_from_recurrence,
    shifted_lu,
    transformed_polys,
)

N = 8
J = hessenberg_from_recurrence(1, N, lambda i, m: 2 if i == m else 1)
print("J: tridiagonal, diagonal 2, subdiagonal 1, unit superdiagonal")

# -- characteristic sequence ------------------------------------------------

P = characteristic_polys(J, 5)
for n, poly in enumerate(P):
    print(f"  P_{n} = {poly}")

# -- shifted LU (shift C = 0 is admissible: no P_n vanishes there) ----------

inst = ShiftedInstance(J, 0)
L, U = shifted_lu(inst)
print("\nJ = L * U")
print("  U diagonal   :", ", ".join(str(v) for v in U.diag))
print("  L subdiagonal:", ", ".join(str(v) for v in L.band(-1)[1:]))
print("  (each U entry is -P_{n+1}(0)/P_n(0))")
for n in range(N):
    assert U.diag[n] == -inst.values_at_shift[n + 1] / inst.values_at_shift[n]

# -- rotate the factorization ------------------------------------------------

chain = chain_from_instance(inst, FreeEntrySpec(1, ()))
J1 = darboux_transform(chain, 1)
print("\nJ(1) = U * L + 0*I, trustworthy on rows 0..", J1.valid_rows - 1)
print("  new diagonal:", ", ".join(str(J1.a(i, i)) for i in range(4)), "...")

# -- kernel polynomials ------------------------------------------------------

K = transformed_polys(chain, 1, 5)
print("\nkernel sequence of the rotation:")
for n, poly in enumerate(K):
    print(f"  K_{n} = {poly}")

print("\nclassical check: K_n = (P_{n+1} - (P_{n+1}(0)/P_n(0)) P_n) / z")
P_full = characteristic_polys(J, 6)
for n in range(5):
    ratio = P_full[n + 1](0) / P_full[n](0)
    expected = (P_full[n + 1] - ratio * P_full[n]).deflate(0)
    assert K[n] == expected
print("  exact for n = 0..4")
