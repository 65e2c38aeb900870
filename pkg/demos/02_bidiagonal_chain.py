"""Walkthrough: splitting a wide lower factor into a bidiagonal chain.

With p subdiagonals, L splits as L = L(1) ... L(p) once p(p-1)/2 leading
entries are prescribed. Different prescriptions give different chains over
the same L, and every chain rotates into new banded operators.
"""

from fractions import Fraction
import random

from banded_darboux import (
    FreeEntrySpec,
    ShiftedInstance,
    bidiagonal_chain_factor,
    chain_from_instance,
    darboux_transform,
    product_window,
    random_hessenberg,
    shifted_lu,
)

rng = random.Random(12)
p, N = 3, 9
J = random_hessenberg(rng, p, N, bound=5)
inst = ShiftedInstance(J, Fraction(1, 2))
L, U = shifted_lu(inst)
print(f"random p={p} instance, shift 1/2; L has {L.w} subdiagonals")

# -- two different prescriptions over the same L ------------------------------

for label, rows in [
    ("zeros", [[0, 0], [0]]),
    ("ones ", [[1, 1], [1]]),
]:
    free = FreeEntrySpec(p, rows)
    factors = bidiagonal_chain_factor(L, free)
    print(f"\nfree entries {label}:")
    for f in factors:
        head = ", ".join(str(v) for v in f.sub[:4])
        print(f"  L({f.index}) subdiagonal starts: {head}, ...")
    assert product_window(factors) == L.band_matrix()
    print("  product reconstructs L exactly")

# -- every rotation is again banded Hessenberg -------------------------------

chain = chain_from_instance(inst, FreeEntrySpec(p, [[1, 2], [3]]))
print("\nglobal coefficient tiling (first two blocks):")
for t in range(1, 2 * (p + 1) + 1):
    kind, j, r = chain.gamma_location(t)
    slot = "U diag" if kind == "upper" else f"L({j}) sub"
    print(f"  index {t:>2} -> {slot} at row {r}: {chain.gamma(t)}")

for j in range(p + 1):
    hess = darboux_transform(chain, j)
    print(f"J({j}): p={hess.p}, trustworthy rows {hess.valid_rows}/{N}")
