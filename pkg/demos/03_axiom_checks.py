"""Randomized axiom checks against each family's declared profile.

A failed axiom comes with a witness: the inputs and the grid point where the
defect was largest.
"""

from nlkorovkin import axiom_matrix, make_family

setups = {
    "bkc1": {},
    "maxprod": {},
    "truncated_bernstein": {},
    "poss_kantorovich": {"cell_resolution": 4, "refinements": 0},
}

for name, opts in setups.items():
    T = make_family(name, **opts)
    m = axiom_matrix(T, ns=(8,), trials=30, grid=7)
    cells = []
    for (n, axiom), rep in sorted(m.items()):
        claim = T.profile.claim(axiom)
        mark = "ok" if claim == rep.passed else "MISMATCH"
        cells.append(f"{axiom}:{rep.verdict}({mark})")
    print(f"{name:20s}", " ".join(cells))

T = make_family("maxprod")
rep = axiom_matrix(T, ns=(8,), trials=5, grid=7)[(8, "TR")]
print("\nmaxprod TR witness:", {k: v for k, v in rep.witness.items() if k in ("x", "alpha", "n")},
      f"defect {rep.worst_violation:.3f}")
