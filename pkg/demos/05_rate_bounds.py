"""Measured T_n(|pr_i - x_i|)(x) against the closed-form rate bounds."""

from nlkorovkin import make_family, verify_rate_bound

for name, opts in (("maxprod", {}), ("poss_kantorovich", {"cell_resolution": 4, "refinements": 0}),
                   ("poss_durrmeyer", {"grid_min": 256})):
    rep = verify_rate_bound(make_family(name, **opts), schedule=(4, 16, 64), grid=11, tol=1e-6)
    print(name, rep.verdict)
    for n, row in rep.details["per_n"].items():
        print(f"   n={n:<3d} max lhs {row['max_lhs']:.4f}   smallest margin {row['min_margin']:.4f}")
