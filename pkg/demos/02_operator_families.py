"""Evaluate every operator family on a smooth function and watch the error shrink."""

import numpy as np

from nlkorovkin import ScalarField, make_family

families = {
    "bkc1": ({}, ScalarField(lambda t: np.exp(t), 1)),
    "truncated_bernstein": ({}, ScalarField(lambda t: 1 + np.sin(np.pi * t), 1)),
    "maxprod": ({}, ScalarField(lambda a, b: np.exp(a + b), 2)),
    "poss_durrmeyer": ({"grid_min": 256}, ScalarField(lambda a, b: 1 + a * b, 2)),
    "poss_kantorovich": ({"cell_resolution": 4, "refinements": 0},
                         ScalarField(lambda a, b: 1 + a * b, 2)),
    "gauss_weierstrass": ({"samples": 128}, ScalarField(lambda a, b: 2 + np.cos(a) * np.sin(b), 2)),
}

for name, (opts, f) in families.items():
    T = make_family(name, **opts)
    pts = T.domain.grid(11)
    row = []
    for n in (4, 16, 64):
        err = np.max(np.abs(T.evaluate(n, f, pts) - f.at(pts)))
        row.append(f"n={n:<3d} {err:.3e}")
    print(f"{name:20s}", "   ".join(row))
