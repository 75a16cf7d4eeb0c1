"""Choquet integrals against the square root of Lebesgue measure.

The capacity A -> sqrt(len(A)) is submodular, so the integral is subadditive
but not additive.  This script integrates a few functions and compares the
sorted-sample quadrature with closed forms and with the discrete formula.
"""

import math

import numpy as np

from nlkorovkin import (MeasurableSet, QuadratureConfig, choquet_integral_1d, discrete_choquet,
                        sqrt_lebesgue)

mu = sqrt_lebesgue()
unit = MeasurableSet.interval(0, 1)

# closed form for x -> x: int_0^1 sqrt(1 - t) dt = 2/3
for samples in (64, 512, 4096):
    v = choquet_integral_1d(lambda t: t, unit, mu, QuadratureConfig(samples))
    print(f"C(x)  samples={samples:5d}  {v:.8f}  err {abs(v - 2 / 3):.1e}")

# subadditive but not additive on sin / cos
f, g = (lambda t: np.sin(3 * t)), (lambda t: np.cos(3 * t))
Cf, Cg = choquet_integral_1d(f, unit, mu), choquet_integral_1d(g, unit, mu)
Cfg = choquet_integral_1d(lambda t: f(t) + g(t), unit, mu)
print(f"C(f+g) = {Cfg:.5f} <= C(f) + C(g) = {Cf + Cg:.5f}")

# comonotone pair: additivity is restored
Ca = choquet_integral_1d(lambda t: t ** 2, unit, mu)
Cb = choquet_integral_1d(np.exp, unit, mu)
Cab = choquet_integral_1d(lambda t: t ** 2 + np.exp(t), unit, mu)
print(f"comonotone: C(a+b) - C(a) - C(b) = {Cab - Ca - Cb:.2e}")

# a step function is a finite Choquet sum
vals = np.array([0.3, -1.2, 2.0, 0.5])
step = lambda t: vals[np.minimum((t * 4).astype(int), 3)]  # noqa: E731
cont = choquet_integral_1d(step, unit, mu, QuadratureConfig(512))
disc = discrete_choquet(vals, lambda s: math.sqrt(len(s) / 4))
print(f"step function: quadrature {cont:.12f}  discrete {disc:.12f}")
