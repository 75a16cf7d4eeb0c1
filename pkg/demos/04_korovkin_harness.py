"""Korovkin-type convergence: a positive case, a negative case and its repair.

bkc1 converges on its test set and then on every probe.  The truncated
Bernstein operator converges on 1, x, x^2 but cannot reproduce x - 1/2 since
its output is never negative; shifting by the sup norm fixes that.
"""

import numpy as np

from nlkorovkin import ScalarField, ShiftedFamily, TestSet, make_family, run_harness

sched = (4, 16, 64, 128)

rep = run_harness(make_family("bkc1"), probes={"exp": ScalarField(np.exp, 1, name="exp")},
                  schedule=sched)
print(rep.summary())

e = ScalarField.coordinate(1, 1)
classical = TestSet({"1": ScalarField.constant(1.0, 1), "e1": e, "e2": e * e}, kind="classical")
probe = {"x-1/2": ScalarField(lambda t: t - 0.5, 1)}
T = make_family("truncated_bernstein")
print(run_harness(T, classical, probe, sched, diagnose=False).summary())
print(run_harness(ShiftedFamily(T), TestSet({}), probe, sched, diagnose=False).summary())
