"""The two-wall cone: sharp bound, adversarial search, and unfolding.

A wedge of angle theta admits at most ceil(pi/theta) reflections, and the
bound is attained.  The adversarial search finds an attaining trajectory;
unfolding it through successive mirror copies of the wedge straightens it
into a line (the breakpoints below are collinear to ~1e-8).  The velocity
chain of a generic trajectory turns by exactly theta at every interior
collision.
"""

import math

import numpy as np

from conebilliards import (
    BilliardState,
    adversarial_search,
    collinearity_residual,
    inscribed_ball,
    run,
    sharp_bound,
    unfold,
    velocity_arc_check,
    wedge_from_angle,
)
from conebilliards.harness import interior_starts, make_rng

theta = math.pi / 5
wedge = wedge_from_angle(theta)
print(f"wedge angle theta = {theta:.6f} rad, sharp bound ceil(pi/theta) = {sharp_bound(theta)}")

result = adversarial_search(wedge.cone, budget=3000, seed=11)
print(f"adversarial search found N = {result.best_n} collisions")
points = unfold(result.best_record, wedge)
print(f"unfolded breakpoints (collinearity residual {collinearity_residual(points):.2e}):")
for x, y in points:
    print(f"  {x: .10f}  {y: .10f}")

# velocity-arc picture on a generic multi-collision trajectory
rng = make_rng(5, 0)
center = inscribed_ball(wedge.cone).e
report = None
while report is None:
    q, v = interior_starts(rng, wedge.cone, center, 1)
    rec = run(BilliardState(q=q[0], v=v[0]), wedge.cone)
    if rec.n_collisions >= 2:
        report = velocity_arc_check(rec, wedge)
print(f"\ngeneric {rec.n_collisions}-collision trajectory:")
print(f"  interior turning angles: {np.round(report.angles, 9)} (theta = {theta:.9f})")
print(f"  max deviation {report.max_angle_error:.2e}")
print(f"  total turning 2 theta (N-1) = {report.total_turning:.6f} < 2 pi = {2*math.pi:.6f}")
