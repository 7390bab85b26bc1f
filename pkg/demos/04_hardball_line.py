"""Hard balls on a line and their cone-billiard image.

Mass-weighted coordinates y_i = sqrt(m_i) x_i turn the ordering
constraints into a polyhedral cone; elastic collisions become specular
reflections.  Both simulators run independently and must produce the same
event sequence, which is the strongest cross-check in the package.
"""

import numpy as np

from conebilliards import (
    HardBallSystem,
    balls_to_cone,
    conjugacy_check,
    gram,
    simulate_balls,
    tridiagonal_case,
)

system = HardBallSystem(
    masses=np.array([1.0, 2.5, 0.7, 1.4]),
    positions=np.array([0.0, 1.0, 2.2, 3.1]),
    velocities=np.array([1.2, 0.1, -0.4, -1.0]),
)

cone, cmap = balls_to_cone(system.masses)
print("induced cone Gram matrix (tridiagonal):")
print(np.array_str(gram(cone).entries, precision=6))
applicable, bound = tridiagonal_case(gram(cone))
print(f"banded special case applicable: {applicable}, bound n(n+1)/2 = {bound}")

traj = simulate_balls(system)
print(f"\nevent-driven run: {traj.n_collisions} collisions, terminal {traj.terminal.value}")
for ev in traj.events:
    print(f"  t={ev.t:.6f}  pair={ev.pair}  velocities after: "
          f"({ev.velocities_after[0]:.6f}, {ev.velocities_after[1]:.6f})")
print(f"final velocities: {np.round(traj.final_velocities, 6)}")

p0 = float(np.sum(system.masses * system.velocities))
e0 = float(np.sum(system.masses * system.velocities ** 2) / 2)
p1 = float(np.sum(system.masses * traj.final_velocities))
e1 = float(np.sum(system.masses * traj.final_velocities ** 2) / 2)
print(f"momentum {p0:.12f} -> {p1:.12f}, energy {e0:.12f} -> {e1:.12f}")

report = conjugacy_check(system)
print(f"\nconjugacy with the cone billiard: matched = {report.matched}")
print(f"  ball pair sequence: {report.pair_sequence}")
print(f"  cone wall sequence: {report.wall_sequence}")
print(f"  worst relative time error: {report.max_time_error:.2e}")

# equal masses: swaps only, capped by the banded bound
equal = HardBallSystem(
    masses=np.ones(5),
    positions=np.array([0.0, 1.0, 2.0, 3.5, 4.2]),
    velocities=np.array([2.0, 1.0, 0.0, -1.0, -2.0]),
)
traj_eq = simulate_balls(equal)
print(f"\nequal-mass 5-ball run: {traj_eq.n_collisions} collisions "
      f"(cap 4*5/2 = {4 * 5 // 2})")
