"""Simulate one billiard trajectory and audit it against every bound.

The trajectory starts near the inscribed-ball center of the 3-orthant and
aims into the corner region, so it reflects off each wall once before
escaping.  The audit checks the collision count against all bounds and
the velocity zigzag length against its 2/d ceiling, and the full record
is serialized to JSON (doubles survive the round trip bit-exactly).
"""

import numpy as np

from conebilliards import (
    BilliardState,
    audit,
    bounds_report,
    make_cone,
    record_to_json,
    run,
    zigzag_length,
)

cone = make_cone(3, np.eye(3))
report = bounds_report(cone)

v = np.array([-0.8, -0.55, -0.6])
state = BilliardState(q=np.array([0.9, 1.1, 1.3]), v=v / np.linalg.norm(v))
record = run(state, cone)

print(f"terminal: {record.terminal.value}")
print(f"collisions: {record.n_collisions}, walls hit: {record.wall_sequence()}")
for ev in record.events:
    print(f"  t={ev.t:.6f}  wall={ev.wall}  at {np.round(ev.q_at, 4)}")
print(f"zigzag length {zigzag_length(record):.6f} vs ceiling 2/d = {2/report.d:.6f}")

verdict = audit(record, report)
print("\naudit:")
for check in verdict.checks:
    mark = "ok " if check.passed else "BAD"
    print(f"  [{mark}] {check.name}: observed {check.observed:.6g} <= {check.limit:.6g}")
print(f"all passed: {verdict.all_passed}")

print("\nserialized record:")
print(record_to_json(record, verdict))
