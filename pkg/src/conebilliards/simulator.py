"""Exact billiard flow in a polyhedral cone.

A unit-speed particle moves on straight lines inside the cone and reflects
specularly at the walls: v -> v - 2 (v, a) a at a wall with unit inward
normal a.  Reaching two walls at once (a corner) terminates the motion,
which is undefined there.  A trajectory with no approaching wall escapes
to infinity.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import BoundsReport, main_bound
from .errors import ConeMismatch, InvalidState
from .geometry import ConeSpec

# Walls with velocity margin above -APPROACH_TOL are treated as grazing,
# i.e. non-approaching; candidate hit times this close (relative) collide.
APPROACH_TOL = 1e-12
CORNER_REL_TOL = 1e-12
CONTAINMENT_TOL = 1e-9


class Terminal(enum.Enum):
    ESCAPED = "Escaped"
    CORNER_HIT = "CornerHit"
    STEP_LIMIT = "StepLimit"


@dataclass(frozen=True, eq=False)
class BilliardState:
    """Particle position q, unit velocity v, and elapsed time t."""

    q: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("q", "v"):
            a = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            a.flags.writeable = False
            object.__setattr__(self, name, a)


@dataclass(frozen=True, eq=False)
class CollisionEvent:
    """One specular reflection: time, wall index, and the velocity jump."""

    t: float
    wall: int
    q_at: np.ndarray
    v_before: np.ndarray
    v_after: np.ndarray


@dataclass(frozen=True)
class Escape:
    """No wall ahead; the particle leaves the cone forever."""


@dataclass(frozen=True)
class CornerHit:
    """Two or more walls reached simultaneously; motion undefined beyond."""

    t: float
    q_at: np.ndarray


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """A finished trajectory: events in time order plus the velocity chain."""

    initial: BilliardState
    events: tuple
    terminal: Terminal
    velocities: np.ndarray
    final_state: BilliardState
    cone: ConeSpec = field(repr=False)

    @property
    def n_collisions(self) -> int:
        return len(self.events)

    def wall_sequence(self) -> list[int]:
        return [ev.wall for ev in self.events]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def next_event(state: BilliardState, cone: ConeSpec):
    """Advance to the next wall: CollisionEvent, Escape, or CornerHit.

    Candidate times are t_i = -(q, a_i) / (v, a_i) over walls the velocity
    approaches; the smallest wins, and two leaders within relative
    tolerance mean the trajectory runs into a corner.
    """
    a = cone.matrix
    q = state.q
    v = state.v
    margins = q @ a
    if margins.min() < -CONTAINMENT_TOL:
        raise InvalidState(f"position outside the cone: min margin {margins.min():.2e}")
    vel_along = v @ a
    approaching = vel_along < -APPROACH_TOL
    if not approaching.any():
        return Escape()
    times = np.full(cone.n_walls, np.inf)
    times[approaching] = np.maximum(0.0, -margins[approaching] / vel_along[approaching])
    wall = int(times.argmin())
    t_hit = float(times[wall])
    if cone.n_walls > 1:
        others = np.delete(times, wall)
        t_second = float(others.min())
        if t_second - t_hit < CORNER_REL_TOL * (1.0 + t_hit):
            return CornerHit(t=state.t + t_hit, q_at=q + t_hit * v)
    normal = cone.normals[wall]
    q_at = q + t_hit * v
    q_at = q_at - (q_at @ normal) * normal  # land exactly on the wall
    v_after = _unit(v - 2.0 * (v @ normal) * normal)
    return CollisionEvent(
        t=state.t + t_hit, wall=wall, q_at=q_at, v_before=v, v_after=v_after
    )


def run(initial: BilliardState, cone: ConeSpec, max_steps: int | None = None) -> TrajectoryRecord:
    """Iterate next_event until escape, a corner, or the step budget.

    The default budget is ceil(n! (4 / lambda_min)^(n-1)) + 1, so hitting
    the StepLimit means either a bound violation or numerical breakdown,
    and a warning is emitted.
    """
    q = np.array(initial.q, dtype=np.float64)
    v = np.array(initial.v, dtype=np.float64)
    if q.shape != (cone.dim,) or v.shape != (cone.dim,):
        raise InvalidState(f"state vectors must have {cone.dim} components")
    speed = np.linalg.norm(v)
    if abs(speed - 1.0) > 1e-9:
        raise InvalidState(f"velocity must be a unit vector, got norm {speed}")
    v /= speed
    if (q @ cone.matrix).min() < -CONTAINMENT_TOL:
        raise InvalidState("initial position outside the cone")
    if max_steps is None:
        max_steps = int(math.ceil(main_bound(cone.n_walls, cone.lambda_min))) + 1
    if max_steps < 1:
        raise InvalidState("max_steps must be >= 1")

    start = BilliardState(q=q, v=v, t=float(initial.t))
    t = start.t
    events = []
    velocities = [v.copy()]
    terminal = None
    final = None
    while len(events) < max_steps:
        out = next_event(BilliardState(q=q, v=v, t=t), cone)
        if isinstance(out, CollisionEvent):
            events.append(out)
            velocities.append(out.v_after.copy())
            q = np.array(out.q_at)
            v = np.array(out.v_after)
            t = out.t
        elif isinstance(out, Escape):
            terminal = Terminal.ESCAPED
            final = BilliardState(q=q, v=v, t=t)
            break
        else:
            terminal = Terminal.CORNER_HIT
            final = BilliardState(q=out.q_at, v=v, t=out.t)
            break
    if terminal is None:
        terminal = Terminal.STEP_LIMIT
        final = BilliardState(q=q, v=v, t=t)
        warnings.warn(
            f"trajectory exceeded {max_steps} steps; collision bound violated "
            "or numerical breakdown",
            RuntimeWarning,
            stacklevel=2,
        )
    return TrajectoryRecord(
        initial=start,
        events=tuple(events),
        terminal=terminal,
        velocities=np.array(velocities),
        final_state=final,
        cone=cone,
    )


def run_batch(q0: np.ndarray, v0: np.ndarray, cone: ConeSpec, max_steps: int | None = None):
    """Advance many trajectories of one cone in lockstep.

    Applies the stepping rules of `run` (grazing tolerance, corner tie
    rule, wall re-projection, velocity renormalization) to all rows of
    q0, v0 at once; the two must stay step-for-step equivalent.  Returns
    (collision counts, zigzag lengths, per-row Terminal values).  Meant
    for large ensembles where per-event records are not needed.
    """
    a = cone.matrix
    q = np.array(q0, dtype=np.float64)
    v = np.array(v0, dtype=np.float64)
    k = q.shape[0]
    if max_steps is None:
        max_steps = int(math.ceil(main_bound(cone.n_walls, cone.lambda_min))) + 1
    counts = np.zeros(k, dtype=np.int64)
    zigzag = np.zeros(k)
    terminal = np.full(k, -1, dtype=np.int64)  # -1 alive, 0 escaped, 1 corner
    alive = np.ones(k, dtype=bool)
    speeds = np.linalg.norm(v, axis=1)
    if np.abs(speeds - 1.0).max() > 1e-9:
        raise InvalidState("velocities must be unit vectors")
    v /= speeds[:, None]
    if (q @ a).min() < -CONTAINMENT_TOL:
        raise InvalidState("an initial position lies outside the cone")

    for _ in range(max_steps):
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        qa = q[idx]
        va = v[idx]
        margins = qa @ a
        vel_along = va @ a
        approaching = vel_along < -APPROACH_TOL
        times = np.where(
            approaching,
            np.maximum(0.0, -margins / np.where(approaching, vel_along, -1.0)),
            np.inf,
        )
        t1 = times.min(axis=1)
        escaped = ~np.isfinite(t1)
        corner = np.zeros(len(idx), dtype=bool)
        if cone.n_walls > 1:
            t2 = np.partition(times, 1, axis=1)[:, 1]
            fin = ~escaped
            corner[fin] = t2[fin] - t1[fin] < CORNER_REL_TOL * (1.0 + t1[fin])
        terminal[idx[escaped]] = 0
        terminal[idx[corner]] = 1
        alive[idx[escaped | corner]] = False
        go = ~(escaped | corner)
        if not go.any():
            continue
        sub = idx[go]
        wall = times[go].argmin(axis=1)
        normals = cone.normals[wall]
        q_new = qa[go] + t1[go, None] * va[go]
        q_new -= (q_new * normals).sum(axis=1)[:, None] * normals
        vdot = (va[go] * normals).sum(axis=1)
        v_new = va[go] - 2.0 * vdot[:, None] * normals
        v_new /= np.linalg.norm(v_new, axis=1)[:, None]
        zigzag[sub] += np.linalg.norm(v_new - va[go], axis=1)
        counts[sub] += 1
        q[sub] = q_new
        v[sub] = v_new

    code_map = {0: Terminal.ESCAPED, 1: Terminal.CORNER_HIT, -1: Terminal.STEP_LIMIT}
    terminals = np.array([code_map[int(t)] for t in terminal], dtype=object)
    return counts, zigzag, terminals


def zigzag_length(record: TrajectoryRecord) -> float:
    """Length of the polygonal line through the velocity sequence."""
    if record.n_collisions == 0:
        return 0.0
    diffs = np.diff(record.velocities, axis=0)
    return float(np.linalg.norm(diffs, axis=1).sum())


@dataclass(frozen=True)
class BoundCheck:
    name: str
    observed: float
    limit: float
    passed: bool


@dataclass(frozen=True)
class AuditVerdict:
    """Pass/fail result of every bound check applied to one trajectory."""

    n_collisions: int
    zigzag: float
    checks: tuple

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "n_collisions": self.n_collisions,
            "zigzag": self.zigzag,
            "all_passed": self.all_passed,
            "checks": [
                {
                    "name": c.name,
                    "observed": c.observed,
                    "limit": c.limit,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def audit(record: TrajectoryRecord, report: BoundsReport) -> AuditVerdict:
    """Check a trajectory against every bound in the report.

    Collision-count checks compare the integer count against each bound;
    the zigzag check allows 1e-9 slack on the 2/d ceiling.
    """
    if report.cone is not None and not np.array_equal(
        record.cone.normals, report.cone.normals
    ):
        raise ConeMismatch("record and report were built from different cones")
    n_col = record.n_collisions
    zz = zigzag_length(record)
    checks = [
        BoundCheck("bound_main", n_col, report.bound_main, n_col <= report.bound_main),
        BoundCheck("bound_dd", n_col, report.bound_dd, n_col <= report.bound_dd),
        BoundCheck(
            "bound_sevryuk", n_col, report.bound_sevryuk, n_col <= report.bound_sevryuk
        ),
        BoundCheck("bound_bfk", n_col, report.bound_bfk, n_col <= report.bound_bfk),
    ]
    if report.bound_wedge is not None:
        checks.append(
            BoundCheck("bound_wedge", n_col, report.bound_wedge, n_col <= report.bound_wedge)
        )
    if report.tridiagonal_applicable and report.bound_tridiagonal is not None:
        checks.append(
            BoundCheck(
                "bound_tridiagonal",
                n_col,
                report.bound_tridiagonal,
                n_col <= report.bound_tridiagonal,
            )
        )
    ceiling = 2.0 / report.d
    checks.append(BoundCheck("lemma_zigzag", zz, ceiling, zz <= ceiling + 1e-9))
    return AuditVerdict(n_collisions=n_col, zigzag=zz, checks=tuple(checks))


# ---------------------------------------------------------------------------
# Serialization (doubles survive the round trip bit-exactly: json uses the
# shortest decimal representation that reproduces each double)
# ---------------------------------------------------------------------------

def record_to_dict(record: TrajectoryRecord, verdict: AuditVerdict | None = None) -> dict:
    doc = {
        "initial": {
            "q": record.initial.q.tolist(),
            "v": record.initial.v.tolist(),
            "t": record.initial.t,
        },
        "events": [
            {
                "t": ev.t,
                "wall": ev.wall,
                "q_at": ev.q_at.tolist(),
                "v_before": ev.v_before.tolist(),
                "v_after": ev.v_after.tolist(),
            }
            for ev in record.events
        ],
        "terminal": record.terminal.value,
        "final": {
            "q": record.final_state.q.tolist(),
            "v": record.final_state.v.tolist(),
            "t": record.final_state.t,
        },
    }
    if verdict is not None:
        doc["audit"] = verdict.to_dict()
    return doc


def record_to_json(record: TrajectoryRecord, verdict: AuditVerdict | None = None) -> str:
    return json.dumps(record_to_dict(record, verdict), indent=2)


def record_from_dict(doc: dict, cone: ConeSpec) -> TrajectoryRecord:
    initial = BilliardState(
        q=np.array(doc["initial"]["q"]),
        v=np.array(doc["initial"]["v"]),
        t=doc["initial"]["t"],
    )
    events = tuple(
        CollisionEvent(
            t=ev["t"],
            wall=ev["wall"],
            q_at=np.array(ev["q_at"]),
            v_before=np.array(ev["v_before"]),
            v_after=np.array(ev["v_after"]),
        )
        for ev in doc["events"]
    )
    velocities = [initial.v] + [ev.v_after for ev in events]
    final = BilliardState(
        q=np.array(doc["final"]["q"]), v=np.array(doc["final"]["v"]), t=doc["final"]["t"]
    )
    return TrajectoryRecord(
        initial=initial,
        events=events,
        terminal=Terminal(doc["terminal"]),
        velocities=np.array(velocities),
        final_state=final,
        cone=cone,
    )


def record_from_json(text: str, cone: ConeSpec) -> TrajectoryRecord:
    return record_from_dict(json.loads(text), cone)
