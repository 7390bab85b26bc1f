"""Reproducible experiment driver: random cones, ensembles, adversarial search.

All randomness flows from a counter-based Philox generator keyed by
(seed, stream), with Gaussians produced by an explicit Box-Muller
transform of its uniforms, so identical seeds give identical results.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import bounds_report, inscribed_ball
from .errors import DegenerateSampling, DimensionMismatch
from .geometry import ConeSpec, jacobi_eigenvalues, make_cone, reduce_to_span
from .simulator import BilliardState, TrajectoryRecord, audit, run, zigzag_length

_MASK64 = (1 << 64) - 1
# Resampling floor on the smallest singular value of the normal matrix.
_SAMPLING_FLOOR = 1e-3


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, stream); counter-based, reproducible."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def gaussians(rng: np.random.Generator, count: int) -> np.ndarray:
    """Standard normals via Box-Muller on Philox uniforms (fixed transform)."""
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # in (0, 1], keeps the log finite
    u2 = rng.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:count]


def sphere_sample(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """`count` points uniform on the unit sphere in R^dim."""
    z = gaussians(rng, count * dim).reshape(count, dim)
    norms = np.linalg.norm(z, axis=1)
    norms[norms < 1e-12] = 1.0
    return z / norms[:, None]


def ball_sample(rng: np.random.Generator, dim: int) -> np.ndarray:
    """One point uniform in the unit ball in R^dim."""
    direction = sphere_sample(rng, 1, dim)[0]
    radius = rng.random() ** (1.0 / dim)
    return radius * direction


def random_cone(n: int, dim: int, seed: int, stream: int = 0) -> ConeSpec:
    """Random cone with normals uniform on the sphere, resampled until the
    smallest singular value of the normal matrix exceeds 1e-3."""
    if n > dim:
        raise DimensionMismatch(f"need n <= dim, got n={n}, dim={dim}")
    rng = make_rng(seed, stream)
    for _ in range(1000):
        normals = sphere_sample(rng, n, dim)
        g = normals @ normals.T
        lam = float(jacobi_eigenvalues(g)[0])
        if math.sqrt(max(lam, 0.0)) > _SAMPLING_FLOOR:
            return make_cone(dim, normals)
    raise DegenerateSampling("1000 attempts without a well-conditioned cone")


def interior_start(
    rng: np.random.Generator, cone: ConeSpec, center: np.ndarray
) -> BilliardState:
    """q = center + 0.1 u with u uniform in the unit ball, rejected until
    inside the cone; v uniform on the sphere."""
    a = cone.matrix
    for _ in range(1000):
        q = center + 0.1 * ball_sample(rng, cone.dim)
        if (q @ a).min() >= 0.0:
            break
    else:
        q = center.copy()
    v = sphere_sample(rng, 1, cone.dim)[0]
    return BilliardState(q=q, v=v)


def interior_starts(
    rng: np.random.Generator, cone: ConeSpec, center: np.ndarray, count: int
):
    """Vectorized interior_start: returns (Q, V) arrays of shape (count, m)."""
    a = cone.matrix
    dim = cone.dim
    q = np.empty((count, dim))
    pending = np.arange(count)
    for _ in range(1000):
        if len(pending) == 0:
            break
        directions = sphere_sample(rng, len(pending), dim)
        radii = rng.random(len(pending)) ** (1.0 / dim)
        cand = center + 0.1 * radii[:, None] * directions
        ok = (cand @ a).min(axis=1) >= 0.0
        q[pending[ok]] = cand[ok]
        pending = pending[~ok]
    if len(pending):
        q[pending] = center
    v = sphere_sample(rng, count, dim)
    return q, v


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    n_walls: int
    dim: int
    trials: int
    seed: int
    max_steps_override: int | None = None
    search_budget: int = 0
    output_path: str | None = None
    format: str = "csv"
    # Trajectories per cone; defaults to `trials` when unset.
    paths_per_cone: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n_walls > self.dim:
            raise ValueError("n_walls must not exceed dim")
        if self.format not in ("csv", "structured"):
            raise ValueError(f"unknown format {self.format!r}")


@dataclass(frozen=True)
class EnsembleRow:
    cone_id: int
    seed: int
    lambda_min: float
    d: float
    delta: float
    C: float
    phi: float
    bound_main: float
    bound_dd: float
    bound_sevryuk: float
    bound_bfk: float
    max_observed_N: int
    zigzag_max_L: float
    lemma1_ceiling: float
    all_checks_pass: bool

    FIELDS = (
        "cone_id",
        "seed",
        "lambda_min",
        "d",
        "delta",
        "C",
        "phi",
        "bound_main",
        "bound_dd",
        "bound_sevryuk",
        "bound_bfk",
        "max_observed_N",
        "zigzag_max_L",
        "lemma1_ceiling",
        "all_checks_pass",
    )

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def rows_to_csv(rows) -> str:
    lines = [",".join(EnsembleRow.FIELDS)]
    for row in rows:
        lines.append(",".join(_format_value(getattr(row, f)) for f in EnsembleRow.FIELDS))
    return "\n".join(lines) + "\n"


def rows_to_structured(rows) -> str:
    return json.dumps([row.to_dict() for row in rows], indent=2) + "\n"


# Streams are partitioned so cone sampling and trajectory sampling never
# overlap: stream = trial index for cones, trial + _IC_STREAM_BASE for starts.
_IC_STREAM_BASE = 1 << 32


def ensemble_run(config: ExperimentConfig) -> list[EnsembleRow]:
    """Random-cone ensemble: per cone, compute the bounds report, fire many
    random trajectories, audit each, and record the observed maxima.

    Rows are written incrementally when `output_path` is set, so partial
    results survive a failure.  Identical configs produce byte-identical
    output files.
    """
    rows: list[EnsembleRow] = []
    handle = open(config.output_path, "w") if config.output_path else None
    try:
        if handle and config.format == "csv":
            handle.write(",".join(EnsembleRow.FIELDS) + "\n")
            handle.flush()
        for trial in range(config.trials):
            cone = random_cone(config.n_walls, config.dim, config.seed, stream=trial)
            report = bounds_report(cone)
            rcone = report.cone  # reduced to n = m when needed
            center = inscribed_ball(rcone).e
            rng = make_rng(config.seed, stream=_IC_STREAM_BASE + trial)
            paths = config.paths_per_cone or config.trials
            max_n = 0
            max_l = 0.0
            all_pass = True
            for _ in range(paths):
                state = interior_start(rng, rcone, center)
                rec = run(state, rcone, max_steps=config.max_steps_override)
                verdict = audit(rec, report)
                max_n = max(max_n, rec.n_collisions)
                max_l = max(max_l, verdict.zigzag)
                all_pass = all_pass and verdict.all_passed
            row = EnsembleRow(
                cone_id=trial,
                seed=config.seed,
                lambda_min=report.lambda_min,
                d=report.d,
                delta=report.delta,
                C=report.bfk_C,
                phi=report.charge_phi,
                bound_main=report.bound_main,
                bound_dd=report.bound_dd,
                bound_sevryuk=report.bound_sevryuk,
                bound_bfk=report.bound_bfk,
                max_observed_N=max_n,
                zigzag_max_L=max_l,
                lemma1_ceiling=2.0 / report.d,
                all_checks_pass=all_pass,
            )
            rows.append(row)
            if handle and config.format == "csv":
                handle.write(
                    ",".join(_format_value(getattr(row, f)) for f in EnsembleRow.FIELDS)
                    + "\n"
                )
                handle.flush()
        if handle and config.format == "structured":
            handle.write(rows_to_structured(rows))
    finally:
        if handle:
            handle.close()
    return rows


# ---------------------------------------------------------------------------
# Adversarial search
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SearchResult:
    best_n: int
    best_state: BilliardState
    best_record: TrajectoryRecord


def _wall_hugging_starts(cone: ConeSpec, center: np.ndarray):
    """Rays nearly parallel to a wall, aimed deep into a two-wall cone.

    Unfolding shows these maximize wall crossings, so they seed the search
    for the sharp wedge bound.
    """
    starts = []
    for w in range(2):
        normal = cone.normals[w]
        other = cone.normals[1 - w]
        g = np.array([-normal[1], normal[0]])
        if g @ other < 0:
            g = -g
        for h_exp in np.linspace(-6.0, -1.0, 6):
            h = 10.0 ** h_exp
            q = g + h * center
            for s_exp in np.linspace(-8.0, -1.0, 15):
                s = 10.0 ** s_exp
                for sign in (1.0, -1.0):
                    v = -(g + sign * s * normal)
                    starts.append((q, v / np.linalg.norm(v)))
    return starts


def adversarial_search(cone: ConeSpec, budget: int, seed: int) -> SearchResult:
    """Maximize the collision count over initial conditions.

    Deterministic under the seed: wall-hugging heuristics (two-wall cones),
    random interior starts, then simulated annealing around the incumbent,
    all drawn from one Philox stream.  `budget` counts trajectory runs.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    basis = None
    work = cone
    if cone.n_walls < cone.dim:
        work, basis = reduce_to_span(cone.dim, cone.normals)
    center = inscribed_ball(work).e
    rng = make_rng(seed, stream=0)
    evaluations = 0

    best = (-1, None, None)

    def evaluate(q, v):
        nonlocal evaluations, best
        state = BilliardState(q=q, v=v / np.linalg.norm(v))
        rec = run(state, work)
        evaluations += 1
        if rec.n_collisions > best[0]:
            best = (rec.n_collisions, state, rec)
        return rec.n_collisions

    if work.n_walls == 2:
        for q, v in _wall_hugging_starts(work, center):
            if evaluations >= budget // 2:
                break
            evaluate(q, v)

    n_random = max(1, (budget - evaluations) // 2)
    for _ in range(n_random):
        if evaluations >= budget:
            break
        state = interior_start(rng, work, center)
        evaluate(np.array(state.q), np.array(state.v))

    # Annealing walk around the incumbent.
    cur_n, cur_state = best[0], best[1]
    q = np.array(cur_state.q)
    v = np.array(cur_state.v)
    remaining = budget - evaluations
    for k in range(max(0, remaining)):
        temp = max(0.02, 1.0 * (1.0 - k / max(1, remaining)))
        dv = gaussians(rng, work.dim)
        v_new = v + 0.3 * temp * dv
        v_new /= np.linalg.norm(v_new)
        q_new = q + 0.1 * temp * gaussians(rng, work.dim)
        if (q_new @ work.matrix).min() < 0.0:
            q_new = q
        n_new = evaluate(q_new, v_new)
        if n_new >= cur_n or rng.random() < math.exp((n_new - cur_n) / temp):
            cur_n, q, v = n_new, q_new, v_new

    best_n, best_state, best_record = best
    if basis is not None:
        # Map the winning state back to the ambient coordinates.
        q_amb = best_state.q @ basis
        v_amb = best_state.v @ basis
        best_state = BilliardState(q=q_amb, v=v_amb, t=best_state.t)
    return SearchResult(best_n=best_n, best_state=best_state, best_record=best_record)
