"""Minimax solvers on the unit sphere.

Three interchangeable routes are provided for the nonsmooth sphere
problems that arise from cone geometry:

* exact stationary-point enumeration (equal-margin subsets), valid because
  every optimizer lies in the span of its active normals with equal margins;
* deterministic multistart projected subgradient descent with step halving,
  vectorized across starts;
* dense grid oracles (circle / Fibonacci sphere) with a local zoom stage,
  for dimensions 2 and 3.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateArrangement

# Fixed scramble seed: starts are low-discrepancy yet reproducible.
_SOBOL_SEED = 20090
_FEAS_TOL = 1e-9


def sphere_starts(dim: int, count: int) -> np.ndarray:
    """Deterministic low-discrepancy points on the unit sphere in R^dim."""
    if dim == 1:
        return np.array([[1.0], [-1.0]] * ((count + 1) // 2))[:count]
    sob = qmc.Sobol(d=dim, scramble=True, seed=_SOBOL_SEED)
    m = max(1, math.ceil(math.log2(count)))
    u = sob.random_base2(m)[:count]
    # Inverse-normal map sends the low-discrepancy cube to the sphere.
    from scipy.special import ndtri

    z = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(z, axis=1)
    norms[norms < 1e-12] = 1.0
    pts = z / norms[:, None]
    pts[np.linalg.norm(z, axis=1) < 1e-12] = np.eye(dim)[0]
    return pts


def _normalize_rows(y: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(y, axis=1)
    n[n < 1e-300] = 1.0
    return y / n[:, None]


# ---------------------------------------------------------------------------
# Exact equal-margin enumeration
# ---------------------------------------------------------------------------

def max_min_margin(normals: np.ndarray):
    """Maximize min_i (u, a_i) over the unit ball, exactly.

    The objective is concave, so the optimum is attained at a unit vector
    lying in the span of its active normals, with equal margins there.  All
    2^n - 1 candidate active subsets are enumerated; each candidate is a
    feasible unit vector, so the best min-margin over all walls is exact.

    Returns (value, argmax unit vector).  A value <= 0 means the cone of
    the given normals has empty interior.
    """
    arr = np.atleast_2d(np.asarray(normals, dtype=np.float64))
    n = arr.shape[0]
    best_val = -np.inf
    best_u = None
    for k in range(1, n + 1):
        for subset in itertools.combinations(range(n), k):
            sub = arr[list(subset)]
            g = sub @ sub.T
            try:
                w = np.linalg.solve(g, np.ones(k))
            except np.linalg.LinAlgError:
                continue
            u0 = w @ sub
            nrm = np.linalg.norm(u0)
            if nrm < 1e-12:
                continue
            u = u0 / nrm
            val = float((u @ arr.T).min())
            if val > best_val:
                best_val = val
                best_u = u
    if best_u is None:
        raise DegenerateArrangement("no equal-margin candidate could be formed")
    return best_val, best_u


def min_max_abs_margin(normals: np.ndarray):
    """Minimize max_i |(y, a_i)| over the unit sphere, exactly (n = m).

    Every sphere-stationary point of the objective lies in the span of its
    active signed normals with equal absolute margins, so enumerating all
    (subset, sign) pairs and evaluating each candidate on all walls yields
    the global minimum.  Requires the normals to span the space, otherwise
    the true minimum is 0 and not attained by any candidate.

    Returns (value, argmin unit vector).
    """
    arr = np.atleast_2d(np.asarray(normals, dtype=np.float64))
    n = arr.shape[0]
    best_val = np.inf
    best_y = None
    for k in range(1, n + 1):
        for subset in itertools.combinations(range(n), k):
            sub = arr[list(subset)]
            # Fixing the first sign to +1 halves the work; candidates come
            # in +/- pairs with identical objective values.
            for signs in itertools.product((1.0, -1.0), repeat=k - 1):
                s = np.array((1.0,) + signs)
                signed = s[:, None] * sub
                g = signed @ signed.T
                try:
                    w = np.linalg.solve(g, np.ones(k))
                except np.linalg.LinAlgError:
                    continue
                y0 = w @ signed
                nrm = np.linalg.norm(y0)
                if nrm < 1e-12:
                    continue
                y = y0 / nrm
                val = float(np.abs(y @ arr.T).max())
                if val < best_val:
                    best_val = val
                    best_y = y
    if best_y is None:
        raise DegenerateArrangement("no equal-margin candidate could be formed")
    return best_val, best_y


# ---------------------------------------------------------------------------
# Multistart projected subgradient descent
# ---------------------------------------------------------------------------

def multistart_min_max_abs(
    normals: np.ndarray,
    n_starts: int = 256,
    iters: int = 500,
    step0: float = 0.5,
):
    """Multistart subgradient route for min over the sphere of max |margin|.

    All starts advance in lockstep as one array; a start that fails to
    improve halves its step.  Returns (value, argmin vector, starts used).
    """
    arr = np.atleast_2d(np.asarray(normals, dtype=np.float64))
    m = arr.shape[1]
    y = sphere_starts(m, n_starts)
    margins = y @ arr.T
    f = np.abs(margins).max(axis=1)
    eta = np.full(n_starts, step0)
    for _ in range(iters):
        idx = np.abs(margins).argmax(axis=1)
        rows = np.arange(n_starts)
        s = np.sign(margins[rows, idx])
        s[s == 0.0] = 1.0
        grad = s[:, None] * arr[idx]
        cand = _normalize_rows(y - eta[:, None] * grad)
        cand_margins = cand @ arr.T
        cand_f = np.abs(cand_margins).max(axis=1)
        better = cand_f < f
        y = np.where(better[:, None], cand, y)
        margins = np.where(better[:, None], cand_margins, margins)
        f = np.where(better, cand_f, f)
        eta = np.where(better, eta, eta * 0.5)
        if eta.max() < 1e-14:
            break
    best = int(f.argmin())
    return float(f[best]), y[best].copy(), n_starts


# ---------------------------------------------------------------------------
# Dense grid oracles (dim 2 and 3)
# ---------------------------------------------------------------------------

def circle_points(count: int) -> np.ndarray:
    phi = 2.0 * np.pi * np.arange(count) / count
    return np.stack([np.cos(phi), np.sin(phi)], axis=1)


def fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    z = 1.0 - 2.0 * (i + 0.5) / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(golden * i), r * np.sin(golden * i), z], axis=1)


def _tangent_zoom(f_batch, center: np.ndarray, radius: float, steps: int):
    """Evaluate f on a tangent-plane grid around a sphere point, normalized."""
    m = center.shape[0]
    base = np.zeros(m)
    base[int(np.abs(center).argmin())] = 1.0
    t1 = base - (base @ center) * center
    t1 /= np.linalg.norm(t1)
    if m == 2:
        offs = np.linspace(-radius, radius, steps)
        pts = center[None, :] + offs[:, None] * t1[None, :]
    else:
        t2 = np.cross(center, t1) if m == 3 else None
        offs = np.linspace(-radius, radius, steps)
        uu, vv = np.meshgrid(offs, offs, indexing="ij")
        pts = (
            center[None, :]
            + uu.reshape(-1, 1) * t1[None, :]
            + vv.reshape(-1, 1) * t2[None, :]
        )
    pts = _normalize_rows(pts)
    vals = f_batch(pts)
    j = int(np.argmin(vals))
    return float(vals[j]), pts[j].copy()


def sphere_grid_minimize(
    f_batch,
    dim: int,
    coarse_count: int | None = None,
    seeds: np.ndarray | None = None,
    zoom_steps: int = 201,
):
    """Two-stage dense-grid minimization of f over the unit sphere.

    Stage one scans a global grid (circle for dim 2, Fibonacci sphere with
    >= 2^20 points for dim 3) plus any caller-supplied seed points; stage
    two re-scans a fine local grid around the incumbent.  `f_batch` maps an
    (k, dim) array to k values and may return +inf off its domain.
    """
    if dim == 2:
        count = coarse_count or 200_000
        grid = circle_points(count)
        gap = 2.0 * math.pi / count
    elif dim == 3:
        count = coarse_count or (1 << 20)
        grid = fibonacci_sphere(count)
        gap = math.sqrt(4.0 * math.pi / count)
    else:
        raise ValueError("grid oracle supports dim 2 and 3 only")
    if seeds is not None and len(seeds):
        grid = np.vstack([grid, np.atleast_2d(seeds)])

    vals = f_batch(grid)
    j = int(np.argmin(vals))
    best_val, best_pt = float(vals[j]), grid[j].copy()
    if not math.isfinite(best_val):
        raise DegenerateArrangement("grid oracle found no feasible point")

    # Local zooms shrink the bracket geometrically around the incumbent.
    radius = 2.0 * gap
    for _ in range(2):
        zv, zp = _tangent_zoom(f_batch, best_pt, radius, zoom_steps)
        if zv < best_val:
            best_val, best_pt = zv, zp
        radius = max(4.0 * radius / zoom_steps, 1e-12)
    return best_val, best_pt


# ---------------------------------------------------------------------------
# Distances to cone faces and projection onto the cone
# ---------------------------------------------------------------------------

def _orthonormal_rows(vectors: np.ndarray) -> np.ndarray:
    basis = []
    for v in vectors:
        w = v.copy()
        for b in basis:
            w -= (w @ b) * b
        nw = np.linalg.norm(w)
        if nw > 1e-12:
            basis.append(w / nw)
    return np.array(basis)


class FaceDistance:
    """Exact Euclidean distances from points to the faces of a cone.

    Face i is {x : (x, a_i) = 0, (x, a_j) >= 0 for all j}.  The projection
    of a point onto face i lands in the relative interior of one of its
    sub-faces, so enumerating all additional active subsets T of the other
    walls, projecting onto each affine piece, and keeping the feasible
    minimum is exact.  Projectors are precomputed once per cone.
    """

    def __init__(self, normals: np.ndarray):
        arr = np.atleast_2d(np.asarray(normals, dtype=np.float64))
        self.normals = arr
        self.n, self.m = arr.shape
        eye = np.eye(self.m)
        self._pieces: list[np.ndarray] = []
        self._cone_projectors: list[np.ndarray] = [eye.copy()]
        others = list(range(self.n))
        for i in range(self.n):
            rest = [j for j in others if j != i]
            mats = []
            for k in range(len(rest) + 1):
                for extra in itertools.combinations(rest, k):
                    span = arr[[i, *extra]]
                    u = _orthonormal_rows(span)
                    mats.append(eye - u.T @ u)
            self._pieces.append(np.stack(mats))
        for k in range(1, self.n + 1):
            for subset in itertools.combinations(range(self.n), k):
                u = _orthonormal_rows(arr[list(subset)])
                self._cone_projectors.append(eye - u.T @ u)
        self._cone_projectors = np.stack(self._cone_projectors)

    def face_distances(self, points: np.ndarray) -> np.ndarray:
        """Distances from each point (rows) to each face, shape (k, n)."""
        pts = np.atleast_2d(points)
        at = self.normals.T
        out = np.empty((pts.shape[0], self.n))
        for i in range(self.n):
            proj = np.einsum("pmk,bk->pbm", self._pieces[i], pts)
            margins_ok = (proj @ at).min(axis=2) >= -_FEAS_TOL
            d2 = ((pts[None, :, :] - proj) ** 2).sum(axis=2)
            d2[~margins_ok] = np.inf
            out[:, i] = np.sqrt(d2.min(axis=0))
        return out

    def distances_and_feet(self, points: np.ndarray):
        """Face distances plus the projection feet, shapes (k, n) and (k, n, m)."""
        pts = np.atleast_2d(points)
        at = self.normals.T
        b = pts.shape[0]
        dists = np.empty((b, self.n))
        feet = np.empty((b, self.n, self.m))
        for i in range(self.n):
            proj = np.einsum("pmk,bk->pbm", self._pieces[i], pts)
            margins_ok = (proj @ at).min(axis=2) >= -_FEAS_TOL
            d2 = ((pts[None, :, :] - proj) ** 2).sum(axis=2)
            d2[~margins_ok] = np.inf
            pick = d2.argmin(axis=0)
            rows = np.arange(b)
            dists[:, i] = np.sqrt(d2[pick, rows])
            feet[:, i, :] = proj[pick, rows]
        return dists, feet

    def max_face_distance(self, points: np.ndarray) -> np.ndarray:
        return self.face_distances(points).max(axis=1)

    def project_to_cone(self, points: np.ndarray) -> np.ndarray:
        """Exact Euclidean projection of each point onto the cone."""
        pts = np.atleast_2d(points)
        at = self.normals.T
        proj = np.einsum("pmk,bk->pbm", self._cone_projectors, pts)
        margins_ok = (proj @ at).min(axis=2) >= -_FEAS_TOL
        d2 = ((pts[None, :, :] - proj) ** 2).sum(axis=2)
        d2[~margins_ok] = np.inf
        pick = d2.argmin(axis=0)
        return proj[pick, np.arange(pts.shape[0])]


def multistart_min_max_face_distance(
    face: FaceDistance,
    interior_seed: np.ndarray,
    n_starts: int = 256,
    iters: int = 500,
    step0: float = 0.25,
    stall_limit: int = 60,
):
    """Minimize max_i dist(y, B_i) over the unit sphere inside the cone.

    Iterates stay feasible: each step is projected back onto the cone and
    renormalized.  The reported value is the best feasible evaluation seen,
    hence always an estimate from above.  Stops early once the incumbent
    has not improved for `stall_limit` iterations (the best start's step
    has collapsed by then).  Returns (value, point, starts).
    """
    m = face.m
    raw = sphere_starts(m, max(1, n_starts - 1))
    y = face.project_to_cone(raw)
    norms = np.linalg.norm(y, axis=1)
    y[norms < 1e-9] = interior_seed
    y = np.vstack([y, interior_seed[None, :]])
    y = _normalize_rows(y)
    total = y.shape[0]

    dists, feet = face.distances_and_feet(y)
    f = dists.max(axis=1)
    eta = np.full(total, step0)
    best_val = float(f.min())
    best_y = y[int(f.argmin())].copy()
    rows = np.arange(total)
    stalled = 0
    for _ in range(iters):
        worst = dists.argmax(axis=1)
        # Subgradient of the active distance: unit vector from the face
        # projection toward the point.
        diff = y - feet[rows, worst]
        dn = np.linalg.norm(diff, axis=1)
        dn[dn < 1e-300] = 1.0
        grad = diff / dn[:, None]
        cand = face.project_to_cone(y - eta[:, None] * grad)
        cn = np.linalg.norm(cand, axis=1)
        dead = cn < 1e-9
        cand[dead] = y[dead]
        cand = _normalize_rows(cand)
        cand_d, cand_feet = face.distances_and_feet(cand)
        cand_f = cand_d.max(axis=1)
        better = cand_f < f
        y = np.where(better[:, None], cand, y)
        dists = np.where(better[:, None], cand_d, dists)
        feet = np.where(better[:, None, None], cand_feet, feet)
        f = np.where(better, cand_f, f)
        eta = np.where(better, eta, eta * 0.5)
        fmin = float(f.min())
        if fmin < best_val - 1e-13:
            best_val = fmin
            best_y = y[int(f.argmin())].copy()
            stalled = 0
        else:
            stalled += 1
            if stalled >= stall_limit:
                break
        if eta.max() < 1e-14:
            break
    return best_val, best_y, total
