"""Shooting method: fixed-step RK4 integration plus a two-parameter root scan.

A trajectory is launched from t = 0 with u(0) = a, u'(0) = 0, u''(0) = 0,
u'''(0) = b.  The two shooting residuals are the derivative condition at
t = 1 and the gap in the integral/point-value relation tying u(0) to the
rest of the trajectory.  Roots (a, b) of the residual map correspond to
solutions of the differential problem; they are located by scanning a
rectangle of launch parameters and polishing candidate cells with a
derivative-free Broyden iteration.  This route never touches the kernel
or quadrature modules, so it serves as an independent cross-check of the
integral-equation solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, NonFiniteError
from .expr import _eval_node, evaluate
from .grid import GridFunction
from .kernel import ProblemSpec

__all__ = [
    "ShootingState", "integrate_ivp", "shoot_residual",
    "scan_and_refine", "solution_from_root",
]

DEFAULT_STEPS = 2000
_U_CLAMP = 1e15


@dataclass(frozen=True)
class ShootingState:
    """Dense RK4 trajectory of (u, u', u'', u''') from one launch."""

    a: float
    b: float
    ts: np.ndarray
    states: np.ndarray

    @property
    def u(self) -> np.ndarray:
        return self.states[:, 0]

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.u)))

    def min_value(self) -> float:
        return float(np.min(self.u))

    def derivative_end(self) -> float:
        return float(self.states[-1, 1])

    def as_grid_function(self) -> GridFunction:
        return GridFunction(self.u)


def _check_steps(steps: int) -> None:
    if not isinstance(steps, int) or steps < 10 or steps % 2:
        raise DomainError(f"steps must be an even integer >= 10, got {steps}")


def _rhs_batch(problem, t, y):
    """Right-hand side for a batch of states y with shape (4, m).

    Evaluation is raw: overflow or domain failures become nan entries so a
    bad launch poisons only its own column.
    """
    u_eval = np.minimum(np.maximum(y[0], 0.0), _U_CLAMP)
    with np.errstate(all="ignore"):
        f_val = _eval_node(problem.f, t, u_eval)
    out = np.empty_like(y)
    out[0] = y[1]
    out[1] = y[2]
    out[2] = y[3]
    out[3] = np.negative(f_val)
    return out


def _rk4_batch(problem, a_vec, b_vec, steps, record_u=False, eta_nodes=None):
    """Integrate a batch of launches.  Returns the final states, the on-the-fly
    Simpson integral of u, the u values at requested node indices, and the
    full u history when record_u is set."""
    m = a_vec.shape[0]
    h = 1.0 / steps
    y = np.zeros((4, m))
    y[0] = a_vec
    y[3] = b_vec
    w = np.full(steps + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    w *= h / 3.0
    integral = w[0] * y[0]
    history = np.empty((steps + 1, m)) if record_u else None
    if record_u:
        history[0] = y[0]
    recorded = {}
    if eta_nodes:
        for idx in set(i for quad in eta_nodes for i in quad):
            recorded[idx] = None
    if 0 in recorded:
        recorded[0] = y[0].copy()
    for step in range(1, steps + 1):
        t0 = (step - 1) * h
        k1 = _rhs_batch(problem, t0, y)
        k2 = _rhs_batch(problem, t0 + 0.5 * h, y + 0.5 * h * k1)
        k3 = _rhs_batch(problem, t0 + 0.5 * h, y + 0.5 * h * k2)
        k4 = _rhs_batch(problem, t0 + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        integral = integral + w[step] * y[0]
        if record_u:
            history[step] = y[0]
        if step in recorded:
            recorded[step] = y[0].copy()
    return y, integral, recorded, history


def integrate_ivp(problem: ProblemSpec, a: float, b: float,
                  steps: int = DEFAULT_STEPS) -> ShootingState:
    """Integrate one launch and return the dense trajectory."""
    _check_steps(steps)
    h = 1.0 / steps
    ts = np.linspace(0.0, 1.0, steps + 1)
    y = np.array([float(a), 0.0, 0.0, float(b)])
    states = np.empty((steps + 1, 4))
    states[0] = y
    for step in range(1, steps + 1):
        t0 = ts[step - 1]
        u0 = max(y[0], 0.0)
        k1 = np.array([y[1], y[2], y[3], -evaluate(problem.f, t0, u0)])
        y1 = y + 0.5 * h * k1
        k2 = np.array([y1[1], y1[2], y1[3],
                       -evaluate(problem.f, t0 + 0.5 * h, max(y1[0], 0.0))])
        y2 = y + 0.5 * h * k2
        k3 = np.array([y2[1], y2[2], y2[3],
                       -evaluate(problem.f, t0 + 0.5 * h, max(y2[0], 0.0))])
        y3 = y + h * k3
        k4 = np.array([y3[1], y3[2], y3[3],
                       -evaluate(problem.f, ts[step], max(y3[0], 0.0))])
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[step] = y
    if not np.all(np.isfinite(states)):
        raise NonFiniteError("trajectory left the finite range")
    return ShootingState(float(a), float(b), ts, states)


def _nonlocal_gap(problem, a, traj_u, ts):
    """u(0) minus the combination of the integral and the point values."""
    total = problem.alpha * float(simpson(traj_u, x=ts))
    if problem.betas:
        gf = GridFunction(traj_u)
        for beta_i, eta_i in zip(problem.betas, problem.etas):
            total += beta_i * gf(eta_i)
    return a - total


def shoot_residual(problem: ProblemSpec, a: float, b: float,
                   steps: int = DEFAULT_STEPS) -> tuple[float, float]:
    """Residual pair (derivative at 1, nonlocal gap) for one launch."""
    state = integrate_ivp(problem, a, b, steps)
    r1 = state.derivative_end()
    r2 = _nonlocal_gap(problem, state.a, state.u, state.ts)
    return r1, r2


def solution_from_root(problem: ProblemSpec, a: float, b: float,
                       steps: int = DEFAULT_STEPS) -> ShootingState:
    """Dense trajectory for a refined root of the residual map."""
    return integrate_ivp(problem, a, b, steps)


def _eta_node_indices(problem, steps):
    """Four consecutive grid indices bracketing each eta."""
    quads = []
    for eta_i in problem.etas:
        j = int(np.floor(eta_i * steps))
        lo = min(max(j - 1, 0), steps - 3)
        quads.append((lo, lo + 1, lo + 2, lo + 3))
    return quads


def _batch_residual(problem, a_vec, b_vec, steps):
    """Residual pairs for a batch of launches; nan for exploded columns.

    The point values u(eta) are interpolated with a 4-point Lagrange rule
    on the recorded neighborhoods, accurate to O(h^4) like the rest."""
    quads = _eta_node_indices(problem, steps)
    y, integral, recorded, _ = _rk4_batch(problem, a_vec, b_vec, steps,
                                          eta_nodes=quads)
    r1 = y[1]
    total = problem.alpha * integral
    h = 1.0 / steps
    for quad, beta_i, eta_i in zip(quads, problem.betas, problem.etas):
        xs = np.array([idx * h for idx in quad])
        lag = np.array([
            np.prod([(eta_i - xs[j]) / (xs[q] - xs[j]) for j in range(4) if j != q])
            for q in range(4)
        ])
        u_eta = sum(lag[q] * recorded[quad[q]] for q in range(4))
        total = total + beta_i * u_eta
    r2 = a_vec - total
    return np.asarray(r1, dtype=float), np.asarray(r2, dtype=float)


def _candidate_cells(R1, R2, norm):
    """Cells with a sign change in both residual components, plus cells
    around strict local minima of the residual norm."""
    na, nb = R1.shape[0] - 1, R1.shape[1] - 1
    corners1 = np.stack([R1[:-1, :-1], R1[1:, :-1], R1[:-1, 1:], R1[1:, 1:]])
    corners2 = np.stack([R2[:-1, :-1], R2[1:, :-1], R2[:-1, 1:], R2[1:, 1:]])
    with np.errstate(invalid="ignore"):
        flip1 = (np.nanmin(corners1, axis=0) < 0.0) & (np.nanmax(corners1, axis=0) > 0.0)
        flip2 = (np.nanmin(corners2, axis=0) < 0.0) & (np.nanmax(corners2, axis=0) > 0.0)
    finite = np.all(np.isfinite(corners1), axis=0) & np.all(np.isfinite(corners2), axis=0)
    mask = flip1 & flip2 & finite
    padded = np.full((norm.shape[0] + 2, norm.shape[1] + 2), np.inf)
    padded[1:-1, 1:-1] = np.where(np.isfinite(norm), norm, np.inf)
    center = padded[1:-1, 1:-1]
    is_min = np.ones_like(center, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_min &= center < padded[1 + di:center.shape[0] + 1 + di,
                                      1 + dj:center.shape[1] + 1 + dj]
    min_idx = np.argwhere(is_min & np.isfinite(center))
    for i, j in min_idx:
        ci = min(max(i - 1, 0), na - 1)
        cj = min(max(j - 1, 0), nb - 1)
        mask[ci, cj] = True
    return [(int(i), int(j)) for i, j in np.argwhere(mask)]


def scan_and_refine(problem: ProblemSpec, a_range, b_range, cells=40,
                    steps: int = DEFAULT_STEPS, resid_tol: float = 1e-9,
                    max_refine: int = 60) -> list[tuple[float, float]]:
    """Scan a launch rectangle, then polish candidate cells to roots.

    Returns refined (a, b) pairs, deduplicated, sorted by a then b.  Roots
    whose trajectory dips below -1e-6 or never exceeds 1e-6 are dropped, so
    the identically-zero solution is not reported."""
    _check_steps(steps)
    a_lo, a_hi = float(a_range[0]), float(a_range[1])
    b_lo, b_hi = float(b_range[0]), float(b_range[1])
    if not (a_hi > a_lo and b_hi > b_lo):
        raise DomainError("scan ranges must be nondegenerate intervals")
    if np.ndim(cells) == 0:
        na = nb = int(cells)
    else:
        na, nb = int(cells[0]), int(cells[1])
    if na < 2 or nb < 2:
        raise DomainError("need at least 2 cells per axis")

    a_corners = np.linspace(a_lo, a_hi, na + 1)
    b_corners = np.linspace(b_lo, b_hi, nb + 1)
    A, B = np.meshgrid(a_corners, b_corners, indexing="ij")
    r1, r2 = _batch_residual(problem, A.ravel(), B.ravel(), steps)
    R1 = r1.reshape(na + 1, nb + 1)
    R2 = r2.reshape(na + 1, nb + 1)
    norm = np.maximum(np.abs(R1), np.abs(R2))

    cells_list = _candidate_cells(R1, R2, norm)
    if not cells_list:
        return []

    da = (a_hi - a_lo) / na
    db = (b_hi - b_lo) / nb
    x = np.array([[a_corners[i] + 0.5 * da, b_corners[j] + 0.5 * db]
                  for i, j in cells_list])
    roots = _broyden_polish(problem, x, da, db, steps, resid_tol, max_refine,
                            bounds=(a_lo - 0.5 * (a_hi - a_lo), a_hi + 0.5 * (a_hi - a_lo),
                                    b_lo - 0.5 * (b_hi - b_lo), b_hi + 0.5 * (b_hi - b_lo)))

    accepted = []
    for a_root, b_root in roots:
        state = integrate_ivp(problem, a_root, b_root, steps)
        if state.min_value() < -1e-6 or state.sup_norm() <= 1e-6:
            continue
        accepted.append((a_root, b_root))
    accepted.sort()
    deduped: list[tuple[float, float]] = []
    for a_root, b_root in accepted:
        if any(abs(a_root - a0) + abs(b_root - b0) <= 1e-6 * (1.0 + abs(a0) + abs(b0))
               for a0, b0 in deduped):
            continue
        deduped.append((a_root, b_root))
    return deduped


def _broyden_polish(problem, x, da, db, steps, resid_tol, max_refine, bounds):
    """Vectorized Broyden iteration on the 2d residual map for many starts."""
    m = x.shape[0]
    alive = np.ones(m, dtype=bool)
    fd_a = 1e-4 * da
    fd_b = 1e-4 * db

    def residual_at(pts):
        r1, r2 = _batch_residual(problem, pts[:, 0], pts[:, 1], steps)
        return np.column_stack([r1, r2])

    r = residual_at(x)
    ra = residual_at(x + np.array([fd_a, 0.0]))
    rb = residual_at(x + np.array([0.0, fd_b]))
    J = np.empty((m, 2, 2))
    J[:, :, 0] = (ra - r) / fd_a
    J[:, :, 1] = (rb - r) / fd_b

    roots = []
    step_cap = 5.0 * np.array([da, db])
    for _ in range(max_refine):
        if not np.any(alive):
            break
        rn = np.max(np.abs(r), axis=1)
        done = alive & (rn < resid_tol) & np.all(np.isfinite(x), axis=1)
        for idx in np.flatnonzero(done):
            roots.append((float(x[idx, 0]), float(x[idx, 1])))
        alive &= ~done
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        bad = alive & (~np.isfinite(det) | (np.abs(det) < 1e-300)
                       | ~np.all(np.isfinite(r), axis=1))
        alive &= ~bad
        if not np.any(alive):
            break
        with np.errstate(all="ignore"):
            dx = np.empty((m, 2))
            dx[:, 0] = -(J[:, 1, 1] * r[:, 0] - J[:, 0, 1] * r[:, 1]) / det
            dx[:, 1] = -(-J[:, 1, 0] * r[:, 0] + J[:, 0, 0] * r[:, 1]) / det
        dx = np.clip(dx, -step_cap, step_cap)
        x_new = np.where(alive[:, None], x + dx, x)
        out_of_bounds = (
            (x_new[:, 0] < bounds[0]) | (x_new[:, 0] > bounds[1])
            | (x_new[:, 1] < bounds[2]) | (x_new[:, 1] > bounds[3]))
        alive &= ~out_of_bounds
        r_new = residual_at(x_new)
        dr = r_new - r
        denom = np.sum(dx * dx, axis=1)
        with np.errstate(all="ignore"):
            resid_update = dr - np.einsum("mij,mj->mi", J, dx)
            J = J + np.where(
                (alive & (denom > 0.0))[:, None, None],
                resid_update[:, :, None] * dx[:, None, :] / denom[:, None, None],
                0.0)
        x = np.where(alive[:, None], x_new, x)
        r = np.where(alive[:, None], r_new, r)
    rn = np.max(np.abs(r), axis=1)
    for idx in np.flatnonzero(alive & (rn < resid_tol) & np.all(np.isfinite(x), axis=1)):
        roots.append((float(x[idx, 0]), float(x[idx, 1])))
    return roots
