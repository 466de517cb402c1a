"""Green's functions and cone constants for the beam problem.

The boundary value problem is

    u''''(t) + f(t, u(t)) = 0,        t in (0, 1),
    u'(0) = u'(1) = u''(0) = 0,
    u(0)  = alpha * int_0^1 u(s) ds + sum_i beta_i * u(eta_i),

whose solutions are fixed points of u(t) = int_0^1 H(t, s) f(s, u(s)) ds.
G is the kernel of the local problem (u(0) = 0 in place of the nonlocal
condition); H adds the nonlocal correction, which is well defined whenever
k = 1 - (alpha + sum beta_i) > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, StructuralError
from .expr import ExprNode
from .quadrature import QuadratureRule, integrate

__all__ = [
    "ProblemSpec", "ConstantsReport", "compute_k",
    "green_G", "e_bound", "rho_bound", "integral_G_over_t", "green_H",
    "psi_constant", "constants_report", "DEFAULT_THETA",
]

DEFAULT_THETA = 0.25


@dataclass(frozen=True)
class ProblemSpec:
    """Problem data: nonlinearity f plus boundary coefficients.

    The solvable regime needs alpha >= 0, beta_i >= 0, strictly increasing
    eta_i in (0, 1), and k = 1 - (alpha + sum beta_i) > 0.  Construction
    only enforces shape (matching beta/eta lengths, finite numbers) so
    that structural violations can be *reported* by the hypothesis
    checker; kernels that need k call compute_k and fail fast.
    """

    f: ExprNode
    alpha: float
    betas: tuple[float, ...]
    etas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "etas", tuple(float(h) for h in self.etas))
        if len(self.betas) != len(self.etas):
            raise StructuralError(
                f"beta and eta must have equal length, got {len(self.betas)} and {len(self.etas)}"
            )
        values = (self.alpha,) + self.betas + self.etas
        if not all(np.isfinite(v) for v in values):
            raise StructuralError("alpha, beta, eta must all be finite")

    def structural_violations(self) -> list[str]:
        """Messages for every violated structural condition (empty = valid)."""
        out = []
        if self.alpha < 0:
            out.append(f"alpha = {self.alpha} is negative")
        for i, b in enumerate(self.betas):
            if b < 0:
                out.append(f"beta[{i}] = {b} is negative")
        for i, h in enumerate(self.etas):
            if not (0.0 < h < 1.0):
                out.append(f"eta[{i}] = {h} is outside (0, 1)")
        if any(a >= b for a, b in zip(self.etas[:-1], self.etas[1:])):
            out.append(f"eta = {self.etas} is not strictly increasing")
        total = self.alpha + sum(self.betas)
        if total >= 1.0:
            out.append(f"alpha + sum(beta) = {total} must be < 1")
        return out

    def validate(self) -> None:
        problems = self.structural_violations()
        if problems:
            raise StructuralError("; ".join(problems))


@dataclass(frozen=True)
class ConstantsReport:
    """k, theta, and the cone constants Psi, Phi, Lambda1 = 1/Phi, Lambda2 = 1/Psi."""

    k: float
    theta: float
    psi: float
    phi: float
    lambda1: float
    lambda2: float


def compute_k(problem: ProblemSpec) -> float:
    """k = 1 - (alpha + sum beta_i); raises StructuralError if <= 0."""
    k = 1.0 - (problem.alpha + sum(problem.betas))
    if k <= 0.0:
        raise StructuralError(
            f"1 - (alpha + sum(beta)) = {k} must be positive for the kernel to exist"
        )
    return k


def _check_unit_interval(name, value):
    arr = np.asarray(value, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def green_G(t, s):
    """Kernel of the local problem; scalars or broadcastable arrays.

    G(t,s) = (1/6) * (t^3 (1-s)^2 - (t-s)^3)  for s <= t,
             (1/6) *  t^3 (1-s)^2             for t <= s.

    Continuous with continuous d/ds and d2/ds2 across s = t; the third
    s-derivative jumps by 1 there.
    """
    t_arr = _check_unit_interval("t", t)
    s_arr = _check_unit_interval("s", s)
    upper = t_arr**3 * (1.0 - s_arr) ** 2 / 6.0
    lower = upper - (t_arr - s_arr) ** 3 / 6.0
    out = np.where(s_arr <= t_arr, lower, upper)
    if np.isscalar(t) and np.isscalar(s):
        return float(out)
    return out


def e_bound(s):
    """Upper envelope e(s) = s (1-s)^2 / 6 with G(t,s) <= e(s)."""
    s_arr = _check_unit_interval("s", s)
    out = s_arr * (1.0 - s_arr) ** 2 / 6.0
    return float(out) if np.isscalar(s) else out


def rho_bound(t):
    """Lower envelope factor rho(t) = min(t^3, t^2 (1-t)) with G >= rho(t) e(s)."""
    t_arr = _check_unit_interval("t", t)
    out = np.minimum(t_arr**3, t_arr**2 * (1.0 - t_arr))
    return float(out) if np.isscalar(t) else out


def integral_G_over_t(s):
    """Closed form of int_0^1 G(tau, s) dtau = s (1-s)^2 (2-s) / 24."""
    s_arr = _check_unit_interval("s", s)
    out = s_arr * (1.0 - s_arr) ** 2 * (2.0 - s_arr) / 24.0
    return float(out) if np.isscalar(s) else out


def green_H(t, s, problem: ProblemSpec):
    """Full kernel H(t,s) = G(t,s) + (alpha/k) int G(.,s) + (1/k) sum beta_i G(eta_i, s)."""
    k = compute_k(problem)
    out = np.asarray(green_G(t, s), dtype=float).copy()
    if problem.alpha != 0.0:
        out += (problem.alpha / k) * integral_G_over_t(s)
    for b, h in zip(problem.betas, problem.etas):
        if b != 0.0:
            out += (b / k) * np.asarray(green_G(h, s))
    if np.isscalar(t) and np.isscalar(s):
        return float(out)
    return out


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not (0.0 < theta < 0.5):
        raise DomainError(f"theta = {theta} must lie in (0, 1/2)")
    return theta


def psi_constant(problem: ProblemSpec, theta: float, rule: QuadratureRule | None = None) -> float:
    """Psi(theta) = theta^6 (1-2 theta)^2 * int_theta^{1-theta} m(s) ds

    with m(s) = (1 + alpha/k) e(s) + (1/k) sum beta_i G(eta_i, s).  The
    integrand is piecewise cubic with seams at the eta_i, so the default
    Gauss rule with those seams declared integrates it exactly.
    """
    theta = _check_theta(theta)
    k = compute_k(problem)
    if rule is None:
        seams = tuple(h for h in problem.etas if 0.0 < h < 1.0)
        rule = QuadratureRule(kind="gauss4", panels=64, seams=seams)

    def m(s: float) -> float:
        val = (1.0 + problem.alpha / k) * e_bound(s)
        for b, h in zip(problem.betas, problem.etas):
            val += (b / k) * green_G(h, s)
        return val

    integral = integrate(m, theta, 1.0 - theta, rule)
    return theta**6 * (1.0 - 2.0 * theta) ** 2 * integral


def constants_report(problem: ProblemSpec, theta: float = DEFAULT_THETA,
                     rule: QuadratureRule | None = None) -> ConstantsReport:
    """Compute k and the cone constants at the working theta."""
    theta = _check_theta(theta)
    k = compute_k(problem)
    psi = psi_constant(problem, theta, rule)
    if psi <= 0.0:
        raise StructuralError(f"psi = {psi} must be positive")
    phi = 1.0 / (6.0 * k)
    return ConstantsReport(
        k=k, theta=theta, psi=psi, phi=phi, lambda1=6.0 * k, lambda2=1.0 / psi
    )
