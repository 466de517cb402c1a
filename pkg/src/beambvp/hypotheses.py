"""Mechanical checks of the structural conditions and growth hypotheses.

Limit functionals of f(t,u)/u are estimated by sampling envelopes on a
grid of u values approaching the limit; classification combines the
spec'd envelope thresholds with the fitted log-log slope, since a clean
power-law trend identifies decay or blowup even when the envelope has
not yet crossed the magnitude thresholds at the last sample.  Estimates
are advisory by nature: a verdict of `inconclusive` means the samples do
not tell a consistent story, never that the condition is false.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, EvalDomainError, NonFiniteError
from .expr import _eval_node, evaluate
from .grid import GridFunction, deriv1_left, deriv1_right, deriv2_left
from .hammerstein import apply_T
from .kernel import DEFAULT_THETA, ProblemSpec, compute_k, psi_constant

__all__ = [
    "LimitEstimate", "HypothesisReport",
    "check_structural", "estimate_limit", "check_H1_H2_H3_H5",
    "check_H4", "check_H6",
    "cone_check", "check_boundary_conditions", "verify_solution",
]

FUNCTIONALS = ("f0", "fsup0", "finf", "fsupinf")
_LIMIT_WORDS = {"zero": "zero", "finite": "finite", "inf": "infinite",
                "infinite": "infinite"}


@dataclass(frozen=True)
class LimitEstimate:
    """Sampled envelope of f(t,u)/u toward one of the four limits."""

    functional: str
    classification: str
    samples: tuple[tuple[float, float], ...]
    slope: float | None
    flagged: bool = False


@dataclass(frozen=True)
class HypothesisReport:
    """Verdict on one named condition with its certifying data."""

    condition: str
    verdict: str
    witness: str
    details: dict = field(default_factory=dict)

    def ok(self) -> bool:
        return self.verdict in ("holds", "holds (declared)")


def check_structural(problem: ProblemSpec) -> list[HypothesisReport]:
    """Exact checks of the coefficient conditions plus a sampled scan of f."""
    reports = []

    c2_issues = [v for v in problem.structural_violations()
                 if not v.startswith("alpha + sum")]
    if c2_issues:
        reports.append(HypothesisReport(
            "C2", "fails", "; ".join(c2_issues)))
    else:
        reports.append(HypothesisReport(
            "C2", "holds",
            f"alpha = {problem.alpha:g} >= 0, betas nonnegative, "
            f"etas strictly increasing inside (0, 1)"))

    total = problem.alpha + sum(problem.betas)
    if total < 1.0:
        k = 1.0 - total
        reports.append(HypothesisReport(
            "C3", "holds", f"alpha + sum(beta) = {total:.17g} < 1, k = {k:.17g}",
            details={"k": k}))
    else:
        reports.append(HypothesisReport(
            "C3", "fails", f"alpha + sum(beta) = {total:.17g} >= 1"))

    t_grid = np.linspace(0.0, 1.0, 101)
    u_grid = np.linspace(0.0, 100.0, 101)
    worst = None
    bad_eval = None
    for u_val in u_grid:
        try:
            vals = np.broadcast_to(
                np.asarray(evaluate(problem.f, t_grid, u_val), dtype=float),
                t_grid.shape)
        except (EvalDomainError, NonFiniteError) as exc:
            bad_eval = f"f not evaluable at u = {u_val:g}: {exc}"
            break
        j = int(np.argmin(vals))
        if worst is None or vals[j] < worst[0]:
            worst = (float(vals[j]), float(t_grid[j]), float(u_val))
    if bad_eval is not None:
        reports.append(HypothesisReport("C1", "advisory", bad_eval))
    elif worst[0] < -1e-12:
        reports.append(HypothesisReport(
            "C1", "fails",
            f"f({worst[1]:g}, {worst[2]:g}) = {worst[0]:g} < 0"))
    else:
        reports.append(HypothesisReport(
            "C1", "advisory",
            f"sampled min of f on [0,1]x[0,100] is {worst[0]:g} (101x101 grid); "
            "sampling cannot prove continuity or nonnegativity",
            details={"sampled_min": worst[0]}))
    return reports


def _envelope(problem, u_val, t_grid, take_max):
    """Envelope of f(t,u)/u over the t grid; nan/inf mark failed samples."""
    with np.errstate(all="ignore"):
        vals = np.asarray(_eval_node(problem.f, t_grid, float(u_val)),
                          dtype=float) / float(u_val)
    if np.any(np.isnan(vals)):
        return np.nan
    if np.any(np.isinf(vals)):
        return np.inf
    return float(np.max(vals) if take_max else np.min(vals))


def estimate_limit(problem: ProblemSpec, functional: str) -> LimitEstimate:
    """Sample the envelope of f(t,u)/u toward u -> 0 or u -> infinity."""
    if functional not in FUNCTIONALS:
        raise DomainError(
            f"functional must be one of {FUNCTIONALS}, got {functional!r}")
    at_zero = functional in ("f0", "fsup0")
    take_max = functional in ("fsup0", "fsupinf")
    exponents = range(-8, 0) if at_zero else range(0, 9)
    t_grid = np.linspace(0.0, 1.0, 101)
    u_samples = [10.0 ** j for j in exponents]
    env = np.array([_envelope(problem, u, t_grid, take_max) for u in u_samples])
    samples = tuple((float(u), float(e)) for u, e in zip(u_samples, env))
    valid = np.isfinite(env)
    flagged = bool(np.any(~valid))

    idx = np.flatnonzero(valid)
    if idx.size < 2:
        return LimitEstimate(functional, "inconclusive", samples, None, flagged)
    # Window: up to 4 valid samples nearest the limit, ordered toward it.
    idx_sorted = idx[np.argsort([abs(j) for j in np.asarray(exponents)[idx]])]
    window_idx = np.sort(idx_sorted[:4])
    if at_zero:
        window_idx = window_idx[::-1]
    window_u = np.array([u_samples[j] for j in window_idx])
    window_e = env[window_idx]

    slope = None
    if np.all(window_e > 0.0):
        slope = float(np.polyfit(np.log10(window_u), np.log10(window_e), 1)[0])

    e_far, e_ext = window_e[0], window_e[-1]
    diffs = np.diff(window_e)
    growing = bool(np.all(diffs >= 0.0))
    shrinking = bool(np.all(diffs <= 0.0))
    # Slope sign that means decay toward the limit (envelope ~ u^slope).
    decay_slope = slope is not None and (slope >= 0.05 if at_zero else slope <= -0.05)
    growth_slope = slope is not None and (slope <= -0.05 if at_zero else slope >= 0.05)

    if e_ext > 1e3 and growing:
        classification = "infinite"
    elif (e_ext < 1e-3 and shrinking) or (decay_slope and e_ext < e_far):
        classification = "zero"
    elif e_ext > 1e3 and growth_slope and e_ext > e_far:
        classification = "infinite"
    elif (slope is not None and abs(slope) < 0.05
          and np.max(window_e) < 1.1 * np.min(window_e)):
        classification = "finite"
    else:
        classification = "inconclusive"
    return LimitEstimate(functional, classification, samples, slope, flagged)


_HYPOTHESIS_NEEDS = {
    "H1": (("f0", "infinite"), ("fsupinf", "zero")),
    "H2": (("fsup0", "zero"), ("finf", "infinite")),
    "H3": (("f0", "infinite"), ("finf", "infinite")),
    "H5": (("fsup0", "zero"), ("fsupinf", "zero")),
}


def check_H1_H2_H3_H5(problem: ProblemSpec,
                      declared: dict | None = None) -> list[HypothesisReport]:
    """Verdicts for the growth hypotheses built from limit classifications.

    Entries of `declared` (functional -> "zero"|"finite"|"inf") are trusted
    and skip estimation; a verdict based on any declaration reads
    `holds (declared)`.
    """
    declared = declared or {}
    normalized = {}
    for key, word in declared.items():
        if key not in FUNCTIONALS:
            raise DomainError(f"unknown declared limit {key!r}")
        if word not in _LIMIT_WORDS:
            raise DomainError(f"unknown limit value {word!r} for {key}")
        normalized[key] = _LIMIT_WORDS[word]

    cache: dict[str, LimitEstimate] = {}

    def classify(functional):
        if functional in normalized:
            return normalized[functional], True, None
        if functional not in cache:
            cache[functional] = estimate_limit(problem, functional)
        est = cache[functional]
        return est.classification, False, est

    reports = []
    for name, needs in _HYPOTHESIS_NEEDS.items():
        got = []
        used_declared = False
        estimates = {}
        for functional, wanted in needs:
            cls, was_declared, est = classify(functional)
            used_declared |= was_declared
            got.append((functional, wanted, cls, was_declared))
            if est is not None:
                estimates[functional] = {
                    "classification": est.classification,
                    "slope": est.slope,
                    "flagged": est.flagged,
                }
        matches = [cls == wanted for _, wanted, cls, _ in got]
        definite_miss = [
            (functional, wanted, cls)
            for functional, wanted, cls, _ in got
            if cls != wanted and cls != "inconclusive"
        ]
        desc = ", ".join(
            f"{functional} = {cls}{' (declared)' if was_declared else ''}"
            for functional, _, cls, was_declared in got)
        if all(matches):
            verdict = "holds (declared)" if used_declared else "holds"
            reports.append(HypothesisReport(
                name, verdict, desc, details={"estimates": estimates}))
        elif definite_miss:
            functional, wanted, cls = definite_miss[0]
            reports.append(HypothesisReport(
                name, "fails",
                f"{functional} classified {cls}, needs {wanted} ({desc})",
                details={"estimates": estimates}))
        else:
            reports.append(HypothesisReport(
                name, "advisory",
                f"estimates inconclusive: {desc}",
                details={"estimates": estimates}))
    return reports


def check_H4(problem: ProblemSpec, theta: float, rho1: float,
             M1: float | None = None) -> HypothesisReport:
    """Sampled upper bound: f <= M1*rho1 on [0,1] x (0, rho1]."""
    if not rho1 > 0.0:
        raise DomainError("rho1 must be positive")
    lam1 = 6.0 * compute_k(problem)
    if M1 is None:
        M1 = lam1
    if not 0.0 < M1 <= lam1:
        return HypothesisReport(
            "H4", "advisory",
            f"M1 = {M1:g} outside the allowed range (0, Lambda1 = {lam1:.17g}]",
            details={"lambda1": lam1, "M1": M1, "rho1": rho1})
    t_grid = np.linspace(0.0, 1.0, 201)
    u_grid = rho1 * np.logspace(-8.0, 0.0, 201)
    sup_val, arg = -np.inf, (0.0, 0.0)
    for u_val in u_grid:
        vals = np.broadcast_to(
            np.asarray(evaluate(problem.f, t_grid, float(u_val)), dtype=float),
            t_grid.shape)
        j = int(np.argmax(vals))
        if vals[j] > sup_val:
            sup_val, arg = float(vals[j]), (float(t_grid[j]), float(u_val))
    bound = M1 * rho1
    details = {"sampled_sup": sup_val, "bound": bound, "M1": M1,
               "rho1": rho1, "lambda1": lam1, "theta": theta,
               "argmax": arg, "grid": [201, 201]}
    if sup_val <= bound:
        return HypothesisReport(
            "H4", "holds",
            f"sampled sup f = {sup_val:.10g} <= M1*rho1 = {bound:.10g} "
            f"on [0,1] x (0, {rho1:g}]",
            details=details)
    return HypothesisReport(
        "H4", "fails",
        f"f({arg[0]:g}, {arg[1]:g}) = {sup_val:.10g} > M1*rho1 = {bound:.10g}",
        details=details)


def check_H6(problem: ProblemSpec, theta: float, rho2: float,
             M2: float | None = None) -> HypothesisReport:
    """Sampled lower bound: f >= M2*rho2 on [theta,1-theta] x [c*rho2, rho2]."""
    if not rho2 > 0.0:
        raise DomainError("rho2 must be positive")
    lam2 = 1.0 / psi_constant(problem, theta)
    if M2 is None:
        M2 = lam2
    if M2 < lam2 * (1.0 - 1e-12):
        return HypothesisReport(
            "H6", "advisory",
            f"M2 = {M2:g} below Lambda2 = {lam2:.10g}; "
            "this condition certifies nothing unless M2 >= Lambda2",
            details={"lambda2": lam2, "M2": M2, "rho2": rho2, "theta": theta})
    c = theta**3 * (1.0 - 2.0 * theta)
    t_grid = np.linspace(theta, 1.0 - theta, 201)
    u_grid = np.linspace(c * rho2, rho2, 201)
    inf_val, arg = np.inf, (0.0, 0.0)
    for u_val in u_grid:
        vals = np.broadcast_to(
            np.asarray(evaluate(problem.f, t_grid, float(u_val)), dtype=float),
            t_grid.shape)
        j = int(np.argmin(vals))
        if vals[j] < inf_val:
            inf_val, arg = float(vals[j]), (float(t_grid[j]), float(u_val))
    bound = M2 * rho2
    details = {"sampled_inf": inf_val, "bound": bound, "M2": M2,
               "rho2": rho2, "lambda2": lam2, "theta": theta,
               "argmin": arg, "grid": [201, 201]}
    if inf_val >= bound:
        return HypothesisReport(
            "H6", "holds",
            f"sampled inf f = {inf_val:.10g} >= M2*rho2 = {bound:.10g} on "
            f"[{theta:g}, {1 - theta:g}] x [{c * rho2:.10g}, {rho2:g}]",
            details=details)
    return HypothesisReport(
        "H6", "fails",
        f"f({arg[0]:g}, {arg[1]:g}) = {inf_val:.10g} < M2*rho2 = {bound:.10g}",
        details=details)


def cone_check(u: GridFunction, theta: float = DEFAULT_THETA) -> HypothesisReport:
    """Membership test for the cone of functions concentrated on [theta, 1-theta]."""
    if not 0.0 < theta < 0.5:
        raise DomainError(f"theta must lie in (0, 1/2), got {theta}")
    sup = u.sup_norm()
    inside = (u.grid >= theta) & (u.grid <= 1.0 - theta)
    candidates = [float(np.min(u.values[inside]))] if np.any(inside) else []
    candidates.append(u(theta))
    candidates.append(u(1.0 - theta))
    min_val = min(candidates)
    bound = theta**3 * (1.0 - 2.0 * theta) * sup
    details = {"min_on_window": min_val, "bound": bound, "sup": sup,
               "theta": theta}
    if min_val >= bound - 1e-9:
        return HypothesisReport(
            "cone", "holds",
            f"min on [{theta:g}, {1 - theta:g}] = {min_val:.10g} >= "
            f"theta^3(1-2theta)*sup = {bound:.10g} - 1e-9",
            details=details)
    return HypothesisReport(
        "cone", "fails",
        f"min on [{theta:g}, {1 - theta:g}] = {min_val:.10g} < {bound:.10g}",
        details=details)


def check_boundary_conditions(u: GridFunction, problem: ProblemSpec) -> dict:
    """Residuals of the four boundary conditions on a grid function."""
    vals = u.values
    h = u.h
    du0 = deriv1_left(vals, h)
    du1 = deriv1_right(vals, h)
    d2u0 = deriv2_left(vals, h)
    total = problem.alpha * float(simpson(vals, x=u.grid))
    for beta_i, eta_i in zip(problem.betas, problem.etas):
        total += beta_i * u(eta_i)
    return {
        "deriv1_at_0": du0,
        "deriv1_at_1": du1,
        "deriv2_at_0": d2u0,
        "nonlocal_gap": float(vals[0] - total),
    }


def verify_solution(u: GridFunction, problem: ProblemSpec) -> HypothesisReport:
    """End-to-end verification of a candidate solution grid function.

    The primary signal is the fixed-point residual ||u - Tu||, backed by the
    boundary-condition residuals; an interior 4th-difference check of the
    differential equation corroborates with a noise- and curvature-aware
    allowance (4th differences amplify rounding by h^-4, and their truncation
    carries h^2 times the 6th derivative, estimated from differences of f).
    """
    n = u.n
    h = u.h
    Tu = apply_T(u, problem)
    resid_fp = float(np.max(np.abs(u.values - Tu.values)))

    bc = check_boundary_conditions(u, problem)
    bc_ok = (abs(bc["deriv1_at_0"]) < 1e-6 and abs(bc["deriv1_at_1"]) < 1e-6
             and abs(bc["deriv2_at_0"]) < 1e-6)
    nonlocal_ok = abs(bc["nonlocal_gap"]) < 1e-8
    fp_ok = resid_fp < 1e-8

    psi = np.broadcast_to(
        np.asarray(evaluate(problem.f, u.grid, np.maximum(u.values, 0.0)),
                   dtype=float), u.grid.shape)
    vals = u.values
    fd4 = (vals[:-4] - 4.0 * vals[1:-3] + 6.0 * vals[2:-2]
           - 4.0 * vals[3:-1] + vals[4:]) / h**4
    ode_resid = np.abs(fd4 + psi[2:-2])
    fd2_psi = np.abs(psi[:-4] - 2.0 * psi[2:-2] + psi[4:]) / (2.0 * h) ** 2
    eps = float(np.finfo(float).eps)
    noise_floor = 100.0 * (n - 1) ** 4 * (eps / 4.0) * max(1.0, u.sup_norm())
    allowance = noise_floor + 0.5 * h**2 * fd2_psi
    interior = slice(2, n - 6)
    ode_ok = bool(np.all(ode_resid[interior] <= np.maximum(allowance[interior],
                                                           noise_floor)))
    ode_max_ratio = float(np.max(
        ode_resid[interior] / np.maximum(allowance[interior], noise_floor)))

    details = {
        "fixed_point_resid": resid_fp,
        "boundary": bc,
        "ode_check_ok": ode_ok,
        "ode_max_ratio": ode_max_ratio,
        "ode_noise_floor": noise_floor,
        "grid_n": n,
    }
    ok = fp_ok and bc_ok and nonlocal_ok
    verdict = "holds" if ok else "fails"
    pieces = [
        f"||u - Tu|| = {resid_fp:.3g} ({'ok' if fp_ok else 'FAIL'} < 1e-8)",
        f"boundary resids ({bc['deriv1_at_0']:.2g}, {bc['deriv1_at_1']:.2g}, "
        f"{bc['deriv2_at_0']:.2g}) ({'ok' if bc_ok else 'FAIL'} < 1e-6)",
        f"nonlocal gap = {bc['nonlocal_gap']:.3g} "
        f"({'ok' if nonlocal_ok else 'FAIL'} < 1e-8)",
        f"interior 4th-difference corroboration "
        f"{'ok' if ode_ok else 'exceeded allowance'}",
    ]
    return HypothesisReport("solution", verdict, "; ".join(pieces), details)
