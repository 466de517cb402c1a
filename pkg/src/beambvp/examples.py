"""Bundled example problems and the acceptance/regression engine.

The four bundled cases exercise every code path: a sublinear forcing with
a unique solution, a superlinear one where direct iteration blows up, a
two-solution exponential case, and a badly scaled quadratic case whose
second solution is too small to distinguish from zero.  `run_criteria`
re-derives the frozen reference numbers and cross-checks the independent
solution paths; it backs both `beambvp examples` and the regression
suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .config import ProblemConfig, load_config
from .errors import BeamBVPError
from .expr import evaluate, parse
from .grid import GridFunction
from .hammerstein import (
    SolveResult,
    SolveSettings,
    assemble_operator_matrix,
    find_positive_solutions,
    picard_solve,
    refine_solution,
)
from .hypotheses import (
    check_boundary_conditions,
    check_H1_H2_H3_H5,
    check_H4,
    check_H6,
    verify_solution,
)
from .kernel import (
    ProblemSpec,
    compute_k,
    constants_report,
    e_bound,
    green_G,
    psi_constant,
    rho_bound,
)
from .quadrature import QuadratureRule, integrate
from .shooting import integrate_ivp, scan_and_refine, solution_from_root

__all__ = [
    "EXAMPLE_TAGS", "ExampleCase", "EXAMPLES", "fixture_path", "load_example",
    "AcceptanceEngine", "CriterionResult", "run_criteria", "CRITERIA",
]

VERIFY_GRID_N = 1601


@dataclass(frozen=True)
class ExampleCase:
    """One bundled problem: its fixture file plus scan hints and references."""

    tag: str
    fixture: str
    k_exact: float
    scan_a: tuple[float, float] | None = None
    scan_b: tuple[float, float] | None = None
    scan_cells: int = 40


EXAMPLES = {
    "5.1": ExampleCase("5.1", "ex51.json", 5.0 / 21.0,
                       scan_a=(0.0, 2.0), scan_b=(-2.0, 2.0), scan_cells=40),
    "5.2": ExampleCase("5.2", "ex52.json", 0.5),
    "5.3": ExampleCase("5.3", "ex53.json", 15.0 / 16.0,
                       scan_a=(0.0, 1.0), scan_b=(0.0, 100.0), scan_cells=80),
    "5.4": ExampleCase("5.4", "ex54.json", 17.0 / 20.0,
                       scan_a=(0.0, 60.0), scan_b=(0.0, 120000.0),
                       scan_cells=80),
}
EXAMPLE_TAGS = tuple(sorted(EXAMPLES))


def fixture_path(name: str) -> str:
    """Absolute path of a bundled fixture config."""
    return str(resources.files("beambvp") / "fixtures" / name)


def load_example(tag: str) -> ProblemConfig:
    return load_config(fixture_path(EXAMPLES[tag].fixture))


class AcceptanceEngine:
    """Caches the expensive solves shared by several criteria."""

    def __init__(self, verbose: bool = False):
        self.verbose = verbose
        self._configs: dict[str, ProblemConfig] = {}
        self._solutions: dict[str, list[SolveResult]] = {}
        self._refined: dict[str, list[SolveResult]] = {}
        self._roots: dict[str, list[tuple[float, float]]] = {}

    def _log(self, message: str) -> None:
        if self.verbose:
            print(f"    [engine] {message}", flush=True)

    def config(self, tag: str) -> ProblemConfig:
        if tag not in self._configs:
            self._configs[tag] = load_example(tag)
        return self._configs[tag]

    def problem(self, tag: str) -> ProblemSpec:
        return self.config(tag).problem

    def solutions(self, tag: str) -> list[SolveResult]:
        if tag not in self._solutions:
            cfg = self.config(tag)
            self._log(f"multistart solve on example {tag}")
            self._solutions[tag] = find_positive_solutions(cfg.problem,
                                                           cfg.solver)
        return self._solutions[tag]

    def refined(self, tag: str) -> list[SolveResult]:
        if tag not in self._refined:
            cfg = self.config(tag)
            self._log(f"refining example {tag} solutions to n = {VERIFY_GRID_N}")
            self._refined[tag] = [
                refine_solution(cfg.problem, sol, VERIFY_GRID_N, cfg.solver)
                for sol in self.solutions(tag)
            ]
        return self._refined[tag]

    def scan_roots(self, tag: str) -> list[tuple[float, float]]:
        if tag not in self._roots:
            case = EXAMPLES[tag]
            if case.scan_a is None:
                raise BeamBVPError(f"example {tag} has no scan window")
            self._log(f"shooting scan on example {tag}")
            self._roots[tag] = scan_and_refine(
                self.problem(tag), case.scan_a, case.scan_b,
                cells=case.scan_cells)
        return self._roots[tag]


@dataclass(frozen=True)
class CriterionResult:
    cid: int
    name: str
    passed: bool
    detail: str


def _c1_constants(eng: AcceptanceEngine) -> tuple[bool, str]:
    worst = 0.0
    for tag in EXAMPLE_TAGS:
        dev = abs(compute_k(eng.problem(tag)) - EXAMPLES[tag].k_exact)
        worst = max(worst, dev)
    if worst > 1e-15:
        return False, f"k deviates by {worst:.3g} > 1e-15"
    rep = constants_report(eng.problem("5.3"), eng.config("5.3").theta)
    lam_dev = abs(rep.lambda1 - 5.625)
    if lam_dev > 1e-12:
        return False, f"lambda1(5.3) deviates by {lam_dev:.3g} > 1e-12"
    return True, (f"max |k - exact| = {worst:.3g} over 4 examples; "
                  f"|lambda1(5.3) - 5.625| = {lam_dev:.3g}")


def _psi_closed_form_54(theta: float) -> float:
    poly = 103.0 + 206.0 * theta - 212.0 * theta**2 + 8.0 * theta**3
    return theta**6 * (1.0 - 2.0 * theta) ** 3 * poly / 6528.0


def _c2_psi_closed_form(eng: AcceptanceEngine) -> tuple[bool, str]:
    problem = eng.problem("5.4")
    worst = 0.0
    for theta in (0.15, 0.2, 0.25, 0.3, 0.4, 0.45):
        closed = _psi_closed_form_54(theta)
        rel = abs(psi_constant(problem, theta) - closed) / closed
        worst = max(worst, rel)
    passed = worst <= 1e-10
    return passed, f"max relative error vs closed form = {worst:.3g}"


def _c3_inequality(eng: AcceptanceEngine) -> tuple[bool, str]:
    theta = np.linspace(17.0 / 125.0, 12.0 / 25.0, 1000)
    poly = 103.0 + 206.0 * theta - 212.0 * theta**2 + 8.0 * theta**3
    vals = 1e9 * theta**12 * (1.0 - 2.0 * theta) ** 5 * poly
    low = float(np.min(vals))
    return bool(low >= 1.0), f"min over 1000 samples = {low:.6g} (needs >= 1)"


def _c4_kernel_bounds(eng: AcceptanceEngine) -> tuple[bool, str]:
    grid = np.linspace(0.0, 1.0, 200)
    T, S = np.meshgrid(grid, grid, indexing="ij")
    G = green_G(T, S)
    E = e_bound(S)
    slack = 1e-14
    checks = {
        "nonnegative": float(np.min(G)),
        "G <= e(s)": float(np.min(E - G)),
        "G >= rho(t) e(s)": float(np.min(G - rho_bound(T) * E)),
    }
    for theta in (0.1, 0.25, 0.4):
        rows = (grid >= theta) & (grid <= 1.0 - theta)
        checks[f"G >= theta^3 e(s) on [{theta}, {1 - theta}]"] = float(
            np.min(G[rows, :] - theta**3 * E[rows, :]))
    worst_name = min(checks, key=checks.get)
    worst = checks[worst_name]
    return bool(worst >= -slack), f"tightest margin {worst:.3g} ({worst_name})"


def _analytic_unit_load(problem: ProblemSpec, t: np.ndarray) -> np.ndarray:
    k = compute_k(problem)
    c4 = problem.alpha / 180.0
    for b, h in zip(problem.betas, problem.etas):
        c4 += b * (h**3 / 18.0 - h**4 / 24.0)
    c4 /= k
    return -(t**4) / 24.0 + t**3 / 18.0 + c4


def _c5_linear_oracle(eng: AcceptanceEngine) -> tuple[bool, str]:
    n = 401
    worst_sup = 0.0
    worst_bc = 0.0
    rng = np.random.default_rng(20260817)
    cubics = rng.uniform(0.0, 2.0, size=(20, 4))
    for tag in EXAMPLE_TAGS:
        problem = eng.problem(tag)
        M = assemble_operator_matrix(problem, n)
        t = np.linspace(0.0, 1.0, n)
        u_quad = M @ np.ones(n)
        dev = float(np.max(np.abs(u_quad - _analytic_unit_load(problem, t))))
        worst_sup = max(worst_sup, dev)
        for coeffs in cubics:
            y = coeffs[0] + coeffs[1] * t + coeffs[2] * t**2 + coeffs[3] * t**3
            gf = GridFunction(M @ y)
            bc = check_boundary_conditions(gf, problem)
            worst_bc = max(worst_bc, max(abs(v) for v in bc.values()))
    passed = worst_sup <= 1e-9 and worst_bc <= 1e-8
    return passed, (f"unit-load sup error {worst_sup:.3g} (<= 1e-9); "
                    f"worst cubic boundary residual {worst_bc:.3g} (<= 1e-8)")


def _c6_cone_invariance(eng: AcceptanceEngine) -> tuple[bool, str]:
    n = 401
    rng = np.random.default_rng(7)
    draws = rng.uniform(0.0, 5.0, size=(50, n))
    t = np.linspace(0.0, 1.0, n)
    worst = np.inf
    for tag in EXAMPLE_TAGS:
        problem = eng.problem(tag)
        M = assemble_operator_matrix(problem, n)
        for row in draws:
            y = np.broadcast_to(
                np.asarray(evaluate(problem.f, t, row), dtype=float), t.shape)
            gf = GridFunction(M @ y)
            sup = gf.sup_norm()
            for theta in (0.1, 0.25, 0.4):
                inside = (t >= theta) & (t <= 1.0 - theta)
                low = min(float(np.min(gf.values[inside])),
                          gf(theta), gf(1.0 - theta))
                worst = min(worst, low - theta**3 * (1.0 - 2.0 * theta) * sup)
    return bool(worst >= -1e-10), f"tightest cone margin {worst:.3g} (>= -1e-10)"


def _c7_hypotheses(eng: AcceptanceEngine) -> tuple[bool, str]:
    bits = []
    ok = True
    targets = {"5.1": "H1", "5.2": "H2", "5.3": "H3", "5.4": "H5"}
    for tag, cond in targets.items():
        reports = {r.condition: r for r in check_H1_H2_H3_H5(eng.problem(tag))}
        verdict = reports[cond].verdict
        ok &= verdict == "holds"
        bits.append(f"{cond}@{tag}={verdict}")
    r4 = check_H4(eng.problem("5.3"), eng.config("5.3").theta, 1.0, 5.625)
    sup = r4.details.get("sampled_sup", float("nan"))
    sup_ok = abs(sup - 2.0 * math.e) <= 1e-9
    ok &= r4.verdict == "holds" and sup_ok
    bits.append(f"H4@5.3={r4.verdict} (sampled sup {sup:.6f}, 2e = {2 * math.e:.6f})")
    r6 = check_H6(eng.problem("5.4"), 0.25, 1.0)
    ok &= r6.verdict == "holds"
    bits.append(f"H6@5.4={r6.verdict}")
    return ok, "; ".join(bits)


def _c8_existence_cross_validation(eng: AcceptanceEngine) -> tuple[bool, str]:
    problem = eng.problem("5.1")
    pic = picard_solve(problem, SolveSettings(method="picard"), u0=0.0)
    if pic.residual >= 1e-10:
        return False, f"Picard residual {pic.residual:.3g} >= 1e-10"
    roots = eng.scan_roots("5.1")
    if len(roots) != 1:
        return False, f"shooting scan found {len(roots)} roots, expected 1"
    shot = solution_from_root(problem, *roots[0])
    gap = abs(shot.sup_norm() - pic.sup_norm())
    passed = gap <= 1e-6
    return passed, (f"Picard residual {pic.residual:.3g}, sup {pic.sup_norm():.9g}; "
                    f"shooting sup {shot.sup_norm():.9g}; |gap| = {gap:.3g} (<= 1e-6)")


def _straddle(sups) -> bool:
    return len(sups) >= 2 and sups[0] < 1.0 < sups[-1]


def _c9_multiplicity(eng: AcceptanceEngine) -> tuple[bool, str]:
    bits = []
    ny = sorted(s.sup_norm() for s in eng.refined("5.3"))
    roots = eng.scan_roots("5.3")
    sh = sorted(solution_from_root(eng.problem("5.3"), a, b).sup_norm()
                for a, b in roots)
    ok = _straddle(ny) and _straddle(sh)
    ok &= all(b - a > 0.1 for a, b in zip(ny[:-1], ny[1:]))
    ok &= all(b - a > 0.1 for a, b in zip(sh[:-1], sh[1:]))
    agree = (max(abs(a - b) for a, b in zip(ny, sh))
             if len(ny) == len(sh) else float("inf"))
    ok &= agree < 1e-4
    bits.append(f"5.3: Newton sups {[f'{v:.6g}' for v in ny]}, "
                f"shooting sups {[f'{v:.6g}' for v in sh]}, "
                f"agreement {agree:.3g} (< 1e-4)")
    big = [s for s in eng.refined("5.4") if s.sup_norm() > 1.0]
    if not big:
        return False, bits[0] + "; 5.4: no large solution found"
    rep = verify_solution(big[0].u, eng.problem("5.4"))
    ok &= rep.verdict == "holds"
    bits.append(f"5.4: large solution sup {big[0].sup_norm():.6g} verified "
                f"({rep.verdict}); small solution sits below the positivity "
                f"floor and is reported as numerically indistinguishable from zero")
    return ok, "; ".join(bits)


def _c10_verification(eng: AcceptanceEngine) -> tuple[bool, str]:
    worst = {"fp": 0.0, "bc": 0.0, "nl": 0.0}
    count = 0
    for tag in EXAMPLE_TAGS:
        problem = eng.problem(tag)
        for sol in eng.refined(tag):
            rep = verify_solution(sol.u, problem)
            if rep.verdict != "holds":
                return False, f"solution on {tag} failed: {rep.witness}"
            bc = rep.details["boundary"]
            worst["fp"] = max(worst["fp"], rep.details["fixed_point_resid"])
            worst["bc"] = max(worst["bc"], abs(bc["deriv1_at_0"]),
                              abs(bc["deriv1_at_1"]), abs(bc["deriv2_at_0"]))
            worst["nl"] = max(worst["nl"], abs(bc["nonlocal_gap"]))
            count += 1
    passed = (count >= 5 and worst["fp"] < 1e-8 and worst["bc"] < 1e-6
              and worst["nl"] < 1e-8)
    return passed, (f"{count} solutions: worst ||u - Tu|| = {worst['fp']:.3g} "
                    f"(< 1e-8), worst boundary = {worst['bc']:.3g} (< 1e-6), "
                    f"worst nonlocal = {worst['nl']:.3g} (< 1e-8)")


def _c11_convergence_orders(eng: AcceptanceEngine) -> tuple[bool, str]:
    # RK4 order on a forcing with a closed-form trajectory.
    manufactured = ProblemSpec(parse("exp(t)"), 0.1, (0.05,), (0.5,))
    a0, b0 = 0.3, 0.7
    exact = a0 + (b0 + 1.0) / 6.0 + 0.5 - (math.e - 2.0)
    errs = [abs(integrate_ivp(manufactured, a0, b0, steps).u[-1] - exact)
            for steps in (50, 100, 200)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    rk4_ok = all(3.8 <= p <= 4.2 for p in orders)

    # Grid-doubling error decay for the integral-equation path on 5.1.
    problem = eng.problem("5.1")
    profiles = {}
    for n in (101, 201, 801):
        res = picard_solve(problem, SolveSettings(method="picard", grid_n=n),
                           u0=0.0)
        profiles[n] = res.u.values
    truth = profiles[801]
    e101 = float(np.max(np.abs(profiles[101] - truth[::8])))
    e201 = float(np.max(np.abs(profiles[201] - truth[::4])))
    ratio = e101 / max(e201, 1e-15)
    nystrom_ok = ratio >= 6.0

    # Quadrature exactness spot checks.
    gauss = integrate(lambda s: s**7, 0.0, 1.0,
                      QuadratureRule(kind="gauss4", panels=2))
    simp = integrate(lambda s: s**3, 0.0, 1.0,
                     QuadratureRule(kind="simpson", panels=4))
    quad_ok = abs(gauss - 0.125) <= 1e-15 and abs(simp - 0.25) <= 1e-15

    passed = rk4_ok and nystrom_ok and quad_ok
    return passed, (f"RK4 orders {orders[0]:.3f}, {orders[1]:.3f} (in [3.8, 4.2]); "
                    f"Nystrom doubling ratio {ratio:.3g} (>= 6); "
                    f"Gauss/Simpson exactness errors {abs(gauss - 0.125):.1e}, "
                    f"{abs(simp - 0.25):.1e}")


CRITERIA = (
    (1, "constants vs references", ("5.1", "5.2", "5.3", "5.4"), _c1_constants),
    (2, "Psi closed form (badly scaled case)", ("5.4",), _c2_psi_closed_form),
    (3, "window inequality", ("5.4",), _c3_inequality),
    (4, "kernel bound lemmas", (), _c4_kernel_bounds),
    (5, "linear solve oracle", ("5.1", "5.2", "5.3", "5.4"), _c5_linear_oracle),
    (6, "cone invariance of T", ("5.1", "5.2", "5.3", "5.4"), _c6_cone_invariance),
    (7, "growth hypothesis reproduction", ("5.1", "5.2", "5.3", "5.4"),
     _c7_hypotheses),
    (8, "existence cross-validated", ("5.1",), _c8_existence_cross_validation),
    (9, "multiplicity at desk scale", ("5.3", "5.4"), _c9_multiplicity),
    (10, "solution verification harness", ("5.1", "5.2", "5.3", "5.4"),
     _c10_verification),
    (11, "convergence orders", ("5.1",), _c11_convergence_orders),
)


def run_criteria(only: str | None = None,
                 engine: AcceptanceEngine | None = None) -> list[CriterionResult]:
    """Run the acceptance criteria, optionally only those touching one example."""
    if only is not None and only not in EXAMPLES:
        raise BeamBVPError(
            f"unknown example {only!r}; expected one of {EXAMPLE_TAGS}")
    eng = engine if engine is not None else AcceptanceEngine()
    results = []
    for cid, name, tags, func in CRITERIA:
        if only is not None and only not in tags:
            continue
        try:
            passed, detail = func(eng)
        except BeamBVPError as exc:
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CriterionResult(cid, name, passed, detail))
    return results
