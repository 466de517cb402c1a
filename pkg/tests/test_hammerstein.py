import numpy as np
import pytest

from beambvp.errors import DivergenceError, DomainError, NoConvergenceError
from beambvp.expr import evaluate, parse
from beambvp.grid import GridFunction
from beambvp.hammerstein import (
    SolveSettings,
    apply_T,
    assemble_operator_matrix,
    find_positive_solutions,
    newton_solve,
    picard_solve,
    refine_solution,
)
from beambvp.kernel import ProblemSpec
from oracles import SUP_51, SUP_53_LARGE, SUP_53_SMALL, analytic_unit_load


def test_assemble_validation(p51):
    with pytest.raises(DomainError):
        assemble_operator_matrix(p51, 10)
    with pytest.raises(DomainError):
        assemble_operator_matrix(p51, 9)


def test_assembled_matrix_is_cached_and_frozen(p51):
    a = assemble_operator_matrix(p51, 101)
    b = assemble_operator_matrix(p51, 101)
    assert a is b
    assert not a.flags.writeable


@pytest.mark.parametrize("tag", ["51", "52", "53", "54"])
def test_unit_forcing_reproduces_analytic_solution(tag, request):
    problem = request.getfixturevalue("p" + tag)
    n = 201
    M = assemble_operator_matrix(problem, n)
    t = np.linspace(0.0, 1.0, n)
    got = M @ np.ones(n)
    assert np.max(np.abs(got - analytic_unit_load(problem, t))) < 1e-12


def test_apply_T_matches_matrix_product(p51):
    n = 101
    t = np.linspace(0.0, 1.0, n)
    u = GridFunction(t**2)
    M = assemble_operator_matrix(p51, n)
    manual = M @ np.asarray(evaluate(p51.f, t, t**2))
    assert np.array_equal(apply_T(u, p51).values, manual)


def test_picard_on_monotone_problem(p51):
    res = picard_solve(p51)
    assert res.method == "picard"
    assert res.residual < 1e-10
    assert res.iterations < 50
    assert res.sup_norm() == pytest.approx(SUP_51, abs=1e-8)
    assert res.u.min_value() >= 0.0


def test_newton_finds_both_solutions_of_superlinear_problem(p53):
    large = newton_solve(p53, u0=6.0)
    assert large.sup_norm() == pytest.approx(SUP_53_LARGE, abs=1e-4)
    small = newton_solve(p53, u0=0.5)
    assert small.sup_norm() == pytest.approx(SUP_53_SMALL, abs=1e-6)
    assert small.residual <= 1e-10 and large.residual <= 1e-10


def test_picard_divergence_guard():
    problem = ProblemSpec(parse("1000000 * u"), 0.1, (0.05,), (0.5,))
    with pytest.raises(DivergenceError):
        picard_solve(problem, SolveSettings(method="picard", max_iter=100), u0=1.0)


def test_picard_collapses_to_zero_from_far_seed(p54):
    # The steep problem contracts everything below its small solution onto
    # the trivial fixed point; from a moderate constant the iterate lands
    # exactly on zero once the forcing underflows.
    res = picard_solve(p54, SolveSettings(method="picard"), u0=5.0)
    assert res.sup_norm() == 0.0
    assert res.residual == 0.0


def test_no_convergence_reports_progress(p51):
    with pytest.raises(NoConvergenceError) as info:
        picard_solve(p51, SolveSettings(method="picard", max_iter=1))
    assert info.value.iterations == 1
    assert info.value.residual > 0.0


def test_multistart_finds_straddling_pair(p53, cfg53):
    found = find_positive_solutions(p53, cfg53.solver)
    assert len(found) == 2
    sups = [r.sup_norm() for r in found]
    assert sups == sorted(sups)
    assert sups[0] < 1.0 < sups[1]
    assert sups[1] - sups[0] > 0.1
    assert all(r.seed is not None for r in found)
    assert all(r.u.min_value() >= -1e-9 for r in found)


def test_refine_keeps_solution_and_seed(p53, cfg53):
    small = find_positive_solutions(p53, cfg53.solver)[0]
    fine = refine_solution(p53, small, 801)
    assert fine.u.n == 801
    assert fine.residual <= 1e-10
    assert fine.seed == small.seed
    assert fine.sup_norm() == pytest.approx(small.sup_norm(), abs=1e-6)


def test_solver_settings_validation():
    for kwargs in (
        dict(grid_n=100),
        dict(grid_n=9),
        dict(tol=0.0),
        dict(max_iter=0),
        dict(damping=0.0),
        dict(damping=1.5),
        dict(method="broyden"),
        dict(seeds=()),
        dict(seeds=(1.0, -2.0)),
    ):
        with pytest.raises(DomainError):
            SolveSettings(**kwargs)


def test_initial_iterate_shape_checks(p51):
    with pytest.raises(DomainError):
        picard_solve(p51, u0=np.zeros(7))
    with pytest.raises(DomainError):
        coarse = GridFunction(np.zeros(11))
        newton_solve(p51, u0=coarse)
