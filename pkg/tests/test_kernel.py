import numpy as np
import pytest

from beambvp.errors import DomainError, StructuralError
from beambvp.expr import parse
from beambvp.kernel import (
    DEFAULT_THETA,
    ProblemSpec,
    compute_k,
    constants_report,
    e_bound,
    green_G,
    green_H,
    integral_G_over_t,
    psi_constant,
    rho_bound,
)
from beambvp.quadrature import QuadratureRule, integrate
from oracles import (
    G_ROW_INTEGRAL_037,
    H_54_AT_1_HALF,
    K_EXACT,
    LAMBDA2_54_QUARTER,
    PSI_54,
    closed_form_psi_54,
)


@pytest.mark.parametrize("tag", sorted(K_EXACT))
def test_k_exact(tag, request):
    problem = request.getfixturevalue("p" + tag.replace(".", ""))
    assert abs(compute_k(problem) - K_EXACT[tag]) <= 1e-15


def test_k_must_be_positive():
    bad = ProblemSpec(parse("u"), 0.5, (0.3, 0.3), (0.2, 0.8))
    with pytest.raises(StructuralError):
        compute_k(bad)


def test_spec_shape_validation():
    with pytest.raises(StructuralError):
        ProblemSpec(parse("u"), 0.1, (0.1, 0.2), (0.5,))
    with pytest.raises(StructuralError):
        ProblemSpec(parse("u"), float("nan"), (), ())


def test_structural_violation_messages():
    spec = ProblemSpec(parse("u"), -0.2, (0.4, 0.9), (0.9, 0.1))
    msgs = spec.structural_violations()
    assert any("alpha" in m and "negative" in m for m in msgs)
    assert any("not strictly increasing" in m for m in msgs)
    assert any("must be < 1" in m for m in msgs)
    with pytest.raises(StructuralError):
        spec.validate()
    assert ProblemSpec(parse("u"), 0.1, (0.2,), (0.5,)).structural_violations() == []


def test_G_vanishes_on_boundary_rows():
    s = np.linspace(0.0, 1.0, 41)
    assert np.max(np.abs(green_G(0.0, s))) == 0.0
    t = np.linspace(0.0, 1.0, 41)
    assert np.max(np.abs(green_G(t, 1.0))) == 0.0


def test_G_branches_agree_on_diagonal():
    for t in (0.1, 0.37, 0.5, 0.93):
        upper = t**3 * (1.0 - t) ** 2 / 6.0
        lower = upper - (t - t) ** 3 / 6.0
        assert green_G(t, t) == upper == lower
    # continuity across the diagonal
    eps = 1e-9
    for t in (0.3, 0.6):
        assert abs(green_G(t, t - eps) - green_G(t, t + eps)) < 1e-8


def test_G_envelope_bounds():
    t = np.linspace(0.0, 1.0, 201)
    s = np.linspace(0.0, 1.0, 201)
    T, S = np.meshgrid(t, s, indexing="ij")
    G = green_G(T, S)
    assert np.all(G >= -1e-14)
    assert np.all(G <= e_bound(S) + 1e-14)
    assert np.all(G >= rho_bound(T) * e_bound(S) - 1e-14)
    rng = np.random.default_rng(5)
    tr = rng.uniform(0.0, 1.0, 500)
    sr = rng.uniform(0.0, 1.0, 500)
    Gr = green_G(tr, sr)
    assert np.all(Gr <= e_bound(sr) + 1e-14)
    assert np.all(Gr >= rho_bound(tr) * e_bound(sr) - 1e-14)


def test_rho_is_min_of_cubic_and_quadratic():
    assert rho_bound(0.5) == pytest.approx(0.125, abs=1e-16)
    t = np.linspace(0.0, 1.0, 101)
    assert np.allclose(rho_bound(t), np.minimum(t**3, t**2 * (1 - t)), atol=0)


@pytest.mark.parametrize("s", [0.12, 0.37, 0.5, 0.88])
def test_column_integral_closed_form_vs_quadrature(s):
    rule = QuadratureRule(kind="gauss4", panels=16, seams=(s,))
    via_quad = integrate(lambda tau: green_G(tau, s), 0.0, 1.0, rule)
    assert via_quad == pytest.approx(integral_G_over_t(s), abs=1e-15)


def test_row_integral_frozen_value():
    t = 0.37
    rule = QuadratureRule(kind="gauss4", panels=16, seams=(t,))
    via_quad = integrate(lambda s: green_G(t, s), 0.0, 1.0, rule)
    assert via_quad == pytest.approx(G_ROW_INTEGRAL_037, abs=1e-16)
    assert via_quad == pytest.approx(t**3 / 18.0 - t**4 / 24.0, abs=1e-16)


def test_H_exact_rational_value(p54):
    assert green_H(1.0, 0.5, p54) == pytest.approx(H_54_AT_1_HALF, abs=1e-16)


def test_H_correction_is_t_independent(p51):
    t = np.linspace(0.0, 1.0, 31)
    for s in (0.2, 0.5, 0.9):
        gap = green_H(t, s, p51) - green_G(t, s)
        assert np.ptp(gap) < 1e-16
        assert np.all(gap > 0.0)


@pytest.mark.parametrize("theta", sorted(PSI_54))
def test_psi_matches_frozen_and_closed_form(p54, theta):
    psi = psi_constant(p54, theta)
    assert psi == pytest.approx(PSI_54[theta], rel=1e-12)
    assert psi == pytest.approx(closed_form_psi_54(theta), rel=1e-10)


@pytest.mark.parametrize("theta", [0.0, 0.5, 0.7, -0.1])
def test_theta_validation(p54, theta):
    with pytest.raises(DomainError):
        psi_constant(p54, theta)
    with pytest.raises(DomainError):
        constants_report(p54, theta)


def test_constants_report_values(p53, p54):
    rep = constants_report(p53)
    assert rep.theta == DEFAULT_THETA == 0.25
    assert rep.lambda1 == pytest.approx(5.625, abs=1e-12)
    assert rep.phi == pytest.approx(1.0 / (6.0 * rep.k), rel=1e-15)
    assert rep.lambda1 * rep.phi == pytest.approx(1.0, rel=1e-15)
    assert rep.lambda2 == pytest.approx(1.0 / rep.psi, rel=1e-15)
    rep54 = constants_report(p54, theta=0.25)
    assert rep54.lambda2 == pytest.approx(LAMBDA2_54_QUARTER, rel=1e-12)


def test_kernel_domain_checks():
    with pytest.raises(DomainError):
        green_G(1.2, 0.5)
    with pytest.raises(DomainError):
        green_G(0.5, -0.1)
    with pytest.raises(DomainError):
        e_bound(-0.1)
    with pytest.raises(DomainError):
        rho_bound(1.5)
