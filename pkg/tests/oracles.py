"""Frozen reference values for the regression tests.

Everything here was computed independently of the package code: the
rationals and high-precision floats come from exact symbolic evaluation
of the closed-form kernel expressions, and the solution profiles from
mesh-refined runs cross-checked between the integral-equation and
shooting paths.  Update only with a fresh independent computation.
"""

import numpy as np

from beambvp.kernel import compute_k

# k = 1 - (alpha + sum beta) for the four bundled problems.
K_EXACT = {
    "5.1": 5.0 / 21.0,
    "5.2": 0.5,
    "5.3": 15.0 / 16.0,
    "5.4": 17.0 / 20.0,
}

# Exact value of psi(theta) for the badly scaled problem (5.4), from
# symbolic integration of theta^6 (1-2 theta)^2 int_theta^{1-theta} m(s) ds.
PSI_54 = {
    0.15: 7.729999707749311e-08,
    0.2: 2.875425882352941e-07,
    0.25: 6.609103258918313e-07,
    0.3: 1.0430131764705882e-06,
    0.4: 7.629402352941177e-07,
    0.45: 1.9525424627326517e-07,
}

LAMBDA2_54_QUARTER = 1513064.572944297  # 1 / psi(1/4) for problem 5.4

# int_0^1 G(0.37, s) ds as an exact rational.
G_ROW_INTEGRAL_037 = 14638717.0 / 7200000000.0

# H(1, 1/2) for problem 5.4 as an exact rational.
H_54_AT_1_HALF = 3.0 / 136.0

# Shooting parameters (u(0), u'''(0)) of the known solutions.
ROOT_51 = (0.02799740883171225, 0.4165134582755783)
ROOT_53_SMALL = (0.0003332708760730912, 0.4179064158429313)
ROOT_53_LARGE = (0.13937426774109452, 84.64107272899136)

# Sup norms of the solutions, from mesh-refined cross-checked runs.
SUP_51 = 0.0474343490622
SUP_52 = 6.741353051
SUP_53_SMALL = 0.0198860361799
SUP_53_LARGE = 12.7170383746
SUP_54_LARGE = 286.623747384


def closed_form_psi_54(theta):
    """Independent closed form of psi(theta) for problem 5.4."""
    poly = 103.0 + 206.0 * theta - 212.0 * theta**2 + 8.0 * theta**3
    return theta**6 * (1.0 - 2.0 * theta) ** 3 * poly / 6528.0


def analytic_unit_load(problem, t):
    """Exact solution of the linear problem with forcing y = 1."""
    k = compute_k(problem)
    c4 = problem.alpha / 180.0
    for b, h in zip(problem.betas, problem.etas):
        c4 += b * (h**3 / 18.0 - h**4 / 24.0)
    c4 /= k
    return -np.asarray(t, dtype=float) ** 4 / 24.0 + np.asarray(t) ** 3 / 18.0 + c4
