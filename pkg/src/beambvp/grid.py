"""Grid functions on the uniform grid over [0, 1] and finite-difference stencils."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError, NonFiniteError

__all__ = [
    "GridFunction", "fd_slopes",
    "deriv1_left", "deriv1_right", "deriv2_left", "deriv3_left",
]


def fd_slopes(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference first derivatives on a uniform grid."""
    v = np.asarray(values, dtype=float)
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h)
    d[-1] = (25.0 * v[-1] - 48.0 * v[-2] + 36.0 * v[-3] - 16.0 * v[-4] + 3.0 * v[-5]) / (12.0 * h)
    d[-2] = (3.0 * v[-1] + 10.0 * v[-2] - 18.0 * v[-3] + 6.0 * v[-4] - v[-5]) / (12.0 * h)
    return d


def deriv1_left(values: np.ndarray, h: float) -> float:
    """One-sided 4th-order first derivative at the left endpoint."""
    v = values
    return float((-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h))


def deriv1_right(values: np.ndarray, h: float) -> float:
    """One-sided 4th-order first derivative at the right endpoint."""
    v = values
    return float((25.0 * v[-1] - 48.0 * v[-2] + 36.0 * v[-3] - 16.0 * v[-4] + 3.0 * v[-5]) / (12.0 * h))


# Wide one-sided second-derivative stencil: 16 points, exact through degree 8
# (order 7), chosen as the minimum-norm solution of the exactness equations in
# exact rational arithmetic.  The small coefficients keep rounding
# amplification low while the high order keeps the truncation constant small.
_D2L_WIDE = np.array([
    11224152875, -26957254077, 10391189679, 15367427591, -1290917943,
    -11644476975, -6507310435, 4909110885, 9388360485, 2759964365,
    -6872428575, -7310018583, 3467413031, 9142181919, -7880254317,
    1812860075,
], dtype=float) / 3893984640.0

_D2L_NARROW = np.array([812.0, -3132.0, 5265.0, -5080.0, 2970.0, -972.0, 137.0]) / 180.0


def deriv2_left(values: np.ndarray, h: float) -> float:
    """One-sided second derivative at the left endpoint (order >= 4)."""
    v = values
    if v.shape[0] >= 16:
        return float(np.dot(_D2L_WIDE, v[:16]) / h**2)
    return float(np.dot(_D2L_NARROW, v[:7]) / h**2)


def deriv3_left(values: np.ndarray, h: float) -> float:
    """One-sided 4th-order third derivative at the left endpoint."""
    v = values
    num = (-49.0 / 8.0 * v[0] + 29.0 * v[1] - 461.0 / 8.0 * v[2] + 62.0 * v[3]
           - 307.0 / 8.0 * v[4] + 13.0 * v[5] - 15.0 / 8.0 * v[6])
    return float(num / h**3)


class GridFunction:
    """Values on the uniform grid t_i = i/(n-1), n odd and >= 11.

    Calling the object interpolates with a piecewise cubic Hermite spline
    whose slopes come from 4th-order finite differences, so interpolated
    values are O(h^4)-accurate for smooth data.
    """

    __slots__ = ("values", "grid", "_spline")

    def __init__(self, values):
        values = np.ascontiguousarray(values, dtype=float)
        if values.ndim != 1:
            raise DomainError("grid function values must be one-dimensional")
        n = values.shape[0]
        if n < 11 or n % 2 == 0:
            raise DomainError(f"grid size must be odd and >= 11, got {n}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("grid function values must be finite")
        values.flags.writeable = False
        self.values = values
        self.grid = np.linspace(0.0, 1.0, n)
        self._spline = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> float:
        return 1.0 / (self.n - 1)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def min_value(self) -> float:
        return float(np.min(self.values))

    def __call__(self, t):
        if self._spline is None:
            self._spline = CubicHermiteSpline(
                self.grid, self.values, fd_slopes(self.values, self.h)
            )
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
            raise DomainError("interpolation point outside [0, 1]")
        out = self._spline(t_arr)
        return float(out) if t_arr.ndim == 0 else out

    def resample(self, n: int) -> "GridFunction":
        """Interpolate onto a finer or coarser odd grid."""
        return GridFunction(self(np.linspace(0.0, 1.0, n)))

    def __repr__(self):
        return f"GridFunction(n={self.n}, sup={self.sup_norm():.6g})"
