"""Composite quadrature rules with declared interior seams.

Integrands built from the problem kernel are piecewise polynomial with a
jump in the third derivative where the kernel switches branch.  Declaring
those points as seams forces them onto panel boundaries so each panel sees
a smooth integrand and composite rules keep their full order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonFiniteError

__all__ = ["QuadratureRule", "nodes_weights", "integrate"]

# Gauss-Legendre 4-point nodes/weights on [-1, 1]
_GL4_X, _GL4_W = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True)
class QuadratureRule:
    """A composite rule: kind 'simpson' or 'gauss4', panel count, seam list.

    Seams are points in (0, 1) forced onto panel boundaries whenever they
    fall strictly inside the integration interval.
    """

    kind: str = "simpson"
    panels: int = 64
    seams: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("simpson", "gauss4"):
            raise DomainError(f"unknown quadrature kind {self.kind!r}")
        if not isinstance(self.panels, int) or self.panels < 1:
            raise DomainError("panels must be an integer >= 1")
        seams = tuple(float(s) for s in self.seams)
        if any(not (0.0 < s < 1.0) for s in seams):
            raise DomainError("seams must lie strictly inside (0, 1)")
        if list(seams) != sorted(set(seams)):
            seams = tuple(sorted(set(seams)))
        object.__setattr__(self, "seams", seams)


def _segments(rule: QuadratureRule, a: float, b: float):
    """Split [a, b] at interior seams; allocate panels proportionally."""
    cuts = [s for s in rule.seams if a < s < b]
    edges = [a] + cuts + [b]
    total = b - a
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        p = max(1, round(rule.panels * (hi - lo) / total))
        out.append((lo, hi, p))
    return out


def _simpson_segment(lo: float, hi: float, panels: int):
    n = 2 * panels + 1
    x = np.linspace(lo, hi, n)
    h = (hi - lo) / (n - 1)
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return x, w * (h / 3.0)


def _gauss4_segment(lo: float, hi: float, panels: int):
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2.0          # (panels,)
    mid = (edges[:-1] + edges[1:]) / 2.0
    x = (mid[:, None] + half[:, None] * _GL4_X[None, :]).ravel()
    w = (half[:, None] * _GL4_W[None, :]).ravel()
    return x, w


def nodes_weights(rule: QuadratureRule, a: float, b: float):
    """Nodes and weights for integrating over [a, b] ⊆ [0, 1].

    Nodes are sorted ascending, weights sum to b - a, and any declared seam
    inside (a, b) appears as a panel boundary.  Simpson nodes shared by two
    segments are merged with summed weights.
    """
    if not (0.0 <= a <= b <= 1.0):
        raise DomainError(f"integration interval [{a}, {b}] must lie inside [0, 1]")
    if a == b:
        return np.array([a]), np.array([0.0])
    xs, ws = [], []
    for lo, hi, p in _segments(rule, a, b):
        if rule.kind == "simpson":
            x, w = _simpson_segment(lo, hi, p)
        else:
            x, w = _gauss4_segment(lo, hi, p)
        if xs and rule.kind == "simpson":
            # segment start coincides with previous segment end
            ws[-1][-1] += w[0]
            x, w = x[1:], w[1:]
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def integrate(g, a: float, b: float, rule: QuadratureRule) -> float:
    """Integrate the scalar function g over [a, b] with the given rule.

    Raises NonFiniteError if g returns NaN or infinity at any node.
    """
    x, w = nodes_weights(rule, a, b)
    if a == b:
        return 0.0
    y = np.array([float(g(float(xi))) for xi in x])
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise NonFiniteError(f"integrand is not finite at node {bad!r}")
    return float(np.dot(w, y))
