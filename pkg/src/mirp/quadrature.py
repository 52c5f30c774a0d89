"""Composite quadrature of Stieltjes integrals against sampled integrators."""
from __future__ import annotations

import numpy as np

RULES = ("trapezoid", "simpson")


def cumulative_stieltjes(f: np.ndarray, g: np.ndarray, rule: str = "trapezoid") -> np.ndarray:
    """Running integral of f dg over a uniform grid, anchored at the first node.

    ``trapezoid`` is the composite trapezoid rule (order 2).  ``simpson`` fits
    both f and g by quadratics on pairs of intervals anchored at even offsets
    (order 4 for smooth data); a trailing odd interval falls back to one
    trapezoid step.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape or f.ndim != 1 or len(f) < 1:
        raise ValueError("f and g must be equal-length 1-d arrays")
    if rule == "trapezoid":
        inc = 0.5 * (f[:-1] + f[1:]) * np.diff(g)
        return np.concatenate(([0.0], np.cumsum(inc)))
    if rule == "simpson":
        return _cumulative_simpson(f, g)
    raise ValueError(f"unknown quadrature rule {rule!r}")


def _cumulative_simpson(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = len(f) - 1
    out = np.zeros(len(f))
    if n <= 0:
        return out
    npairs = n // 2
    if npairs:
        i0 = 2 * np.arange(npairs)
        f0, f1, f2 = f[i0], f[i0 + 1], f[i0 + 2]
        g0, g1, g2 = g[i0], g[i0 + 1], g[i0 + 2]
        dg = g2 - g0
        cg = g2 - 2.0 * g1 + g0  # curvature of the integrator on the pair
        df = f2 - f0
        cf = f2 - 2.0 * f1 + f0
        full = f1 * dg + df * cg / 3.0 + cf * dg / 6.0
        half = (
            f1 * dg / 2.0
            - f1 * cg / 2.0
            - df * dg / 8.0
            + df * cg / 6.0
            + cf * dg / 12.0
            - cf * cg / 8.0
        )
        even = np.concatenate(([0.0], np.cumsum(full)))
        out[i0] = even[:-1]
        out[i0 + 1] = even[:-1] + half
        out[2 * npairs] = even[-1]
    if n % 2:  # trailing interval
        out[n] = out[n - 1] + 0.5 * (f[n - 1] + f[n]) * (g[n] - g[n - 1])
    return out
