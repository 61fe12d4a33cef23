"""Discrete norms and quadrature conventions used across the package.

Trapezoid quadrature throughout; derivatives by forward differences at
interior nodes and one-sided at the right boundary, so a grid function of
n+1 nodes yields n+1 slope samples.
"""

from __future__ import annotations

import numpy as np


def trapezoid(values: np.ndarray, h: float) -> float:
    return float(np.trapezoid(values, dx=h))


def forward_diff(f: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(f)
    d[:-1] = (f[1:] - f[:-1]) / h
    d[-1] = d[-2]
    return d


def l2_norm(f: np.ndarray, h: float) -> float:
    return float(np.sqrt(np.trapezoid(f * f, dx=h)))


def h1_norm(f: np.ndarray, h: float) -> float:
    d = forward_diff(f, h)
    return float(np.sqrt(np.trapezoid(f * f, dx=h) + np.trapezoid(d * d, dx=h)))


def sup_norm(f: np.ndarray) -> float:
    return float(np.max(np.abs(f)))
