from __future__ import annotations
import logging
from functools import lru_cache
from typing import Callable, List, Tuple

import numpy as np
from scipy import special

from nematic_shear.domain.errors import QuadratureError

logger = logging.getLogger(__name__)

Panel = Tuple[float, float, np.ndarray]


@lru_cache(maxsize=None)
def unit_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = special.roots_legendre(n)
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def segment_mean(f: Callable[[np.ndarray], np.ndarray], a, b, n: int = 16) -> np.ndarray:
    """Mean of f over [a, b] for broadcast arrays a, b (a == b gives f(a))."""
    s, w = unit_rule(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    vals = f(a + s * (b - a))
    return np.sum(vals * w, axis=-1)


def _panel(f, lo: float, hi: float, n: int) -> np.ndarray:
    s, w = unit_rule(n)
    vals = np.atleast_2d(f(lo + s * (hi - lo)))
    return (hi - lo) * (vals @ w)


def adaptive_gauss(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    n: int = 64,
    tol: float = 1e-10,
    max_depth: int = 40,
) -> Tuple[np.ndarray, List[Panel]]:
    """Composite Gauss-Legendre with bisection of panels until the halves agree.

    `f` maps a 1-D array of abscissae to an array of shape (m, len) or (len,).
    Returns the integral vector and the accepted panels in increasing order.
    """
    if b <= a:
        raise QuadratureError("intervalo de integración vacío", (a, b))
    whole = _panel(f, a, b, n)
    if not np.all(np.isfinite(whole)):
        raise QuadratureError("integrando no finito", (a, b))
    scale = np.maximum(1.0, np.abs(whole))
    width = b - a
    accepted: List[Panel] = []
    stack = [(a, b, whole, 0)]
    while stack:
        lo, hi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid, n)
        right = _panel(f, mid, hi, n)
        refined = left + right
        if not np.all(np.isfinite(refined)):
            raise QuadratureError("integrando no finito", (lo, hi))
        err = np.max(np.abs(refined - est) / scale)
        if err <= tol * max((hi - lo) / width, 1e-3):
            accepted.append((lo, mid, left))
            accepted.append((mid, hi, right))
            continue
        if depth >= max_depth:
            raise QuadratureError(f"sin convergencia tras {max_depth} divisiones", (lo, hi))
        logger.debug("split panel [%.6g, %.6g] err=%.3g", lo, hi, err)
        stack.append((mid, hi, right, depth + 1))
        stack.append((lo, mid, left, depth + 1))
    accepted.sort(key=lambda p: p[0])
    total = np.sum([p[2] for p in accepted], axis=0)
    return total, accepted


def composite_nodes(a: float, b: float, panels: int, n: int = 16) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a uniform composite Gauss-Legendre rule on [a, b]."""
    s, w = unit_rule(n)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)[:, None]
    x = (edges[:-1, None] + s * h).ravel()
    wt = (w * h).ravel()
    return x, wt
