"""Deterministic one-dimensional maximization over the reflection probability."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .schemes import SingleBsOutcome, input_cutoff, run_single_bs, single_bs_metrics

INV_PHI = (math.sqrt(5) - 1) / 2
SCAN_POINTS = 1001
SCAN_NOISE = 1e-12

Method = Literal["golden_section", "grid_fallback"]
Objective = Literal["probability", "fidelity"]


class NonFiniteObjective(ValueError):
    """The objective returned NaN or inf at ``x``."""

    def __init__(self, x: float, value: float):
        super().__init__(f"objective is not finite at x={x!r} (got {value!r})")
        self.x = x
        self.value = value


@dataclass(frozen=True)
class OptimizationResult:
    x_star: float
    f_star: float
    evaluations: int
    method: Method


class _Counted:
    def __init__(self, f: Callable[[float], float]):
        self.f = f
        self.calls = 0

    def __call__(self, x: float) -> float:
        self.calls += 1
        y = float(self.f(x))
        if not math.isfinite(y):
            raise NonFiniteObjective(x, y)
        return y


def is_unimodal(values: np.ndarray, noise: float = SCAN_NOISE) -> bool:
    """True if the sampled curve rises then falls (either part may be empty).

    Steps smaller than ``noise`` are treated as flat.
    """
    d = np.diff(values)
    signs = np.sign(d[np.abs(d) > noise])
    changes = np.flatnonzero(signs[1:] != signs[:-1])
    if changes.size == 0:
        return True
    return bool(changes.size == 1 and signs[0] > 0)


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> tuple[float, float]:
    """Golden-section search for a maximum of a unimodal ``f`` on ``[a, b]``.

    Ties keep the left sub-interval so plateaus resolve toward smaller x.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc
    return d, fd


def maximize_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-9,
    scan_points: int = SCAN_POINTS,
) -> OptimizationResult:
    """Maximize ``f`` on ``[lo, hi]``.

    A uniform pre-scan checks that ``f`` is unimodal; if so a golden-section
    search runs over the whole interval, otherwise the search is confined to
    the two grid cells around the best scanned point. The returned point is
    never worse than any scanned point, and ties go to the smaller x.

    Raises:
        NonFiniteObjective: if ``f`` returns NaN or inf anywhere it is sampled.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    g = _Counted(f)
    xs = np.linspace(lo, hi, scan_points)
    fs = np.array([g(x) for x in xs])
    best = int(np.argmax(fs))

    if is_unimodal(fs):
        method: Method = "golden_section"
        a, b = lo, hi
    else:
        method = "grid_fallback"
        a, b = xs[max(best - 1, 0)], xs[min(best + 1, scan_points - 1)]
    x_gs, f_gs = golden_section_max(g, a, b, tol)

    if f_gs > fs[best] or (f_gs == fs[best] and x_gs < xs[best]):
        x_star, f_star = x_gs, f_gs
    else:
        x_star, f_star = float(xs[best]), float(fs[best])
    return OptimizationResult(float(x_star), float(f_star), g.calls, method)


def optimize_single_bs(
    alpha: complex, eta: float = 1.0, objective: Objective = "probability"
) -> tuple[float, SingleBsOutcome]:
    """Reflection probability that maximizes success probability or fidelity."""
    if objective not in ("probability", "fidelity"):
        raise ValueError(f"unknown objective {objective!r}")
    cutoff = input_cutoff(alpha)

    def score(R: float) -> float:
        p, fid = single_bs_metrics(alpha, R, eta, cutoff)
        return p if objective == "probability" else fid

    res = maximize_scalar(score, 0.0, 1.0)
    return res.x_star, run_single_bs(alpha, res.x_star, eta, cutoff)
