"""Young functions t^p * log(e+t)^lambda1 and the Luxemburg gauge.

Every norm in this package is either a plain power-mean or the gauge of a
modular: a map k -> rho(k) that is non-increasing on (0, inf) and tends
to 0 as k grows.  The gauge is inf{k > 0 : rho(k) <= 1}.  The solver here
treats rho as a black box (no derivatives), brackets the crossing by
geometric expansion from k = 1, and bisects.  It tracks all evaluations
and raises if they ever contradict monotonicity.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "YoungPhi",
    "PhiDiagnostics",
    "phi_eval",
    "phi_diagnostics",
    "luxemburg_gauge",
    "GaugeBracketError",
    "NonMonotoneModularError",
]


class GaugeBracketError(RuntimeError):
    """The modular stayed above 1 through the whole expansion range."""


class NonMonotoneModularError(RuntimeError):
    """Sampled modular values increased with k."""


@dataclass(frozen=True)
class YoungPhi:
    """The Young function t^p * log(e+t)^lambda1.

    Admissible ranges: p > 1 with any real lambda1, or p = 1 with
    lambda1 >= 0.  Outside them the function fails to be convex near 0.
    """

    p: float
    lambda1: float = 0.0

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if self.p == 1 and self.lambda1 < 0:
            raise ValueError("p = 1 requires lambda1 >= 0")

    def __call__(self, t):
        return phi_eval(self, t)


def phi_eval(phi: YoungPhi, t):
    """Evaluate t^p * log(e+t)^lambda1 for scalar or array t >= 0."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise ValueError("Young functions take nonnegative arguments")
    out = arr**phi.p * np.log(math.e + arr) ** phi.lambda1
    if np.isscalar(t) or arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class PhiDiagnostics:
    """Sampled convexity, doubling constant and power sandwich of a Young function."""

    convexity_ok: bool
    delta2_sup: float
    sandwich_delta: float
    sandwich_scale: float
    sandwich_start: float
    sandwich_ok: bool


def phi_diagnostics(
    phi: YoungPhi, t_grid: np.ndarray | None = None, delta: float = 0.5
) -> PhiDiagnostics:
    """Probe a Young function on a grid.

    Checks midpoint convexity on consecutive grid triples, samples the
    doubling constant sup Phi(2t)/Phi(t), and searches for a scale k and a
    threshold T with t^max(p-delta,1) <= Phi(k t) and Phi(t) <= (k t)^(p+delta)
    for all sampled t >= T.
    """
    if t_grid is None:
        t_grid = np.logspace(-8.0, 8.0, 241)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0) or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be positive and increasing")

    vals = phi_eval(phi, t_grid)
    mids = phi_eval(phi, 0.5 * (t_grid[:-2] + t_grid[2:]))
    convexity_ok = bool(np.all(mids <= 0.5 * (vals[:-2] + vals[2:]) * (1 + 1e-12)))

    delta2_sup = float(np.max(phi_eval(phi, 2.0 * t_grid) / vals))

    q_lo = max(phi.p - delta, 1.0)
    q_hi = phi.p + delta
    sandwich_scale = math.nan
    sandwich_start = math.nan
    sandwich_ok = False
    for k in (1.0, 2.0, 4.0, 8.0, 16.0):
        lower = t_grid**q_lo <= phi_eval(phi, k * t_grid) * (1 + 1e-12)
        upper = vals <= (k * t_grid) ** q_hi * (1 + 1e-12)
        good = lower & upper
        # want both inequalities on the whole sampled tail above some T
        tail_ok = np.flatnonzero(~good)
        start_idx = 0 if tail_ok.size == 0 else int(tail_ok[-1]) + 1
        if start_idx < len(t_grid) - 8:
            sandwich_scale = k
            sandwich_start = float(t_grid[start_idx])
            sandwich_ok = True
            break
    return PhiDiagnostics(
        convexity_ok=convexity_ok,
        delta2_sup=delta2_sup,
        sandwich_delta=delta,
        sandwich_scale=sandwich_scale,
        sandwich_start=sandwich_start,
        sandwich_ok=sandwich_ok,
    )


class _EvalLog:
    """Sampled (k, rho(k)) pairs, kept sorted in k, with monotonicity checks."""

    def __init__(self, rho):
        self._rho = rho
        self._ks: list[float] = []
        self._vs: list[float] = []

    def __call__(self, k: float) -> float:
        v = float(self._rho(k))
        if math.isnan(v):
            raise ValueError("modular returned NaN")
        i = bisect.bisect_left(self._ks, k)
        slack = 1e-9
        if i > 0 and v > self._vs[i - 1] + slack * (1.0 + abs(self._vs[i - 1])):
            raise NonMonotoneModularError(
                f"rho({k}) = {v} exceeds rho({self._ks[i-1]}) = {self._vs[i-1]}"
            )
        if i < len(self._ks) and self._vs[i] > v + slack * (1.0 + abs(v)):
            raise NonMonotoneModularError(
                f"rho({self._ks[i]}) = {self._vs[i]} exceeds rho({k}) = {v}"
            )
        self._ks.insert(i, k)
        self._vs.insert(i, v)
        return v


def luxemburg_gauge(rho, tol: float = 1e-10, max_doublings: int = 200) -> float:
    """inf{k > 0 : rho(k) <= 1} for a non-increasing modular rho.

    Returns 0 when rho never exceeds 1 (in particular for rho identically
    zero) and +inf when rho is infinite beyond the expansion range.  The
    crossing is located by bisection to relative width `tol`; the returned
    k satisfies rho(k) <= 1.
    """
    ev = _EvalLog(rho)
    v = ev(1.0)
    if v <= 1.0:
        hi = 1.0
        lo = 1.0
        for _ in range(max_doublings):
            lo *= 0.5
            if ev(lo) > 1.0:
                break
        else:
            return 0.0
    else:
        lo = 1.0
        hi = 1.0
        for _ in range(max_doublings):
            hi *= 2.0
            v = ev(hi)
            if v <= 1.0:
                break
        else:
            if math.isinf(v):
                return math.inf
            raise GaugeBracketError(
                f"modular still {v} > 1 after {max_doublings} doublings"
            )
    for _ in range(200):
        if hi - lo <= tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if ev(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi
