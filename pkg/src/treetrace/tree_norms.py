"""Functions on the truncated tree and their Orlicz-Sobolev norms.

A tree function stores one value per vertex on levels 0..N and is read as
piecewise linear in arclength along every edge.  For that class the
minimal upper gradient is constant on each edge and equals the difference
quotient |F(child) - F(parent)| / edge_length, so the gradient part of
the norm is an exact finite sum while the function part is a per-edge
Gauss-Legendre integral of Phi(|F|) against the mass density.
"""

from __future__ import annotations

import numpy as np

from .tree import TreeParams, arclength, edge_length, edge_measure, _gauss_nodes
from .young import YoungPhi, luxemburg_gauge, phi_eval

__all__ = [
    "TreeFunction",
    "edge_slopes",
    "upper_gradient_edges",
    "tree_lphi_modular",
    "gradient_lphi_modular",
    "newtonian_norm",
]


class TreeFunction:
    """Vertex values on levels 0..depth, lexicographic within each level."""

    def __init__(self, K: int, depth: int, levels) -> None:
        if K < 2:
            raise ValueError("K must be at least 2")
        if depth < 1:
            raise ValueError("depth must be at least 1")
        if len(levels) != depth + 1:
            raise ValueError(f"expected {depth + 1} level arrays, got {len(levels)}")
        stored = []
        for n, arr in enumerate(levels):
            arr = np.asarray(arr, dtype=float).copy()
            if arr.shape != (K**n,):
                raise ValueError(f"level {n} must hold {K**n} values")
            if not np.all(np.isfinite(arr)):
                raise ValueError("vertex values must be finite")
            stored.append(arr)
        self.K = K
        self.depth = depth
        self.levels = stored

    def scaled(self, factor: float) -> "TreeFunction":
        return TreeFunction(self.K, self.depth, [lv * factor for lv in self.levels])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("K,N\n")
            fh.write(f"{self.K},{self.depth}\n")
            fh.write("address,value\n")
            for n, arr in enumerate(self.levels):
                for i, v in enumerate(arr):
                    fh.write(f"{_vertex_address(self.K, n, i)},{v:.17g}\n")

    @classmethod
    def from_csv(cls, path) -> "TreeFunction":
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh]
        lines = [ln for ln in lines if ln]
        if lines[0] != "K,N":
            raise ValueError("missing K,N header")
        K, depth = (int(s) for s in lines[1].split(","))
        levels = [np.zeros(K**n) for n in range(depth + 1)]
        for ln in lines[3:]:
            addr, val = ln.split(",")
            n = len(addr)
            idx = 0
            for ch in addr:
                idx = idx * K + int(ch)
            levels[n][idx] = float(val)
        return cls(K, depth, levels)


def _vertex_address(K: int, level: int, index: int) -> str:
    if K > 10:
        raise ValueError("digit-string addresses support K <= 10 only")
    digits = []
    for _ in range(level):
        index, d = divmod(index, K)
        digits.append(str(d))
    return "".join(reversed(digits))


def _check_shape(F: TreeFunction, params: TreeParams) -> None:
    if F.K != params.K or F.depth != params.depth:
        raise ValueError("tree function shape does not match tree parameters")


def edge_slopes(F: TreeFunction, params: TreeParams) -> list[np.ndarray]:
    """Signed arclength slope per edge; entry n covers the level n -> n+1 edges,
    indexed by the child vertex."""
    _check_shape(F, params)
    out = []
    for n in range(F.depth):
        parent = np.repeat(F.levels[n], F.K)
        out.append((F.levels[n + 1] - parent) / edge_length(params, n))
    return out


def upper_gradient_edges(F: TreeFunction, params: TreeParams) -> list[np.ndarray]:
    """Per-edge upper gradient of the piecewise-linear interpolant: the
    absolute difference quotient, minimal for this class of functions."""
    return [np.abs(s) for s in edge_slopes(F, params)]


def tree_lphi_modular(
    F: TreeFunction,
    params: TreeParams,
    phi: YoungPhi,
    k: float = 1.0,
    lam: float | None = None,
) -> float:
    """Integral of Phi(|F|/k) over the truncated tree against the mass density.

    F is interpolated linearly in arclength on each edge; each edge integral
    uses the tree's Gauss-Legendre order on the composite integrand.
    """
    _check_shape(F, params)
    if k <= 0:
        raise ValueError("k must be positive")
    if lam is None:
        lam = params.lambda2
    eps, beta, c_shift = params.epsilon, params.beta, params.C_const
    gx, gw = _gauss_nodes(params.quad_order)
    total = 0.0
    for n in range(F.depth):
        tau = n + 0.5 * (gx + 1.0)
        a_off = arclength(params, tau) - arclength(params, n)
        dens = 0.5 * gw * np.exp(-beta * tau) * (tau + c_shift) ** lam
        parent = np.repeat(F.levels[n], F.K)
        slope = (F.levels[n + 1] - parent) / edge_length(params, n)
        vals = parent[:, None] + slope[:, None] * a_off[None, :]
        total += float(np.sum(dens[None, :] * phi_eval(phi, np.abs(vals) / k)))
    return total


def gradient_lphi_modular(
    F: TreeFunction,
    params: TreeParams,
    phi: YoungPhi,
    k: float = 1.0,
    lam: float | None = None,
) -> float:
    """Integral of Phi(g/k) for the per-edge upper gradient g.

    g is constant on each edge, so this is the exact sum of
    Phi(g_edge / k) * edge mass over all edges.
    """
    _check_shape(F, params)
    if k <= 0:
        raise ValueError("k must be positive")
    grads = upper_gradient_edges(F, params)
    total = 0.0
    for n in range(F.depth):
        mass = edge_measure(params, n, lam)
        total += mass * float(np.sum(phi_eval(phi, grads[n] / k)))
    return total


def newtonian_norm(
    F: TreeFunction,
    params: TreeParams,
    phi: YoungPhi,
    lam: float | None = None,
    tol: float = 1e-10,
) -> float:
    """Gauge norm of F plus gauge norm of its minimal per-edge upper gradient."""
    _check_shape(F, params)
    if lam is None:
        lam = params.lambda2

    if all(np.all(lv == 0.0) for lv in F.levels):
        fn_gauge = 0.0
    else:
        fn_gauge = luxemburg_gauge(
            lambda k: tree_lphi_modular(F, params, phi, k, lam), tol
        )

    grads = upper_gradient_edges(F, params)
    masses = [edge_measure(params, n, lam) for n in range(F.depth)]
    if all(np.all(g == 0.0) for g in grads):
        grad_gauge = 0.0
    else:

        def rho(k: float) -> float:
            return sum(
                m * float(np.sum(phi_eval(phi, g / k)))
                for m, g in zip(masses, grads)
            )

        grad_gauge = luxemburg_gauge(rho, tol)
    return fn_gauge + grad_gauge
