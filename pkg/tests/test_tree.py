import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from treetrace import (
    EdgePoint,
    ball_measure,
    doubling_ratios,
    edge_length,
    edge_mass,
    edge_measure,
    make_tree_params,
    min_shift_constant,
    residual_measure,
    sample_ball_centers,
    tree_measure,
    vertex_distance,
)
from treetrace.tree import TreeParams

LN2 = math.log(2.0)


def std_params(depth=8, K=2, epsilon=LN2, beta=2 * LN2, lambda2=0.0, quad_order=8):
    return make_tree_params(K, epsilon, beta, lambda2, depth, quad_order)


# ---------------------------------------------------------------- parameters


def test_params_derived_quantities():
    p = std_params()
    assert p.hausdorff_dim == pytest.approx(1.0, abs=1e-15)
    assert p.smoothness_exponent(2.0) == pytest.approx(0.5, abs=1e-15)
    assert p.diameter == pytest.approx(2.0 / LN2)


def test_params_minimal_shift_value():
    # max{2*|1|/(2 - ln 3), 2*ln 4} = 2*ln 4
    p = make_tree_params(3, 1.0, 2.0, 1.0, 4)
    expected = max(2.0 / (2.0 - math.log(3.0)), 2.0 * math.log(4.0))
    assert expected == pytest.approx(2.772588722239781, abs=1e-12)
    assert p.C_const == pytest.approx(expected, abs=1e-12)


def test_params_rejections():
    with pytest.raises(ValueError, match="beta must exceed log K"):
        make_tree_params(2, LN2, LN2, 0.0, 4)
    with pytest.raises(ValueError, match="K must be at least 2"):
        make_tree_params(1, LN2, 2 * LN2, 0.0, 4)
    with pytest.raises(ValueError, match="epsilon must be positive"):
        make_tree_params(2, 0.0, 2 * LN2, 0.0, 4)
    with pytest.raises(ValueError, match="depth"):
        make_tree_params(2, LN2, 2 * LN2, 0.0, 0)
    with pytest.raises(ValueError, match="quad_order"):
        make_tree_params(2, LN2, 2 * LN2, 0.0, 4, quad_order=1)
    with pytest.raises(ValueError, match="C_const"):
        make_tree_params(2, LN2, 2 * LN2, 0.0, 4, c_const=1.0)
    with pytest.raises(ValueError, match="C_const"):
        TreeParams(2, LN2, 2 * LN2, 0.0, 0.5, 4)


def test_params_shift_can_only_grow():
    cmin = min_shift_constant(2, LN2, 2 * LN2, 0.0)
    p = make_tree_params(2, LN2, 2 * LN2, 0.0, 4, c_const=cmin + 3.0)
    assert p.C_const == pytest.approx(cmin + 3.0)


# ---------------------------------------------------------------- edge length


def test_edge_length_against_quadrature_oracle():
    p = std_params()
    oracle, err = integrate.quad(lambda t: 2.0**-t, 0.0, 1.0)
    assert err < 1e-12
    assert edge_length(p, 0) == pytest.approx(oracle, rel=1e-12)
    assert edge_length(p, 0) == pytest.approx(0.7213475204444817, abs=1e-15)


def test_edge_length_geometric_decay():
    p = std_params()
    assert edge_length(p, 1) == pytest.approx(0.5 * edge_length(p, 0), rel=1e-15)
    for n in range(p.depth - 1):
        assert edge_length(p, n + 1) < edge_length(p, n)


def test_edge_length_out_of_range():
    p = std_params(depth=4)
    with pytest.raises(ValueError):
        edge_length(p, 4)
    with pytest.raises(ValueError):
        edge_length(p, -1)


def test_ray_length_and_diameter():
    # one-edge lengths sum to 1/epsilon along an infinite ray
    p = std_params()
    total = sum(edge_length(p, n) for n in range(p.depth))
    tail = math.exp(-p.epsilon * p.depth) / p.epsilon
    assert total + tail == pytest.approx(1.0 / p.epsilon, rel=1e-14)
    assert p.diameter == pytest.approx(2.0 / p.epsilon)


# ------------------------------------------------------------ vertex distance


def test_vertex_distance_basic_values():
    p = std_params()
    assert vertex_distance(p, (), ()) == 0.0
    assert vertex_distance(p, (), (0,)) == pytest.approx(0.7213475204444817, rel=1e-12)
    assert vertex_distance(p, (0,), (1,)) == pytest.approx(1.4426950408889634, rel=1e-12)


def test_vertex_distance_symmetry_and_identity():
    p = std_params(depth=5)
    rng = np.random.default_rng(0)
    for _ in range(50):
        n1, n2 = rng.integers(0, 6, size=2)
        x = tuple(rng.integers(0, 2, size=n1))
        y = tuple(rng.integers(0, 2, size=n2))
        assert vertex_distance(p, x, y) == pytest.approx(vertex_distance(p, y, x), abs=1e-15)
        assert vertex_distance(p, x, x) == 0.0


@settings(max_examples=60, deadline=None)
@given(
    digits=st.lists(st.integers(0, 1), min_size=2, max_size=6),
    cut1=st.integers(0, 6),
    cut2=st.integers(0, 6),
)
def test_vertex_distance_additive_along_chain(digits, cut1, cut2):
    # x <= y <= z on one ray: d(x,z) = d(x,y) + d(y,z)
    p = std_params(depth=6)
    a, b = sorted((min(cut1, len(digits)), min(cut2, len(digits))))
    z = tuple(digits)
    x, y = z[:a], z[:b]
    d_xz = vertex_distance(p, x, z)
    d_sum = vertex_distance(p, x, y) + vertex_distance(p, y, z)
    assert d_xz == pytest.approx(d_sum, abs=1e-12)


def test_vertex_distance_triangle_inequality():
    p = std_params(depth=5, K=3)
    rng = np.random.default_rng(1)
    for _ in range(100):
        pts = [tuple(rng.integers(0, 3, size=rng.integers(0, 6))) for _ in range(3)]
        x, y, z = pts
        assert vertex_distance(p, x, z) <= (
            vertex_distance(p, x, y) + vertex_distance(p, y, z) + 1e-12
        )


def test_vertex_distance_rejects_bad_addresses():
    p = std_params(depth=3)
    with pytest.raises(ValueError):
        vertex_distance(p, (0, 2), ())
    with pytest.raises(ValueError):
        vertex_distance(p, (0,) * 4, ())


# ---------------------------------------------------------------- edge measure


def test_edge_measure_closed_form_at_lambda_zero():
    p = std_params(depth=12)
    beta = p.beta
    for n in range(11):
        closed = (math.exp(-beta * n) - math.exp(-beta * (n + 1))) / beta
        assert edge_measure(p, n, 0.0) == pytest.approx(closed, rel=1e-12)
    assert edge_measure(p, 0, 0.0) == pytest.approx(0.75 / (2 * LN2), rel=1e-12)


def test_edge_measure_exponential_shift_at_lambda_zero():
    p = std_params()
    assert edge_measure(p, 1, 0.0) == pytest.approx(
        math.exp(-p.beta) * edge_measure(p, 0, 0.0), rel=1e-12
    )


def test_edge_mass_weighted_against_adaptive_quadrature():
    # raw quadrature helper, checked with a shift below the bundle's minimum
    beta, c, lam = 2 * LN2, 2.0034, 1.0
    oracle, err = integrate.quad(lambda t: math.exp(-beta * t) * (t + c) ** lam, 0.0, 1.0)
    assert err < 1e-12
    assert edge_mass(beta, c, lam, 0, order=8) == pytest.approx(oracle, rel=1e-10)


def test_edge_mass_matches_tenfold_order():
    for lam in (-1.5, 0.7, 2.0):
        lo = edge_mass(2 * LN2, 4.0, lam, 3, order=8)
        hi = edge_mass(2 * LN2, 4.0, lam, 3, order=80)
        assert lo == pytest.approx(hi, rel=1e-12)


def test_edge_measure_negative_level_rejected():
    p = std_params()
    with pytest.raises(ValueError):
        edge_measure(p, -1)


# ------------------------------------------------------------- residual mass


def test_residual_measure_total_mass_geometric_oracle():
    p = std_params()
    # sum over n of K^(n+1) * m0 * e^(-beta*n), ratio K e^(-beta) = 1/2
    m0 = 0.75 / (2 * LN2)
    oracle = 2.0 * m0 / (1.0 - 0.5)
    assert oracle == pytest.approx(2.1640425613334453, abs=1e-12)
    assert residual_measure(p, from_level=0) == pytest.approx(oracle, rel=1e-12)


def test_residual_measure_decreases_with_depth():
    p = std_params()
    vals = [residual_measure(p, from_level=n) for n in range(8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_residual_measure_ratio_per_level():
    p = std_params(depth=10)
    total = residual_measure(p, from_level=0)
    assert residual_measure(p, from_level=10) == pytest.approx(total * 0.5**10, rel=1e-12)


def test_tree_measure_complements_residual():
    p = std_params(depth=6, lambda2=1.0)
    total = residual_measure(p, from_level=0)
    assert tree_measure(p) + residual_measure(p) == pytest.approx(total, rel=1e-12)


# ------------------------------------------------------------- ball measure


def _digits_of(index, K, length):
    out = []
    for _ in range(length):
        index, d = divmod(index, K)
        out.append(d)
    return tuple(reversed(out))


def _brute_ball(params, center, radius, lam, slices=3000):
    """Midpoint-Riemann ball mass, with distances via the two-endpoint minimum."""
    K, N, eps = params.K, params.depth, params.epsilon

    def A(tau):
        return (1.0 - np.exp(-eps * tau)) / eps

    cdig = _digits_of(center.child_index, K, center.level + 1)
    tau_x = center.level + center.offset

    def dist_to_vertex(vdig):
        k = 0
        for a, b in zip(cdig, vdig):
            if a != b:
                break
            k += 1
        if k == len(cdig) and len(vdig) >= len(cdig):
            return A(len(vdig)) - A(tau_x)
        if k == len(vdig):
            return A(tau_x) - A(len(vdig))
        return A(tau_x) + A(len(vdig)) - 2.0 * A(k)

    total = 0.0
    for n in range(N):
        for child in range(K ** (n + 1)):
            vdig = _digits_of(child, K, n + 1)
            tau = n + (np.arange(slices) + 0.5) / slices
            if n == center.level and child == center.child_index:
                d = np.abs(A(tau) - A(tau_x))
            else:
                d_par = dist_to_vertex(vdig[:-1]) + (A(tau) - A(n))
                d_chi = dist_to_vertex(vdig) + (A(n + 1) - A(tau))
                d = np.minimum(d_par, d_chi)
            dens = np.exp(-params.beta * tau) * (tau + params.C_const) ** lam
            total += float(np.sum(dens[d <= radius])) / slices
    return total


@pytest.mark.parametrize(
    "center,radius",
    [
        (EdgePoint(0, 1, 0.37), 0.3),
        (EdgePoint(1, 2, 0.55), 0.9),
        (EdgePoint(2, 5, 0.11), 1.7),
    ],
)
def test_ball_measure_against_riemann_oracle(center, radius):
    p = std_params(depth=3, lambda2=1.0)
    exact = ball_measure(p, center, radius)
    brute = _brute_ball(p, center, radius, p.lambda2)
    assert exact == pytest.approx(brute, rel=5e-3)


def test_ball_measure_full_radius_is_total_mass():
    p = std_params(depth=4)
    c = EdgePoint(1, 2, 0.4)
    assert ball_measure(p, c, p.diameter) == pytest.approx(tree_measure(p), rel=1e-12)


def test_ball_measure_monotone_in_radius():
    p = std_params(depth=4)
    c = EdgePoint(2, 3, 0.8)
    radii = np.linspace(0.05, 2.5, 20)
    vals = [ball_measure(p, c, r) for r in radii]
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
    assert vals[0] > 0


def test_ball_measure_rejects_bad_input():
    p = std_params(depth=3)
    with pytest.raises(ValueError):
        ball_measure(p, EdgePoint(3, 0, 0.5), 1.0)
    with pytest.raises(ValueError):
        ball_measure(p, EdgePoint(0, 2, 0.5), 1.0)
    with pytest.raises(ValueError):
        ball_measure(p, EdgePoint(0, 0, 0.5), -1.0)


def test_doubling_ratios_finite_and_stable_under_deeper_truncation():
    p4 = std_params(depth=4)
    p6 = std_params(depth=6)
    centers, radii = sample_ball_centers(p4, 300, seed=7)
    r4 = doubling_ratios(p4, centers, radii)
    r6 = doubling_ratios(p6, centers, radii)
    assert np.all(np.isfinite(r4)) and np.all(np.isfinite(r6))
    assert np.all(r4 >= 1.0 - 1e-12)
    sup4, sup6 = r4.max(), r6.max()
    assert sup6 <= 1.5 * sup4 and sup4 <= 1.5 * sup6
