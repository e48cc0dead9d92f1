"""Experiment drivers: random function families, ratio reports, and the
empirical stability checks for the trace/extension norm bounds and the
equivalence of the boundary energies.

A "bounded ratio" claim is operationalized as two thresholds on a sweep
over depths: the least-squares slope of log(ratio) against depth must stay
within +-slope_tol of zero, and the spread max/min of the sampled ratios
must stay below spread_max.  Reports sort their rows on (seed, depth)
before serialization so identical configurations produce identical CSV
bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .boundary_norms import (
    DEFAULT_PAIR_BUDGET,
    BoundaryFunction,
    EnergyParams,
    double_integral_energy,
    double_integral_energy_mc,
    dyadic_energy,
    dyadic_orlicz_modular,
    orlicz_besov_norm,
    orlicz_norm,
)
from .boundary import DyadicCell, ahlfors_ratio
from .hajlasz import HajlaszInstance, hajlasz_energy
from .operators import extend, trace
from .tree import (
    TreeParams,
    doubling_ratios,
    make_tree_params,
    sample_ball_centers,
)
from .tree_norms import TreeFunction, gradient_lphi_modular, newtonian_norm
from .young import YoungPhi

__all__ = [
    "BOUNDARY_FAMILIES",
    "TREE_FAMILIES",
    "ExperimentConfig",
    "RatioReport",
    "CheckReport",
    "TwoSidedFit",
    "generate",
    "indicator_function",
    "fit_log_slope",
    "tail_constant",
    "fit_two_sided",
    "chi_exceed_fraction",
    "verify_trace_bound",
    "verify_extension_bound",
    "verify_equivalences",
    "verify_roundtrip",
    "verify_doubling",
    "verify_ahlfors",
    "load_config",
]

LN2 = math.log(2.0)

BOUNDARY_FAMILIES = ("iid-uniform", "cell-indicator", "lacunary")
TREE_FAMILIES = ("extension-of-boundary", "random-vertex")

_FAMILY_CODES = {
    "iid-uniform": 1,
    "cell-indicator": 2,
    "lacunary": 3,
    "extension-of-boundary": 4,
    "random-vertex": 5,
}


def indicator_function(K: int, depth: int, cell_digits) -> BoundaryFunction:
    """Indicator of one dyadic cell, as a resolution-`depth` function."""
    digits = tuple(int(d) for d in cell_digits)
    if not 1 <= len(digits) <= depth:
        raise ValueError("cell level must lie in 1..depth")
    idx = 0
    for d in digits:
        if not 0 <= d < K:
            raise ValueError(f"digit {d} out of range for K={K}")
        idx = idx * K + d
    block = K ** (depth - len(digits))
    values = np.zeros(K**depth)
    values[idx * block : (idx + 1) * block] = 1.0
    return BoundaryFunction(K, depth, values)


def generate(
    family: str,
    *,
    K: int,
    depth: int,
    seed: int,
    epsilon: float | None = None,
    theta: float | None = None,
):
    """Deterministic sample from one of the named function families.

    Boundary families return a BoundaryFunction, tree families a
    TreeFunction.  The lacunary family needs epsilon and theta: it sums
    random-sign layers with amplitude e^(-eps*theta*n)/n, one per level.
    """
    if family not in _FAMILY_CODES:
        raise ValueError(f"unknown family {family!r}")
    rng = np.random.default_rng([_FAMILY_CODES[family], seed, depth, K])
    if family == "iid-uniform":
        return BoundaryFunction(K, depth, rng.uniform(size=K**depth))
    if family == "cell-indicator":
        level = int(rng.integers(1, depth + 1))
        idx = int(rng.integers(0, K**level))
        block = K ** (depth - level)
        values = np.zeros(K**depth)
        values[idx * block : (idx + 1) * block] = 1.0
        return BoundaryFunction(K, depth, values)
    if family == "lacunary":
        if epsilon is None or theta is None:
            raise ValueError("lacunary family needs epsilon and theta")
        values = np.zeros(K**depth)
        for n in range(1, depth + 1):
            amp = math.exp(-epsilon * theta * n) / n
            signs = rng.choice(np.array([-1.0, 1.0]), size=K**n)
            values += amp * np.repeat(signs, K ** (depth - n))
        return BoundaryFunction(K, depth, values)
    if family == "extension-of-boundary":
        u = BoundaryFunction(K, depth, rng.uniform(size=K**depth))
        return extend(u)
    # random-vertex
    return TreeFunction(K, depth, [rng.uniform(size=K**n) for n in range(depth + 1)])


@dataclass
class ExperimentConfig:
    """Geometry, exponents and sweep lists for one experiment run.

    lam defaults to lambda1 + lambda2 and theta to the matched smoothness
    exponent 1 - (beta - log K) / (epsilon * p); both can be pinned
    explicitly, in which case the hypothesis validators insist they agree
    with those formulas where an experiment assumes them.
    """

    K: int = 2
    epsilon: float = LN2
    beta: float = 2.0 * LN2
    p: float = 2.0
    lambda1: float = 0.0
    lambda2: float = 0.0
    lam: float | None = None
    theta: float | None = None
    family: str | None = None
    seeds: tuple[int, ...] = tuple(range(8))
    depths: tuple[int, ...] = (4, 5, 6, 7)
    quad_order: int = 8
    slope_tol: float = 0.1
    spread_max: float = 100.0
    n_balls: int = 1000
    hajlasz_max_depth: int = 6
    pair_budget: int = DEFAULT_PAIR_BUDGET
    mc_samples: int = 200_000
    out: str | None = None
    emit_plot_data: bool = False

    @property
    def codimension(self) -> float:
        return (self.beta - math.log(self.K)) / self.epsilon

    @property
    def resolved_theta(self) -> float:
        if self.theta is not None:
            return self.theta
        return 1.0 - self.codimension / self.p

    @property
    def resolved_lam(self) -> float:
        if self.lam is not None:
            return self.lam
        return self.lambda1 + self.lambda2

    def tree_params(self, depth: int) -> TreeParams:
        return make_tree_params(
            self.K, self.epsilon, self.beta, self.lambda2, depth, self.quad_order
        )

    def energy_params(self) -> EnergyParams:
        return EnergyParams(
            theta=self.resolved_theta,
            p=self.p,
            epsilon=self.epsilon,
            lam=self.resolved_lam,
            lambda2=self.lambda2,
        )

    def phi(self) -> YoungPhi:
        return YoungPhi(self.p, self.lambda1)

    def validate_trace_hypotheses(self) -> None:
        """Standing assumptions of the trace/extension bounds."""
        cod = self.codimension
        if not 0.0 < cod < self.p:
            raise ValueError(
                "trace/extension bounds need p > (beta - log K)/epsilon > 0"
            )
        matched = 1.0 - cod / self.p
        if self.theta is not None and abs(self.theta - matched) > 1e-9:
            raise ValueError(
                f"theta = {self.theta} does not match the required exponent {matched}"
            )
        self.phi()  # admissibility of (p, lambda1)

    def validate_equivalence_hypotheses(self) -> None:
        if self.lam is not None and abs(self.lam - (self.lambda1 + self.lambda2)) > 1e-12:
            raise ValueError("equivalence runs require lam = lambda1 + lambda2")
        if not 0.0 < self.resolved_theta < 1.0:
            raise ValueError("equivalence runs require 0 < theta < 1")
        self.phi()


def fit_log_slope(depths, values) -> float:
    """Least-squares slope of log(value) against depth; 0 for a single depth."""
    depths = np.asarray(depths, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.unique(depths).size < 2:
        return 0.0
    return float(np.polyfit(depths, np.log(values), 1)[0])


@dataclass
class ColumnStats:
    count: int
    minimum: float
    maximum: float
    median: float
    slope: float
    per_depth: dict[int, tuple[float, float, float]]

    @property
    def spread(self) -> float:
        if self.minimum <= 0:
            return math.inf
        return self.maximum / self.minimum

    @property
    def finite(self) -> bool:
        return math.isfinite(self.minimum) and math.isfinite(self.maximum)


class RatioReport:
    """Per-sample ratio values plus the stability verdict over a depth sweep."""

    def __init__(self, name, rows, ratio_columns, slope_tol=0.1, spread_max=100.0):
        self.name = name
        self.rows = sorted(
            rows, key=lambda r: (r["seed"], r["depth"], str(r.get("family", "")))
        )
        self.ratio_columns = tuple(ratio_columns)
        self.slope_tol = slope_tol
        self.spread_max = spread_max
        self.extra_checks: list[tuple[str, bool]] = []
        self.two_sided: TwoSidedFit | None = None

    def column(self, col):
        pts = [(r["depth"], r[col]) for r in self.rows if r.get(col) is not None]
        depths = np.array([d for d, _ in pts], dtype=float)
        values = np.array([v for _, v in pts], dtype=float)
        return depths, values

    def stats(self, col) -> ColumnStats:
        depths, values = self.column(col)
        if values.size == 0:
            raise ValueError(f"no samples for column {col!r}")
        per_depth = {}
        for d in sorted(set(int(x) for x in depths)):
            sel = values[depths == d]
            per_depth[d] = (float(sel.min()), float(sel.max()), float(np.median(sel)))
        finite = bool(np.all(np.isfinite(values)))
        slope = fit_log_slope(depths, values) if finite and np.all(values > 0) else math.inf
        return ColumnStats(
            count=int(values.size),
            minimum=float(values.min()),
            maximum=float(values.max()),
            median=float(np.median(values)),
            slope=slope,
            per_depth=per_depth,
        )

    @property
    def passed(self) -> bool:
        for col in self.ratio_columns:
            st = self.stats(col)
            if not st.finite or st.minimum <= 0:
                return False
            if abs(st.slope) > self.slope_tol or st.spread > self.spread_max:
                return False
        return all(ok for _, ok in self.extra_checks)

    def summary_lines(self) -> list[str]:
        lines = [f"report {self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for col in self.ratio_columns:
            st = self.stats(col)
            lines.append(
                f"  {col}: n={st.count} min={st.minimum:.6g} max={st.maximum:.6g}"
                f" median={st.median:.6g} slope={st.slope:+.4f} spread={st.spread:.3g}"
            )
        for label, ok in self.extra_checks:
            lines.append(f"  {label}: {'PASS' if ok else 'FAIL'}")
        return lines

    def to_csv(self, path) -> None:
        _write_rows_csv(path, self.rows)

    def plot_data(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("series,depth,value\n")
            for col in self.ratio_columns:
                for r in self.rows:
                    if r.get(col) is not None:
                        fh.write(f"{col},{r['depth']},{_fmt(r[col])}\n")


@dataclass
class CheckReport:
    """Pass/fail report for the exact checks (roundtrip, doubling, regularity)."""

    name: str
    passed: bool
    rows: list[dict] = field(default_factory=list)
    messages: list[str] = field(default_factory=list)

    def summary_lines(self) -> list[str]:
        lines = [f"report {self.name}: {'PASS' if self.passed else 'FAIL'}"]
        lines.extend(f"  {m}" for m in self.messages)
        return lines

    def to_csv(self, path) -> None:
        _write_rows_csv(path, self.rows)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_rows_csv(path, rows) -> None:
    if not rows:
        with open(path, "w", newline="") as fh:
            fh.write("\n")
        return
    lead = [k for k in ("seed", "depth", "family") if k in rows[0]]
    rest = sorted(k for k in rows[0] if k not in lead)
    cols = lead + rest
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join("" if r.get(c) is None else _fmt(r.get(c)) for c in cols) + "\n")


def _boundary_sample(cfg: ExperimentConfig, family: str, depth: int, seed: int):
    return generate(
        family,
        K=cfg.K,
        depth=depth,
        seed=seed,
        epsilon=cfg.epsilon,
        theta=cfg.resolved_theta,
    )


def verify_trace_bound(cfg: ExperimentConfig) -> RatioReport:
    """Ratio of the boundary gauge norm of the trace to the tree norm."""
    cfg.validate_trace_hypotheses()
    family = cfg.family or "extension-of-boundary"
    if family not in TREE_FAMILIES:
        raise ValueError(f"trace-bound needs a tree-function family, got {family!r}")
    phi = cfg.phi()
    ep = cfg.energy_params()
    rows = []
    for depth in cfg.depths:
        tp = cfg.tree_params(depth)
        for seed in cfg.seeds:
            F = _boundary_sample(cfg, family, depth, seed)
            numer = orlicz_besov_norm(trace(F), ep, phi)
            denom = newtonian_norm(F, tp, phi)
            rows.append(
                {
                    "seed": seed,
                    "depth": depth,
                    "family": family,
                    "besov_norm": numer,
                    "newtonian_norm": denom,
                    "ratio": numer / denom,
                }
            )
    return RatioReport("trace-bound", rows, ("ratio",), cfg.slope_tol, cfg.spread_max)


def verify_extension_bound(cfg: ExperimentConfig) -> RatioReport:
    """Ratio of the tree norm of the extension to the boundary gauge norm,
    plus the two-sided gradient-energy comparison for the same samples."""
    cfg.validate_trace_hypotheses()
    family = cfg.family or "iid-uniform"
    if family not in BOUNDARY_FAMILIES:
        raise ValueError(f"extension-bound needs a boundary family, got {family!r}")
    phi = cfg.phi()
    ep = cfg.energy_params()
    rows = []
    for depth in cfg.depths:
        tp = cfg.tree_params(depth)
        for seed in cfg.seeds:
            u = _boundary_sample(cfg, family, depth, seed)
            G = extend(u)
            numer = newtonian_norm(G, tp, phi)
            denom = orlicz_besov_norm(u, ep, phi)
            gmod = gradient_lphi_modular(G, tp, phi)
            dmod = dyadic_orlicz_modular(u, ep, phi)
            rows.append(
                {
                    "seed": seed,
                    "depth": depth,
                    "family": family,
                    "newtonian_norm": numer,
                    "besov_norm": denom,
                    "gradient_modular": gmod,
                    "dyadic_modular": dmod,
                    "ratio": numer / denom,
                    "energy_ratio": gmod / dmod,
                }
            )
    return RatioReport(
        "extension-bound", rows, ("ratio", "energy_ratio"), cfg.slope_tol, cfg.spread_max
    )


def tail_constant(epsilon: float, theta: float, p: float, lam: float) -> float:
    """Value of the convergent series sum_n e^(eps*n*p*(theta-1)/2) * n^lam."""
    q = math.exp(epsilon * p * (theta - 1.0) / 2.0)
    if not q < 1.0:
        raise ValueError("theta must be below 1 for the tail series to converge")
    total, n = 0.0, 1
    while True:
        term = q**n * float(n) ** lam
        total += term
        if term < 1e-15 * total and n > 1:
            return total
        n += 1
        if n > 1_000_000:
            raise RuntimeError("tail series did not converge")


@dataclass
class TwoSidedFit:
    """Constants (C, C_prime) of a two-sided comparison between the power
    energy and the Orlicz energy, fitted on base-depth samples."""

    lambda1: float
    C: float
    C_prime: float
    base_depth: int

    def check(self, energy: float, modular: float, widen: float = 1.0) -> bool:
        C = self.C * widen
        slack = 1e-9 * (1.0 + abs(energy) + abs(modular))
        if self.lambda1 > 0:
            return (
                modular / C <= energy + slack
                and energy <= C * modular + self.C_prime + slack
            )
        if self.lambda1 < 0:
            return (
                energy / C <= modular + slack
                and modular <= C * energy + self.C_prime + slack
            )
        return abs(energy - modular) <= slack


def fit_two_sided(pairs, lambda1: float, c_prime: float, base_depth: int) -> TwoSidedFit:
    """Smallest C making the two-sided comparison hold on the given
    (energy, modular) pairs, with the additive constant supplied analytically."""
    C = 1.0
    for energy, modular in pairs:
        if energy <= 0 or modular <= 0:
            continue
        if lambda1 > 0:
            C = max(C, modular / energy, (energy - c_prime) / modular)
        elif lambda1 < 0:
            C = max(C, energy / modular, (modular - c_prime) / energy)
    return TwoSidedFit(lambda1=lambda1, C=C, C_prime=c_prime, base_depth=base_depth)


def chi_exceed_fraction(f: BoundaryFunction, theta: float, epsilon: float) -> float:
    """Fraction of cells (levels 1..depth) whose average jump exceeds the
    threshold e^(-eps*n*(theta+1)/2) separating the two regimes of the
    logarithmic factor."""
    avgs = f.level_averages()
    exceed = 0
    total = 0
    for n in range(1, f.depth + 1):
        diff = np.abs(avgs[n] - np.repeat(avgs[n - 1], f.K))
        thr = math.exp(-epsilon * n * (theta + 1.0) / 2.0)
        exceed += int(np.sum(diff > thr))
        total += diff.size
    return exceed / total


def verify_equivalences(cfg: ExperimentConfig) -> RatioReport:
    """Cross-checks between the four boundary energies on one family sweep.

    Columns: double-sum vs multiscale power energy (both with unit level
    weights), fractional-gradient program vs the same, and the gauge norm
    vs the composite (Orlicz norm + energy^(1/p)).  When lambda1 is
    nonzero the two-sided fit between the weighted energy and the Orlicz
    energy is fitted at the shallowest depth and validated, with the
    multiplicative constant doubled, on the deeper ones.
    """
    cfg.validate_equivalence_hypotheses()
    family = cfg.family or "iid-uniform"
    if family not in BOUNDARY_FAMILIES:
        raise ValueError(f"equivalence needs a boundary family, got {family!r}")
    phi = cfg.phi()
    ep = cfg.energy_params()
    ep_plain = EnergyParams(theta=ep.theta, p=ep.p, epsilon=ep.epsilon)
    rows = []
    for depth in cfg.depths:
        for seed in cfg.seeds:
            f = _boundary_sample(cfg, family, depth, seed)
            e_plain = dyadic_energy(f, ep_plain)
            if f.K ** (2 * depth) <= cfg.pair_budget:
                b_energy = double_integral_energy(f, ep_plain, cfg.pair_budget)
            else:
                b_energy = double_integral_energy_mc(
                    f, ep_plain, cfg.mc_samples, seed
                ).value
            if depth <= cfg.hajlasz_max_depth:
                inst = HajlaszInstance(f, ep.theta, ep.p, cfg.epsilon)
                h_energy = hajlasz_energy(inst)
                h_ratio = h_energy / e_plain
            else:
                h_energy = None
                h_ratio = None
            e_weighted = dyadic_energy(f, ep)
            modular = dyadic_orlicz_modular(f, ep, phi)
            besov = orlicz_besov_norm(f, ep, phi)
            composite = orlicz_norm(f, phi) + e_weighted ** (1.0 / ep.p)
            rows.append(
                {
                    "seed": seed,
                    "depth": depth,
                    "family": family,
                    "dyadic_energy": e_plain,
                    "double_integral": b_energy,
                    "hajlasz_energy": h_energy,
                    "weighted_energy": e_weighted,
                    "orlicz_modular": modular,
                    "besov_norm": besov,
                    "composite_norm": composite,
                    "chi_fraction": chi_exceed_fraction(f, ep.theta, cfg.epsilon),
                    "double_vs_dyadic": b_energy / e_plain,
                    "hajlasz_vs_dyadic": h_ratio,
                    "besov_vs_composite": besov / composite,
                }
            )
    report = RatioReport(
        "equivalence",
        rows,
        ("double_vs_dyadic", "hajlasz_vs_dyadic", "besov_vs_composite"),
        cfg.slope_tol,
        cfg.spread_max,
    )
    if cfg.lambda1 != 0.0:
        lam_for_tail = cfg.resolved_lam if cfg.lambda1 > 0 else cfg.lambda2
        c_prime = tail_constant(cfg.epsilon, ep.theta, ep.p, lam_for_tail)
        base = min(cfg.depths)
        base_pairs = [
            (r["weighted_energy"], r["orlicz_modular"])
            for r in rows
            if r["depth"] == base
        ]
        fit = fit_two_sided(base_pairs, cfg.lambda1, c_prime, base)
        ok = all(
            fit.check(r["weighted_energy"], r["orlicz_modular"], widen=2.0)
            for r in rows
        )
        report.extra_checks.append((f"two-sided fit C={fit.C:.4g}", ok))
        report.two_sided = fit
    return report


def verify_roundtrip(cfg: ExperimentConfig, tol: float = 1e-12) -> CheckReport:
    """trace(extend(u)) must reproduce u on every sample."""
    rows = []
    worst = 0.0
    for family in BOUNDARY_FAMILIES:
        for depth in cfg.depths:
            for seed in cfg.seeds:
                u = _boundary_sample(cfg, family, depth, seed)
                v = trace(extend(u))
                err = float(np.max(np.abs(v.values - u.values)))
                worst = max(worst, err)
                rows.append(
                    {"seed": seed, "depth": depth, "family": family, "max_error": err}
                )
    passed = worst <= tol
    return CheckReport(
        "roundtrip",
        passed,
        rows,
        [f"max roundtrip error {worst:.3g} (tolerance {tol:g})"],
    )


def verify_doubling(cfg: ExperimentConfig, seed: int = 0) -> CheckReport:
    """Sampled doubling ratios of the tree mass must be finite and their
    supremum stable (within factor 1.5) under two extra truncation levels."""
    base = min(cfg.depths)
    tp = cfg.tree_params(base)
    tp_deeper = cfg.tree_params(base + 2)
    centers, radii = sample_ball_centers(tp, cfg.n_balls, seed)
    r_base = doubling_ratios(tp, centers, radii)
    r_deep = doubling_ratios(tp_deeper, centers, radii)
    sup_base = float(r_base.max())
    sup_deep = float(r_deep.max())
    finite = bool(np.all(np.isfinite(r_base)) and np.all(np.isfinite(r_deep)))
    stable = sup_deep <= 1.5 * sup_base and sup_base <= 1.5 * sup_deep
    rows = [
        {
            "seed": seed,
            "depth": base,
            "n_balls": cfg.n_balls,
            "sup_ratio": sup_base,
            "sup_ratio_deeper": sup_deep,
        }
    ]
    return CheckReport(
        "doubling",
        finite and stable,
        rows,
        [
            f"sup ratio {sup_base:.4f} at depth {base}, {sup_deep:.4f} at depth {base + 2}"
        ],
    )


def verify_ahlfors(cfg: ExperimentConfig, tol: float = 1e-12) -> CheckReport:
    """The cell-mass to diameter^Q ratio must be level-independent."""
    depth = max(cfg.depths)
    tp = cfg.tree_params(depth)
    ratios = [
        ahlfors_ratio(tp, DyadicCell(cfg.K, (0,) * n)) for n in range(depth + 1)
    ]
    spread = max(ratios) / min(ratios) - 1.0
    rows = [{"seed": 0, "depth": n, "ratio": r} for n, r in enumerate(ratios)]
    return CheckReport(
        "ahlfors",
        spread <= tol,
        rows,
        [f"ratio spread over levels 0..{depth}: {spread:.3g} (tolerance {tol:g})"],
    )


_INT_FIELDS = {"K", "quad_order", "n_balls", "hajlasz_max_depth", "pair_budget", "mc_samples"}
_FLOAT_FIELDS = {
    "epsilon",
    "beta",
    "p",
    "lambda1",
    "lambda2",
    "lam",
    "theta",
    "slope_tol",
    "spread_max",
}
_LIST_FIELDS = {"seeds", "depths"}
_ALIASES = {"lambda": "lam", "N": "depths"}


def _parse_int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ".." in text:
        a, b = text.split("..")
        return tuple(range(int(a), int(b) + 1))
    return tuple(int(s) for s in text.split(",") if s.strip())


def load_config(path: str | None = None, **overrides) -> ExperimentConfig:
    """Build a config from a flat key-value file plus keyword overrides.

    File lines look like ``key = value``; '#' starts a comment.  Seed and
    depth lists accept either comma lists (``4,5,6``) or ranges (``0..19``).
    """
    values: dict = {}
    if path is not None:
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"bad config line: {raw.rstrip()}")
                key, _, text = line.partition("=")
                key = key.strip()
                key = _ALIASES.get(key, key)
                text = text.strip()
                if key in _INT_FIELDS:
                    values[key] = int(text)
                elif key in _FLOAT_FIELDS:
                    values[key] = float(text)
                elif key in _LIST_FIELDS:
                    values[key] = _parse_int_list(text)
                elif key == "emit_plot_data":
                    values[key] = text.lower() in ("1", "true", "yes")
                elif key in ("family", "out"):
                    values[key] = text
                else:
                    raise ValueError(f"unknown config key {key!r}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(ExperimentConfig)}
    bad = set(values) - known
    if bad:
        raise ValueError(f"unknown config keys: {sorted(bad)}")
    return ExperimentConfig(**values)
