import math

import numpy as np
import pytest

from treetrace import (
    BoundaryFunction,
    TreeFunction,
    generate,
    indicator_function,
    load_config,
    verify_ahlfors,
    verify_doubling,
    verify_equivalences,
    verify_extension_bound,
    verify_roundtrip,
    verify_trace_bound,
)
from treetrace.cli import main
from treetrace.harness import ExperimentConfig, fit_log_slope, tail_constant

LN2 = math.log(2.0)


# ----------------------------------------------------------------- generators


def test_indicator_function_hand_case():
    f = indicator_function(2, 2, (0, 0))
    assert list(f.values) == [1.0, 0.0, 0.0, 0.0]


def test_generate_deterministic():
    a = generate("iid-uniform", K=2, depth=4, seed=7)
    b = generate("iid-uniform", K=2, depth=4, seed=7)
    assert np.array_equal(a.values, b.values)
    c = generate("iid-uniform", K=2, depth=4, seed=8)
    assert not np.array_equal(a.values, c.values)


def test_generate_ranges_and_types():
    f = generate("iid-uniform", K=2, depth=5, seed=0)
    assert isinstance(f, BoundaryFunction)
    assert np.all((f.values >= 0) & (f.values <= 1))
    g = generate("cell-indicator", K=3, depth=3, seed=1)
    assert set(np.unique(g.values)) <= {0.0, 1.0} and g.values.max() == 1.0
    h = generate("lacunary", K=2, depth=4, seed=2, epsilon=LN2, theta=0.5)
    assert isinstance(h, BoundaryFunction)
    F = generate("extension-of-boundary", K=2, depth=3, seed=3)
    assert isinstance(F, TreeFunction)
    G = generate("random-vertex", K=2, depth=3, seed=4)
    assert isinstance(G, TreeFunction)


def test_generate_unknown_family():
    with pytest.raises(ValueError, match="unknown family"):
        generate("bogus", K=2, depth=3, seed=0)


def test_lacunary_needs_scale_arguments():
    with pytest.raises(ValueError):
        generate("lacunary", K=2, depth=3, seed=0)


# -------------------------------------------------------------- configuration


def test_config_defaults_and_derived():
    cfg = ExperimentConfig()
    assert cfg.resolved_theta == pytest.approx(0.5)
    assert cfg.resolved_lam == 0.0
    cfg.validate_trace_hypotheses()


def test_config_rejects_bad_hypotheses():
    with pytest.raises(ValueError, match="theta"):
        ExperimentConfig(theta=0.7).validate_trace_hypotheses()
    # p too small for the codimension
    with pytest.raises(ValueError, match="p >"):
        ExperimentConfig(p=1.0).validate_trace_hypotheses()
    with pytest.raises(ValueError, match="lambda1"):
        ExperimentConfig(p=1.0, beta=1.5 * LN2, lambda1=-1.0).validate_trace_hypotheses()
    with pytest.raises(ValueError, match="lam"):
        ExperimentConfig(lambda1=1.0, lam=0.0).validate_equivalence_hypotheses()


def test_config_file_parsing(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text(
        "# geometry\nK = 2\nepsilon = 0.6931471805599453\n"
        "beta = 1.0397207708399179\np = 2\nlambda1 = 1.0\nlambda = 1.0\n"
        "seeds = 0..3\ndepths = 3,4\nfamily = lacunary\nemit_plot_data = true\n"
    )
    cfg = load_config(str(path))
    assert cfg.seeds == (0, 1, 2, 3)
    assert cfg.depths == (3, 4)
    assert cfg.lam == 1.0
    assert cfg.family == "lacunary"
    assert cfg.emit_plot_data
    # overrides win
    cfg2 = load_config(str(path), seeds=(9,), out="x.csv")
    assert cfg2.seeds == (9,) and cfg2.out == "x.csv"


def test_config_file_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("frobnicate = 1\n")
    with pytest.raises(ValueError, match="unknown config key"):
        load_config(str(path))


def test_fit_log_slope_recovers_exponent():
    depths = [4, 5, 6, 7] * 3
    ratios = [math.exp(0.05 * d) for d in depths]
    assert fit_log_slope(depths, ratios) == pytest.approx(0.05, abs=1e-12)
    assert fit_log_slope([4, 4, 4], [1.0, 2.0, 3.0]) == 0.0


def test_tail_constant_matches_direct_sum():
    eps, theta, p, lam = LN2, 0.5, 2.0, 1.0
    q = math.exp(eps * p * (theta - 1.0) / 2.0)
    direct = sum(q**n * n**lam for n in range(1, 4000))
    assert tail_constant(eps, theta, p, lam) == pytest.approx(direct, rel=1e-12)


# ------------------------------------------------------------------- drivers


def small_cfg(**kw):
    base = dict(seeds=(0, 1, 2), depths=(3, 4, 5))
    base.update(kw)
    return ExperimentConfig(**base)


def test_trace_bound_report_passes():
    report = verify_trace_bound(small_cfg())
    assert report.passed
    st = report.stats("ratio")
    assert st.count == 9 and st.finite
    assert set(st.per_depth) == {3, 4, 5}


def test_trace_bound_rejects_boundary_family():
    with pytest.raises(ValueError, match="tree-function family"):
        verify_trace_bound(small_cfg(family="iid-uniform"))


def test_extension_bound_report_passes():
    report = verify_extension_bound(small_cfg(family="lacunary"))
    assert report.passed
    assert {"ratio", "energy_ratio"} <= set(report.ratio_columns)


def test_extension_bound_rejects_tree_family():
    with pytest.raises(ValueError, match="boundary family"):
        verify_extension_bound(small_cfg(family="random-vertex"))


def test_equivalence_report_with_two_sided_fit():
    report = verify_equivalences(small_cfg(lambda1=1.0))
    assert report.passed
    assert report.two_sided.C >= 1.0
    rows_with_chi = [r for r in report.rows if 0.0 <= r["chi_fraction"] <= 1.0]
    assert len(rows_with_chi) == len(report.rows)


def test_equivalence_skips_hajlasz_beyond_cap():
    report = verify_equivalences(small_cfg(depths=(3, 4), hajlasz_max_depth=3))
    vals = [r["hajlasz_energy"] for r in report.rows if r["depth"] == 4]
    assert all(v is None for v in vals)


def test_roundtrip_doubling_ahlfors_drivers():
    assert verify_roundtrip(small_cfg(seeds=(0, 1), depths=(3, 4))).passed
    assert verify_doubling(ExperimentConfig(depths=(4,), n_balls=100)).passed
    assert verify_ahlfors(ExperimentConfig(K=3, beta=2.5, epsilon=1.0)).passed


def test_report_csv_bytes_reproducible(tmp_path):
    cfg = small_cfg(seeds=(0, 1), depths=(3, 4))
    p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    verify_extension_bound(cfg).to_csv(p1)
    verify_extension_bound(cfg).to_csv(p2)
    assert p1.read_bytes() == p2.read_bytes()
    header = p1.read_text().splitlines()[0]
    assert header.startswith("seed,depth,family")


def test_report_plot_data(tmp_path):
    report = verify_trace_bound(small_cfg(seeds=(0,), depths=(3, 4)))
    out = tmp_path / "plot.csv"
    report.plot_data(out)
    lines = out.read_text().splitlines()
    assert lines[0] == "series,depth,value"
    assert len(lines) == 1 + 2  # one series, two depths


# ------------------------------------------------------------------ CLI layer


def test_cli_gen_energy_extend_trace(tmp_path):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("K = 2\nseeds = 0\ndepths = 3\n")
    u_path = tmp_path / "u.csv"
    assert main(["gen", "--config", str(cfg), "--family", "iid-uniform",
                 "--out", str(u_path)]) == 0
    assert u_path.exists()
    assert main(["energy", "--config", str(cfg), "--input", str(u_path)]) == 0
    F_path = tmp_path / "F.csv"
    assert main(["extend", "--config", str(cfg), "--input", str(u_path),
                 "--out", str(F_path)]) == 0
    back_path = tmp_path / "back.csv"
    assert main(["trace", "--config", str(cfg), "--input", str(F_path),
                 "--out", str(back_path)]) == 0
    a = BoundaryFunction.from_csv(u_path)
    b = BoundaryFunction.from_csv(back_path)
    assert np.array_equal(a.values, b.values)


def test_constant_tree_function_ratio_finite():
    # both sides of the trace comparison reduce to norms of constants
    from treetrace import TreeFunction, YoungPhi, newtonian_norm
    from treetrace import orlicz_besov_norm, trace

    cfg = ExperimentConfig()
    tp = cfg.tree_params(4)
    F = TreeFunction(2, 4, [np.full(2**n, 3.0) for n in range(5)])
    phi = YoungPhi(2.0)
    num = orlicz_besov_norm(trace(F), cfg.energy_params(), phi)
    den = newtonian_norm(F, tp, phi)
    assert 0 < num / den < math.inf


def test_cli_verify_failure_exit_code(tmp_path):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("seeds = 0,1\ndepths = 3,4\nslope_tol = 0.000001\n")
    assert main(["verify", "trace-bound", "--config", str(cfg)]) == 1


def test_cli_verify_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("K = 2\nseeds = 0,1\ndepths = 3,4\nn_balls = 60\n")
    out = tmp_path / "report.csv"
    code = main(["verify", "roundtrip", "--config", str(cfg), "--out", str(out),
                 "--emit-plot-data"])
    assert code == 0
    assert out.exists()
    assert "PASS" in capsys.readouterr().out
    assert main(["verify", "doubling", "--config", str(cfg)]) == 0
    assert main(["verify", "ahlfors", "--config", str(cfg)]) == 0
    assert main(["verify", "extension-bound", "--config", str(cfg),
                 "--out", str(tmp_path / "ext.csv"), "--emit-plot-data"]) == 0
    assert (tmp_path / "ext.csv.plot.csv").exists()
