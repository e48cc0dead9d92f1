"""Command-line front end.

Subcommands: gen (sample a function family to CSV), energy (norms and
energies of a boundary function), extend / trace (apply the operators to
CSV data), and verify (run one of the empirical checks; exit code 0 only
when every asserted property holds).  Geometry and exponents come from a
flat key-value config file, overridable with --seed / --depth.
"""

from __future__ import annotations

import argparse
import sys

from .boundary_norms import (
    BoundaryFunction,
    dyadic_energy,
    dyadic_orlicz_modular,
    lp_norm,
    orlicz_besov_norm,
    orlicz_norm,
)
from .harness import (
    BOUNDARY_FAMILIES,
    TREE_FAMILIES,
    generate,
    load_config,
    verify_ahlfors,
    verify_doubling,
    verify_equivalences,
    verify_extension_bound,
    verify_roundtrip,
    verify_trace_bound,
)
from .operators import extend, trace
from .tree_norms import TreeFunction

_VERIFY_DRIVERS = {
    "trace-bound": verify_trace_bound,
    "extension-bound": verify_extension_bound,
    "equivalence": verify_equivalences,
    "roundtrip": verify_roundtrip,
    "doubling": verify_doubling,
    "ahlfors": verify_ahlfors,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treetrace",
        description="dyadic norms and trace/extension operators on truncated regular trees",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--seed", type=int, help="replace the seed list with one seed")
    common.add_argument("--depth", type=int, help="replace the depth list with one depth")
    common.add_argument("--out", help="output path")
    common.add_argument(
        "--emit-plot-data",
        action="store_true",
        help="also write (depth, ratio) series next to the report",
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", parents=[common], help="sample a function family to CSV")
    p_gen.add_argument(
        "--family", choices=BOUNDARY_FAMILIES + TREE_FAMILIES, default="iid-uniform"
    )

    p_energy = sub.add_parser(
        "energy", parents=[common], help="norms and energies of a boundary function"
    )
    p_energy.add_argument("--input", required=True, help="boundary function CSV")

    p_extend = sub.add_parser(
        "extend", parents=[common], help="extend a boundary function to the tree"
    )
    p_extend.add_argument("--input", required=True, help="boundary function CSV")

    p_trace = sub.add_parser(
        "trace", parents=[common], help="trace a tree function to the boundary"
    )
    p_trace.add_argument("--input", required=True, help="tree function CSV")

    p_verify = sub.add_parser(
        "verify", parents=[common], help="run an empirical check"
    )
    p_verify.add_argument("check", choices=sorted(_VERIFY_DRIVERS))
    p_verify.add_argument("--family", help="function family for the sweep")
    return parser


def _config_from_args(args) -> "ExperimentConfig":
    overrides = {}
    if args.seed is not None:
        overrides["seeds"] = (args.seed,)
    if args.depth is not None:
        overrides["depths"] = (args.depth,)
    if getattr(args, "family", None):
        overrides["family"] = args.family
    if args.out:
        overrides["out"] = args.out
    if args.emit_plot_data:
        overrides["emit_plot_data"] = True
    return load_config(args.config, **overrides)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = _config_from_args(args)

    if args.command == "gen":
        seed = cfg.seeds[0]
        depth = cfg.depths[0]
        fn = generate(
            args.family,
            K=cfg.K,
            depth=depth,
            seed=seed,
            epsilon=cfg.epsilon,
            theta=cfg.resolved_theta,
        )
        out = cfg.out or "function.csv"
        fn.to_csv(out)
        kind = "tree" if args.family in TREE_FAMILIES else "boundary"
        print(f"wrote {kind} function ({args.family}, seed {seed}, depth {depth}) to {out}")
        return 0

    if args.command == "energy":
        f = BoundaryFunction.from_csv(args.input)
        phi = cfg.phi()
        ep = cfg.energy_params()
        values = {
            "lp_norm": lp_norm(f, cfg.p),
            "orlicz_norm": orlicz_norm(f, phi),
            "dyadic_energy": dyadic_energy(f, ep),
            "dyadic_orlicz_modular": dyadic_orlicz_modular(f, ep, phi),
            "orlicz_besov_norm": orlicz_besov_norm(f, ep, phi),
        }
        for key, val in values.items():
            print(f"{key} = {val:.12g}")
        if cfg.out:
            with open(cfg.out, "w", newline="") as fh:
                fh.write("quantity,value\n")
                for key, val in values.items():
                    fh.write(f"{key},{val:.17g}\n")
        return 0

    if args.command == "extend":
        u = BoundaryFunction.from_csv(args.input)
        out = cfg.out or "extension.csv"
        extend(u).to_csv(out)
        print(f"wrote extension to {out}")
        return 0

    if args.command == "trace":
        F = TreeFunction.from_csv(args.input)
        out = cfg.out or "trace.csv"
        trace(F).to_csv(out)
        print(f"wrote trace to {out}")
        return 0

    # verify
    report = _VERIFY_DRIVERS[args.check](cfg)
    for line in report.summary_lines():
        print(line)
    if cfg.out:
        report.to_csv(cfg.out)
        print(f"wrote report rows to {cfg.out}")
        if cfg.emit_plot_data and hasattr(report, "plot_data"):
            plot_path = cfg.out + ".plot.csv"
            report.plot_data(plot_path)
            print(f"wrote plot data to {plot_path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
