"""Command line: ``cdp generate``, ``cdp run`` and ``cdp certify``.

Exit codes: 0 success, 2 usage or degenerate input, 3 empty admissible set.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import evaluate_baseline, pca_fit
from .certificates import read_certificates_csv, write_certificates_csv
from .datasets import KINDS, DatasetSpec, PointCloud, generate, load_csv, save_csv, write_csv
from .errors import CDPError, EmptyAdmissibleSetError
from .graph import write_edges_csv
from .metrics import nearest_rank, percent
from .pipeline import cdp_projection, evaluate, prepare
from .svg import write_scatter_svg

EXIT_OK, EXIT_DEGENERATE, EXIT_EMPTY = 0, 2, 3

OUTPUT_FILES = ("points.csv", "projected.csv", "certificates.csv", "report.txt", "scatter.svg")


@dataclass
class RunConfig:
    out: Path
    input: Path | None = None
    spec: DatasetSpec | None = None
    k_nn: int = 10
    tau: float = 0.8
    k: int = 2
    standardize: bool = True
    method: str = "cdp"
    emit_edges: bool = False


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _unit_open(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"tau must lie in (0, 1), got {value}")
    return value


def _param(text):
    """``NAME=VALUE`` with a number or comma-separated numbers (e.g. ``obstacle_center=2,0``)."""
    name, sep, raw = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        values = tuple(float(v) for v in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {name} needs numeric values, got {raw!r}")
    return name.strip(), values[0] if len(values) == 1 else values


def _add_generator_flags(p):
    p.add_argument("--n", type=_positive_int, default=1000, help="number of points (ignored by toy5)")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=VALUE",
                   help="generator shape parameter, repeatable (e.g. --param minor_radius=0.3)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdp", description="Convexity-driven projection of point clouds")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic point cloud as CSV")
    gen.add_argument("--kind", choices=KINDS, required=True, help="synthetic dataset")
    _add_generator_flags(gen)
    gen.add_argument("--out", type=Path, help="output CSV (default: stdout)")

    run = sub.add_parser("run", help="project a cloud and certify the result")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="input CSV")
    src.add_argument("--kind", choices=KINDS, help="synthetic dataset instead of --input")
    _add_generator_flags(run)
    run.add_argument("--knn", type=_positive_int, default=10, help="mutual k-NN neighbourhood size")
    run.add_argument("--tau", type=_unit_open, default=0.8, help="admissibility threshold in (0, 1)")
    run.add_argument("--k", type=_positive_int, default=2, help="target dimension")
    run.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=True)
    run.add_argument("--method", choices=("cdp", "pca"), default="cdp")
    run.add_argument("--out", type=Path, required=True, help="output directory")
    run.add_argument("--emit-edges", action="store_true", help="also write edges.csv")

    cert = sub.add_parser("certify", help="summarize certificates of an existing run directory")
    cert.add_argument("directory", type=Path)
    return parser


def cmd_generate(spec: DatasetSpec, out_path: Path | None) -> None:
    cloud = generate(spec)
    if out_path is None:
        write_csv(cloud, sys.stdout)
    else:
        save_csv(cloud, out_path)


def _load_input(config: RunConfig) -> PointCloud:
    if config.input is not None:
        return load_csv(config.input)
    return generate(config.spec)


def cmd_run(config: RunConfig) -> str:
    """Execute the pipeline and write the run directory; returns a short summary."""
    cloud = _load_input(config)
    if not 1 <= config.k < cloud.d:
        raise CDPError(f"--k must satisfy 1 <= k < d={cloud.d}, got {config.k}")
    if not 1 <= config.k_nn < cloud.n:
        raise CDPError(f"--knn must satisfy 1 <= knn < N={cloud.n}, got {config.k_nn}")

    prep = prepare(cloud, config.k_nn, config.tau, config.standardize)
    if config.method == "pca":
        ev = evaluate_baseline(pca_fit(prep.cloud, config.k), prep)
    else:
        ev = evaluate(prep, cdp_projection(prep, config.k), "cdp")

    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    labels = prep.labels()
    save_csv(cloud, out / "points.csv")
    save_csv(ev.projected, out / "projected.csv")
    write_certificates_csv(ev.certificates, out / "certificates.csv", labels)
    (out / "report.txt").write_text(ev.report.to_text())
    edges = list(zip(prep.graph.u.tolist(), prep.graph.v.tolist())) if cloud.n <= 200 else None
    write_scatter_svg(out / "scatter.svg", ev.projected.points, color=ev.projected.color,
                      title=f"{config.method.upper()} projection (k={config.k})",
                      labels=ev.projected.names, edges=edges)
    if config.emit_edges:
        write_edges_csv(prep.graph, out / "edges.csv", labels)

    rep = ev.report
    lines = [
        f"method={rep.method} n={cloud.n} kept={prep.cloud.n} admissible={rep.n_admissible}",
        f"c_sp={rep.c_sp:.4f} mu_k={rep.mu_k:.4f} phi_g={rep.phi_g:.5f}",
        f"fixed: c_sp'={rep.c_sp_prime:.4f} error={percent(rep.fixed_error)}",
        f"reselected: n={rep.n_reselected} c_sp''="
        + ("undefined" if rep.c_sp_dprime is None else f"{rep.c_sp_dprime:.4f} error={percent(rep.reselected_error)}"),
        f"certificates hold: {rep.certificates['n_hold']}/{rep.certificates['n_certified']}",
    ]
    lines += [f"warning: {w}" for w in rep.warnings]
    return "\n".join(lines) + "\n"


def cmd_certify(directory: Path) -> str:
    """Summarize ``certificates.csv`` of a run directory without recomputing anything upstream."""
    path = Path(directory) / "certificates.csv"
    if not Path(directory).is_dir():
        raise CDPError(f"{directory}: no such run directory")
    if not path.is_file():
        raise CDPError(f"{directory}: certificates.csv not found")
    c = read_certificates_csv(path)
    ratio = c["r_tilde"] / c["r"]
    q10 = nearest_rank(c["psi"], 0.10)
    q90 = nearest_rank(c["inv_phi_star"], 0.90)
    c_sp = float(np.mean(c["r"]))
    c_prime = float(np.mean(c["r_tilde"]))
    lower, upper = ratio >= q10, ratio <= q90
    return "".join([
        f"pairs={ratio.size} hold={int(c['holds'].sum())}\n",
        f"c_sp={c_sp:.4f} c_sp'={c_prime:.4f} fixed_error={percent(abs(c_sp - c_prime) / c_sp)}\n",
        f"q10(psi)={q10:.4f} ≤ r̃/r ≤ q90(1/phi*)={q90:.4f} for ≥90% of pairs per side\n",
        f"coverage lower={lower.mean():.4f} upper={upper.mean():.4f} joint={(lower & upper).mean():.4f}\n",
    ])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "generate":
            cmd_generate(DatasetSpec(args.kind, args.n, args.seed, dict(args.param)), args.out)
        elif args.command == "run":
            if args.param and not args.kind:
                parser.error("--param applies to --kind generators only")
            spec = DatasetSpec(args.kind, args.n, args.seed, dict(args.param)) if args.kind else None
            config = RunConfig(args.out, args.input, spec, args.knn, args.tau, args.k, args.standardize,
                               args.method, args.emit_edges)
            sys.stdout.write(cmd_run(config))
        else:
            sys.stdout.write(cmd_certify(args.directory))
    except EmptyAdmissibleSetError as exc:
        print(f"cdp: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (CDPError, OSError) as exc:
        print(f"cdp: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
