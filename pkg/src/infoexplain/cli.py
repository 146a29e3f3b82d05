"""Command-line interface.

Subcommands:

  synth       sample a synthetic model to CSV, with an analytic truth sidecar
  explain     select an explanation support from a sample CSV
  mi-table    tabulate conditional MI for every support up to a budget
  experiment  run the image patch-regression pipeline

Exit codes: 0 success, 1 usage/validation, 2 data, 3 solver. All outputs are
deterministic given the flags and input files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ._version import __version__
from .errors import ConfigError, InfoExplainError
from .dataio import load_samples_csv, write_pgm, write_samples_csv
from .experiment import (
    ExperimentConfig,
    NeighborhoodGeometry,
    Rect,
    experiment_mi_table,
    run_experiment,
    support_mask,
)
from .explain import METHODS, default_method, explain_fit
from .mi import (
    MAX_ENUMERATION_DIM,
    conditional_mi,
    mi_table,
    mi_table_rows,
)
from .model import (
    RNG_NAME,
    ExplanationSupport,
    GaussianModel,
    analytic_moments,
    empirical_moments,
    sample,
)
from .regression import SolverConfig
from .search import optimal_support_exhaustive, optimal_support_greedy


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write_text(path_or_dash, text: str) -> None:
    if path_or_dash in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path_or_dash).write_text(text)


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        # tomllib error messages include line and column
        raise ConfigError(f"{path}: {exc}") from exc


def _model_from_toml(path: str) -> GaussianModel:
    doc = _load_toml(path)
    section = doc.get("model")
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: missing [model] section")
    try:
        w = np.asarray(section["w"], dtype=float)
        v = np.asarray(section["v"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: [model] needs numeric lists w and v") from exc
    cov_spec = section.get("cov", "identity")
    n = int(section.get("n", len(w)))
    if isinstance(cov_spec, str):
        if cov_spec != "identity":
            raise ConfigError(
                f"{path}: cov shorthand must be 'identity', got {cov_spec!r}"
            )
        cov = np.eye(n)
    elif isinstance(cov_spec, dict):
        diag = cov_spec.get("diag")
        if diag is None:
            raise ConfigError(f"{path}: cov table must carry a 'diag' list")
        cov = np.diag(np.asarray(diag, dtype=float))
    else:
        cov = np.asarray(cov_spec, dtype=float)
    return GaussianModel(cov, w, v)


def _solver_config(doc: dict) -> SolverConfig:
    section = doc.get("solver", {})
    defaults = SolverConfig()
    return SolverConfig(
        tol=float(section.get("tol", defaults.tol)),
        max_sweeps=int(section.get("max_sweeps", defaults.max_sweeps)),
        path_points=int(section.get("path_points", defaults.path_points)),
        path_ratio=float(section.get("path_ratio", defaults.path_ratio)),
        standardize=bool(section.get("standardize", defaults.standardize)),
    )


def _mi_entry_json(support, mi) -> dict:
    return {
        "support": list(support.indices),
        "mi_nats": "inf" if mi.is_infinite else mi.nats,
        "cond_var": mi.denominator_var,
    }


def cmd_synth(args) -> int:
    model = _model_from_toml(args.model)
    if args.n is not None and args.n != model.n:
        raise ConfigError(
            f"--n {args.n} contradicts the model file (n={model.n})"
        )
    samples = sample(model, args.m, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_samples_csv(samples, out / "samples.csv")

    moments = analytic_moments(model)
    warnings = []
    if model.n <= MAX_ENUMERATION_DIM:
        result = optimal_support_exhaustive(moments, args.s, threads=args.threads)
        table = [
            _mi_entry_json(sup, mi)
            for sup, mi in mi_table(moments, args.s, threads=args.threads)
        ]
    else:
        result = optimal_support_greedy(moments, args.s)
        table = None
        warnings.append(
            f"DimensionTooLarge: mi_table omitted, n={model.n} exceeds the "
            f"enumeration cap {MAX_ENUMERATION_DIM}"
        )
        print(f"warning: {warnings[-1]}", file=sys.stderr)
    truth = {
        "schema_version": 1,
        "tool_version": __version__,
        "rng": {"name": RNG_NAME, "seed": args.seed},
        "model": {"n": model.n, "w": list(model.w), "v": list(model.v)},
        "m": args.m,
        "s": args.s,
        "optimal": result.to_json_dict(),
        "mi_table": table,
        "warnings": warnings,
    }
    (out / "truth.json").write_text(_json_text(truth))
    return 0


def cmd_explain(args) -> int:
    samples = load_samples_csv(args.samples)
    method = args.method or default_method(samples.n)
    config = SolverConfig(
        tol=args.tol,
        max_sweeps=args.max_sweeps,
        path_points=args.path_points,
        path_ratio=args.path_ratio,
        standardize=args.standardize,
    )
    fit = explain_fit(samples, args.s, method, config)
    support = ExplanationSupport(fit.support, budget=args.s)
    mi = conditional_mi(empirical_moments(samples), support)
    report = {
        "schema_version": 1,
        "tool_version": __version__,
        "method": method,
        "n": samples.n,
        "m": samples.m,
        "s": args.s,
        "support": list(support.indices),
        "fit": fit.to_json_dict(),
        "mi_nats": "inf" if mi.is_infinite else mi.nats,
        "cond_var_given_u": mi.numerator_var,
        "cond_var_given_u_support": mi.denominator_var,
    }
    _write_text(args.out, _json_text(report))
    return 0


def cmd_mi_table(args) -> int:
    if (args.model is None) == (args.samples is None):
        raise ConfigError("give exactly one of --model or --samples")
    if args.model is not None:
        moments = analytic_moments(_model_from_toml(args.model))
    else:
        moments = empirical_moments(load_samples_csv(args.samples))
    entries = mi_table(moments, args.s, threads=args.threads)
    lines = [",".join(row) for row in mi_table_rows(entries)]
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def _experiment_config(path: str) -> ExperimentConfig:
    doc = _load_toml(path)
    section = doc.get("experiment")
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: missing [experiment] section")
    geo_section = section.get("geometry")
    if geo_section is None:
        geometry = None
    else:
        try:
            geometry = NeighborhoodGeometry(
                Rect(*(int(x) for x in geo_section["rect1"])),
                Rect(*(int(x) for x in geo_section["rect2"])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(
                f"{path}: geometry needs rect1/rect2 as [row_off, col_off, "
                f"height, width]"
            ) from exc
    try:
        kwargs = {
            "image_path": str(section["image"]),
            "s": int(section["s"]),
        }
    except KeyError as exc:
        raise ConfigError(f"{path}: [experiment] needs {exc.args[0]!r}") from exc
    if geometry is not None:
        kwargs["geometry"] = geometry
    for key, cast in (("stride", int), ("method", str), ("ridge", float),
                      ("seed", int), ("degenerate_tol", float)):
        if key in section:
            kwargs[key] = cast(section[key])
    kwargs["solver"] = _solver_config(doc)
    return ExperimentConfig(**kwargs)


def cmd_experiment(args) -> int:
    config = _experiment_config(args.config)
    report = run_experiment(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(_json_text(report.to_json_dict()))
    write_pgm(support_mask(config.geometry, report.support), out / "mask.pgm")
    if report.n <= MAX_ENUMERATION_DIM and not report.degenerate:
        entries = experiment_mi_table(report.samples, config.s, threads=args.threads)
        lines = [",".join(row) for row in mi_table_rows(entries)]
        (out / "mi_table.csv").write_text("\n".join(lines) + "\n")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="infoexplain",
        description="Information-optimal personalized explanations for "
                    "linear-Gaussian predictions.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="random seed (used where sampling happens)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for enumeration (results do not "
                             "depend on this)")
    common.add_argument("--version", action="version",
                        version=f"infoexplain {__version__}")

    p = sub.add_parser("synth", parents=[common],
                       help="sample a synthetic model to CSV plus truth sidecar")
    p.add_argument("--model", required=True, help="model TOML file")
    p.add_argument("--n", type=int, default=None,
                   help="expected feature dimension (checked against the model)")
    p.add_argument("--m", type=int, required=True, help="number of samples")
    p.add_argument("--s", type=int, default=2, help="sparsity budget for the sidecar")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("explain", parents=[common],
                       help="select an explanation support from samples")
    p.add_argument("--samples", required=True, help="samples CSV file")
    p.add_argument("--s", type=int, required=True, help="sparsity budget")
    p.add_argument("--method", choices=METHODS, default=None)
    p.add_argument("--out", default="-", help="report JSON path (default stdout)")
    p.add_argument("--tol", type=float, default=SolverConfig.tol)
    p.add_argument("--max-sweeps", dest="max_sweeps", type=int,
                   default=SolverConfig.max_sweeps)
    p.add_argument("--path-points", dest="path_points", type=int,
                   default=SolverConfig.path_points)
    p.add_argument("--path-ratio", dest="path_ratio", type=float,
                   default=SolverConfig.path_ratio)
    p.add_argument("--standardize", action="store_true")
    p.set_defaults(fn=cmd_explain)

    p = sub.add_parser("mi-table", parents=[common],
                       help="conditional MI for every support up to a budget")
    p.add_argument("--model", default=None, help="model TOML (analytic table)")
    p.add_argument("--samples", default=None, help="samples CSV (empirical table)")
    p.add_argument("--s", type=int, required=True, help="maximum support size")
    p.add_argument("--out", default="-", help="CSV path (default stdout)")
    p.set_defaults(fn=cmd_mi_table)

    p = sub.add_parser("experiment", parents=[common],
                       help="run the image patch-regression pipeline")
    p.add_argument("--config", required=True, help="experiment TOML file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InfoExplainError as exc:
        stage = getattr(exc, "stage", None)
        prefix = f"[{stage}] " if stage else ""
        print(f"infoexplain {args.command}: error: {prefix}{exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
