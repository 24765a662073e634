"""Command-line interface.

Subcommands: ``run`` (full experiment from a JSON config), ``simulate``
(write a synthetic dataset CSV), ``inspect`` (schema / missing-value /
class-count report for a data file).

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
failure.
"""

import os


def _apply_thread_cap() -> None:
    cap = os.environ.get("HEPAFLOW_THREADS", "").strip()
    if cap.isdigit() and int(cap) > 0:
        for var in (
            "OMP_NUM_THREADS",
            "OPENBLAS_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ.setdefault(var, cap)


_apply_thread_cap()  # must precede the first numpy import

import argparse
import json
import sys

from . import __version__
from .errors import ConfigError, DataError, NumericError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hepaflow",
        description="Chronic-liver-disease prediction pipeline "
        "(preprocessing, LDA/FA/t-SNE/UMAP chain, four classifiers).",
    )
    parser.add_argument("--version", action="version", version=f"hepaflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full experiment")
    p_run.add_argument("--config", help="JSON config file (defaults used when omitted)")
    p_run.add_argument("--seed", type=int, help="override the master seed")
    p_run.add_argument("--mode", choices=("faithful", "sound"), help="override the run mode")
    p_run.add_argument("--out", help="override the output directory")
    p_run.add_argument("--data", help="override the data path ('standin' for the bundled file)")

    p_sim = sub.add_parser("simulate", help="write a synthetic dataset CSV")
    p_sim.add_argument("--spec", help="JSON file with synthetic-spec fields (optional)")
    p_sim.add_argument("--out", required=True, help="output CSV path")

    p_inspect = sub.add_parser("inspect", help="report schema, missing values, class counts")
    p_inspect.add_argument("--data", required=True, help="CSV path ('standin' for the bundled file)")
    return parser


def _cmd_run(args) -> int:
    from .pipeline import config_from_dict, PipelineConfig, run
    from .reporting import emit_reports

    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        config = config_from_dict(raw)
    else:
        config = PipelineConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.mode:
        config.mode = args.mode
    if args.out:
        config.output_dir = args.out
    if args.data:
        config.data_path = args.data
    config.validate()

    report = run(config)
    manifest = emit_reports(report, config.output_dir)
    print(f"mode={report.mode} seed={report.seed} out={config.output_dir}")
    for name, protocols in report.metrics.items():
        for protocol, row in protocols.items():
            print(
                f"{name} [{protocol}] accuracy={row.accuracy:.4f} "
                f"precision={row.precision:.4f} recall={row.recall:.4f} "
                f"f1={row.f1:.4f} auc={row.auc:.4f} brier={row.brier:.4f}"
            )
    print(f"{len(manifest)} files written")
    return 0


def _cmd_simulate(args) -> int:
    from .dataset import dump_csv
    from .numerics import SeededRng
    from .preprocess import SyntheticSpec, generate_synthetic

    fields = {}
    if args.spec:
        try:
            with open(args.spec, "r", encoding="utf-8") as fh:
                fields = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read spec {args.spec}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"spec {args.spec} is not valid JSON: {exc}") from exc
        if not isinstance(fields, dict):
            raise ConfigError("synthetic spec must be a JSON object")
    known = SyntheticSpec().__dict__
    unknown = set(fields) - set(known)
    if unknown:
        raise ConfigError(f"unknown synthetic-spec keys: {sorted(unknown)}")
    spec = SyntheticSpec(**fields)
    data = generate_synthetic(spec, SeededRng(spec.seed))
    dump_csv(data, args.out)
    print(f"wrote {data.n_rows} rows x {data.n_features} features to {args.out}")
    return 0


def _cmd_inspect(args) -> int:
    from .dataset import class_counts, load_ilpd, resolve_data_path

    data, missing = load_ilpd(resolve_data_path(args.data))
    zeros, ones = class_counts(data)
    print(f"rows: {data.n_rows}")
    print(f"features: {data.n_features} ({', '.join(data.feature_names)})")
    for name in data.feature_names:
        if missing.get(name):
            print(f"missing {name}: {missing[name]}")
    total_missing = sum(missing.values())
    if total_missing == 0:
        print("missing: none")
    print(f"class counts: absent(0)={zeros} present(1)={ones}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "simulate": _cmd_simulate, "inspect": _cmd_inspect}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
