"""Command-line entry points.

Subcommands: generate (rule set + hierarchy documents), sweep and compare
(delimited experiment tables), demo-labeler (synthetic black-box predictions),
export (dataset/scheme document), serve (HTTP explorer backend). Every run is
reproducible from its flags plus --seed. Exit codes: 0 success, 1 runtime
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import analysis, serialize
from .extraction import Constraints, rule_text
from .forest import ForestConfig
from .labeler import demo_labels
from .pipeline import generate
from .tabular import compute_binning, discretize, load_dataset


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="delimited data table with a header row")
    p.add_argument("--preds", required=True, help="black-box predictions, one per data row")
    p.add_argument("--label-col", required=True, help="name of the true-label column")
    p.add_argument("--delimiter", default=",", help="table delimiter (default ',')")


def _add_forest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-trees", type=int, default=100, help="forest size (default 100)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")


def _load(args):
    return load_dataset(args.data, args.label_col, args.preds, delimiter=args.delimiter)


def _load_table_only(args):
    """Ingest the table alone, standing in the true labels for predictions."""
    from .tabular import _read_table

    header, body = _read_table(args.data, args.delimiter)
    if args.label_col not in header:
        raise ValueError(f"label column {args.label_col!r} not in header")
    li = header.index(args.label_col)
    with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as fh:
        fh.write("\n".join(row[li] for row in body) + "\n")
        tmp = fh.name
    try:
        return load_dataset(args.data, args.label_col, tmp, delimiter=args.delimiter)
    finally:
        Path(tmp).unlink(missing_ok=True)


def _cmd_generate(args) -> int:
    dataset = _load(args)
    constraints = Constraints(
        min_fidelity=args.min_fidelity,
        min_coverage=args.min_coverage,
        max_num_condition=args.max_conditions,
        num_bin=args.num_bins,
    )
    config = ForestConfig(n_trees=args.n_trees, rng_seed=args.seed)
    result = generate(dataset, constraints, config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "document.json").write_text(serialize.dumps(serialize.generate_document(result)))
    listing = [rule_text(r, result.data, m) for r, m in result.minimal.rules]
    (out / "rules.txt").write_text("\n".join(listing) + ("\n" if listing else ""))

    print(f"number_of_rules={result.number_of_rules} "
          f"set_coverage={result.set_coverage:.4f} "
          f"pool_size={len(result.pool)} "
          f"elapsed={result.response_time:.3f}s")
    return 0


def _cmd_sweep(args) -> int:
    dataset = _load(args)
    grid = analysis.SweepGrid()
    if args.grid_spec:
        spec = json.loads(Path(args.grid_spec).read_text())
        unknown = set(spec) - {"num_bin", "min_coverage", "max_num_condition", "min_fidelity"}
        if unknown:
            raise ValueError(f"unknown grid-spec keys: {sorted(unknown)}")
        grid = analysis.SweepGrid(**{k: tuple(v) for k, v in spec.items()})
    config = ForestConfig(n_trees=args.n_trees, rng_seed=args.seed)
    result = analysis.run_sweep(dataset, grid, config, base_seed=args.seed,
                                workers=args.workers, cell_timeout=args.cell_timeout)
    Path(args.out).write_text(analysis.sweep_table(result))
    print(f"wrote {len(result.rows)} sweep rows over {len(result.cells)} pipeline runs to {args.out}")
    return 0


def _cmd_compare(args) -> int:
    dataset = _load(args)
    config = ForestConfig(n_trees=args.n_trees, rng_seed=args.seed)
    report = analysis.compare_hsr_sdt(dataset, max_length=args.max_length, forest_config=config)
    Path(args.out).write_text(analysis.comparison_table(report))
    print(f"wrote {len(report.rows)} comparison rows to {args.out}")
    return 0


def _cmd_demo_labeler(args) -> int:
    dataset = _load_table_only(args)
    labels = demo_labels(dataset, args.rule, noise=args.noise, seed=args.seed)
    Path(args.out).write_text("\n".join(str(int(v)) for v in labels) + "\n")
    suffix = "" if args.noise == 0 else f" (noise={args.noise})"
    print(f"wrote {len(labels)} predictions to {args.out}{suffix}")
    return 0


def _cmd_export(args) -> int:
    dataset = _load(args)
    scheme = compute_binning(dataset, args.num_bins)
    discretize(dataset, scheme)  # validates the pairing before export
    Path(args.out).write_text(serialize.dumps(serialize.dataset_document(dataset, scheme)))
    print(f"wrote dataset document ({dataset.n} rows, {dataset.d} features) to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceSettings, create_app
    settings = ServiceSettings(
        data_dir=Path(args.data_dir).resolve() if args.data_dir else None,
        session_cap=args.session_cap,
        time_budget=args.time_budget,
        default_seed=args.seed,
        ui_dir=Path(args.ui_dir).resolve() if args.ui_dir else None,
    )
    uvicorn.run(create_app(settings), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rulespace",
        description="Describe a black-box classifier with a hierarchical surrogate rule set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="extract, minimize, and organize rules")
    _add_data_args(p)
    p.add_argument("--min-fidelity", type=float, default=0.85)
    p.add_argument("--min-coverage", type=int, default=5)
    p.add_argument("--max-conditions", type=int, default=3)
    p.add_argument("--num-bins", type=int, default=3)
    _add_forest_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("sweep", help="parameter sensitivity sweep")
    _add_data_args(p)
    p.add_argument("--grid-spec", help="JSON file with per-parameter value lists")
    p.add_argument("--workers", type=int, default=0, help="parallel worker processes")
    p.add_argument("--cell-timeout", type=float, default=None,
                   help="per-cell time budget in seconds; timed-out cells are recorded missing")
    _add_forest_args(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("compare", help="forest rules vs single surrogate tree")
    _add_data_args(p)
    p.add_argument("--max-length", type=int, default=10)
    _add_forest_args(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("demo-labeler", help="label rows with a boolean expression plus noise")
    p.add_argument("--data", required=True, help="delimited data table with a header row")
    p.add_argument("--label-col", required=True,
                   help="true-label column (excluded from expression features)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--rule", required=True,
                   help="boolean expression over raw features, e.g. 'Glucose > 140 and BMI <= 30'")
    p.add_argument("--noise", type=float, default=0.0, help="per-row flip probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="predictions file to write (one label per line)")
    p.set_defaults(func=_cmd_demo_labeler)

    p = sub.add_parser("export", help="write the dataset + binning scheme document")
    _add_data_args(p)
    p.add_argument("--num-bins", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    # serve flags fall back to RULESPACE_* environment variables
    env = os.environ
    p = sub.add_parser("serve", help="run the explorer HTTP service")
    p.add_argument("--host", default=env.get("RULESPACE_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(env.get("RULESPACE_PORT", 8718)))
    p.add_argument("--data-dir", default=env.get("RULESPACE_DATA_DIR"),
                   help="directory server-side dataset paths resolve under")
    p.add_argument("--session-cap", type=int, default=int(env.get("RULESPACE_SESSION_CAP", 32)))
    p.add_argument("--time-budget", type=float,
                   default=float(env.get("RULESPACE_TIME_BUDGET", 60.0)),
                   help="per-request generation budget in seconds")
    p.add_argument("--seed", type=int, default=int(env.get("RULESPACE_SEED", 0)))
    p.add_argument("--ui-dir", default=env.get("RULESPACE_UI_DIR"),
                   help="static frontend directory to serve at /")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, TimeoutError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
