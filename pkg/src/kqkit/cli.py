"""Command-line interface.

Subcommands:
    analyze  - metrics for every layer of a dump manifest
    select   - choose distillation layers from metrics or a manifest
    distill  - run a recipe-by-seed training matrix from a config file
    report   - render a results file into markdown and a chart

Every command writes a ``report.json`` run record next to its outputs. The
environment variable KQKIT_THREADS bounds analyze's layer-level parallelism.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .distill import run_experiment
from .metrics import analyze_layer, metrics_from_dict, metrics_to_dict
from .select import CRITERIA, select_topk, stage_end_selection, variant_select
from .store import ManifestEntry, load_manifest, read_dump, resolve_dump_path, validate_manifest
from .svg import bar_chart, line_chart

METRIC_COLORS = {"S": "#1f4e8c", "I": "#7fb3e0", "E": "#d62728", "Q": "#7f7f7f"}
CSV_FIELDS = [
    "layer", "S", "I", "E", "Q",
    "avgDPW", "avgDPB", "minDPW", "minDistB", "avgNorm",
    "avgSVDE", "embedDim", "diagnostics",
]


class CliError(Exception):
    """User-facing failure; maps to exit code 2."""


def _thread_count() -> int:
    raw = os.environ.get("KQKIT_THREADS", "")
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise CliError(f"KQKIT_THREADS must be an integer, got {raw!r}") from exc
        if n < 1:
            raise CliError("KQKIT_THREADS must be at least 1")
        return n
    return os.cpu_count() or 1


def _config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _write_run_report(out_dir: Path, command: str, config: dict, seeds: list[int], outputs: list[str], started: float) -> None:
    _write_json(
        out_dir / "report.json",
        {
            "tool": "kqkit",
            "version": __version__,
            "command": command,
            "argv": sys.argv[1:],
            "config": config,
            "config_hash": _config_hash(config),
            "seeds": seeds,
            "outputs": outputs,
            "kernel_backend": kernels.backend_name(),
            "wall_time_s": round(time.monotonic() - started, 6),
        },
    )


def cmd_analyze(args: argparse.Namespace) -> int:
    started = time.monotonic()
    problems = validate_manifest(args.manifest)
    if problems:
        for p in problems:
            print(f"manifest error: {p}", file=sys.stderr)
        return 2
    entries = load_manifest(args.manifest)
    sets = [read_dump(resolve_dump_path(args.manifest, e)) for e in entries]

    with ThreadPoolExecutor(max_workers=min(_thread_count(), len(sets))) as pool:
        results = list(
            pool.map(lambda s: analyze_layer(s, cap=args.cap, seed=args.seed, variance_threshold=args.threshold), sets)
        )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [metrics_to_dict(m) for m in results]
    _write_json(out_dir / "metrics.json", {"layers": rows})

    with open(out_dir / "metrics.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            flat = dict(row)
            flat["diagnostics"] = "; ".join(row["diagnostics"])
            for key in ("S", "I", "E", "Q", "avgDPW", "avgDPB", "minDPW", "minDistB", "avgNorm", "avgSVDE"):
                flat[key] = f"{row[key]:.17g}"
            writer.writerow(flat)

    series = {name: [(r["layer"], r[name]) for r in rows] for name in ("S", "I", "E", "Q")}
    (out_dir / "metrics.svg").write_text(
        line_chart(series, title="Layer metrics", x_label="layer", y_label="value", colors=METRIC_COLORS)
    )

    config = {
        "manifest": str(args.manifest),
        "out": str(args.out),
        "cap": args.cap,
        "seed": args.seed,
        "threshold": args.threshold,
    }
    outputs = [str(out_dir / n) for n in ("metrics.json", "metrics.csv", "metrics.svg")]
    _write_run_report(out_dir, "analyze", config, [args.seed], outputs, started)
    for row in rows:
        print(f"layer {row['layer']}: Q={row['Q']:.6f} S={row['S']:.6f} I={row['I']:.6f} E={row['E']:.6f}")
    return 0


def _load_metrics_or_manifest(path: Path):
    """Returns ('metrics', [LayerMetrics]) or ('manifest', [ManifestEntry])."""
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"{path}: {exc}") from exc
    if isinstance(raw, dict) and "layers" in raw:
        raw = raw["layers"]
    if not isinstance(raw, list) or not raw:
        raise CliError(f"{path}: expected a non-empty list of layers")
    if all(isinstance(item, dict) and "Q" in item for item in raw):
        try:
            return "metrics", [metrics_from_dict(item) for item in raw]
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"{path}: malformed metrics entry ({exc})") from exc
    if all(isinstance(item, dict) and "file" in item for item in raw):
        entries = [
            ManifestEntry(layer=int(i["layer"]), file=str(i["file"]), stage=i.get("stage"), desc=i.get("desc"))
            for i in raw
        ]
        return "manifest", entries
    raise CliError(f"{path}: neither a metrics file nor a manifest")


def cmd_select(args: argparse.Namespace) -> int:
    started = time.monotonic()
    kind, items = _load_metrics_or_manifest(Path(args.metrics))
    if args.method == "kq":
        if kind != "metrics":
            raise CliError("method kq needs a metrics file (run analyze first)")
        result = select_topk(items, k=args.k) if args.criterion == "Q" else variant_select(items, args.criterion, k=args.k)
    else:
        if kind != "manifest":
            raise CliError("method stage_end needs a manifest file (stage annotations live there)")
        result = stage_end_selection(items, k=args.k)
    payload = result.to_dict()
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text)
        config = {
            "metrics": str(args.metrics),
            "method": args.method,
            "k": args.k,
            "criterion": args.criterion,
            "out": str(args.out),
        }
        _write_run_report(out_path.parent, "select", config, [], [str(out_path)], started)
    sys.stdout.write(text)
    return 0


def _load_config(path: Path) -> dict:
    try:
        if path.suffix.lower() == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib
            with open(path, "rb") as fh:
                return tomllib.load(fh)
        return json.loads(path.read_text())
    except OSError as exc:
        raise CliError(str(exc)) from exc
    except ValueError as exc:  # JSON and TOML decode errors both derive from ValueError
        raise CliError(f"{path}: {exc}") from exc


def cmd_distill(args: argparse.Namespace) -> int:
    started = time.monotonic()
    cfg = _load_config(Path(args.config))
    for key in ("dataset", "student", "recipes"):
        if key not in cfg:
            raise CliError(f"config is missing required key {key!r}")
    try:
        results = run_experiment(cfg)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"bad config: {exc}") from exc
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "results.json", results)
    _write_run_report(out_dir, "distill", cfg, results["seeds"], [str(out_dir / "results.json")], started)
    for kind, acc in results["mean_final_acc"].items():
        shown = "failed" if acc is None else f"{acc:.4f}"
        print(f"{kind}: mean final acc {shown}")
    failed = [r["recipe"] for r in results["runs"] if not r["converged"]]
    if failed:
        print(f"runs flagged as not converged: {sorted(set(failed))}", file=sys.stderr)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    started = time.monotonic()
    try:
        results = json.loads(Path(args.results).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"{args.results}: {exc}") from exc
    for key in ("recipes", "runs", "mean_final_acc", "ari", "reference", "baseline"):
        if key not in results:
            raise CliError(f"{args.results}: missing field {key!r}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    per_recipe: dict[str, list[float]] = {}
    flagged: dict[str, int] = {}
    for run in results["runs"]:
        if run["converged"]:
            per_recipe.setdefault(run["recipe"], []).append(run["final_test_acc"])
        else:
            flagged[run["recipe"]] = flagged.get(run["recipe"], 0) + 1

    lines = [
        "# Distillation results",
        "",
        f"Reference recipe: `{results['reference']}`; baseline: `{results['baseline']}`.",
        "",
        "| recipe | mean acc | sd | runs | failed | ARI vs reference |",
        "|---|---|---|---|---|---|",
    ]
    bars = []
    for kind in results["recipes"]:
        accs = per_recipe.get(kind, [])
        mean = results["mean_final_acc"].get(kind)
        sd = float(np.std(accs)) if len(accs) > 1 else (0.0 if accs else None)
        ari_val = results["ari"].get(kind)
        unstable = kind in results.get("ari_unstable", [])
        cells = [
            kind,
            "&#8212;" if mean is None else f"{mean:.4f}",
            "&#8212;" if sd is None else f"{sd:.4f}",
            str(len(accs)),
            str(flagged.get(kind, 0)),
            "unstable" if unstable else ("&#8212;" if ari_val is None else f"{ari_val:.3f}"),
        ]
        lines.append("| " + " | ".join(cells) + " |")
        bars.append((kind, mean, sd))
    if results.get("teacher_test_acc") is not None:
        lines += ["", f"Teacher test accuracy: {results['teacher_test_acc']:.4f}."]
    lines.append("")

    (out_dir / "report.md").write_text("\n".join(lines))
    (out_dir / "accuracy.svg").write_text(bar_chart(bars, title="Final test accuracy", y_label="accuracy"))
    config = {"results": str(args.results), "out": str(args.out)}
    outputs = [str(out_dir / "report.md"), str(out_dir / "accuracy.svg")]
    _write_run_report(out_dir, "report", config, results.get("seeds", []), outputs, started)
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kqkit", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"kqkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute layer metrics for a dump manifest")
    p.add_argument("--manifest", required=True, help="manifest JSON listing one dump per layer")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--cap", type=int, default=2000, help="per-class sample cap for pairwise stats")
    p.add_argument("--seed", type=int, default=0, help="subsample seed")
    p.add_argument("--threshold", type=float, default=0.95, help="explained-variance cut for embedding dims")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("select", help="choose layers to distill from")
    p.add_argument("--metrics", required=True, help="metrics.json from analyze, or a manifest for stage_end")
    p.add_argument("--method", choices=("kq", "stage_end"), default="kq")
    p.add_argument("--k", type=int, default=4, help="number of layers to select")
    p.add_argument("--criterion", choices=CRITERIA, default="Q", help="ranking criterion for method kq")
    p.add_argument("--out", help="write the selection JSON here (otherwise stdout only)")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("distill", help="run the experiment matrix in a config file")
    p.add_argument("--config", required=True, help="JSON or TOML experiment config")
    p.add_argument("--out", default=".", help="output directory for results.json")
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("report", help="render results.json into markdown and a chart")
    p.add_argument("--results", required=True, help="results.json from distill")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
