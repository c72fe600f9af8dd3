"""Command-line front end: summarize, fit, loc-matrix, compare, plot-data.

Configuration precedence is flags > config file > built-in defaults; the
config file is JSON, found via --config or the LOCINDEX_CONFIG environment
variable.  Numeric output uses 6 decimal places in table mode, and LOC
matrices are presented multiplied by 1000 (table/csv modes only; JSON carries
both the unscaled and the scaled entries).

Exit status: 0 on success, 1 when some ordered pairs or curves failed but
others were produced, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .association import (
    PsiFunction,
    TiesError,
    finite_population_I,
    liebscher_zeta,
    loc_matrix,
    pearson,
    rank_step_function,
    spearman,
)
from .bandwidth import BandwidthError, BandwidthEstimate, dpi_bandwidth, median_adjust
from .dataset import (
    ColumnSchema,
    NormalizedSample,
    ParseError,
    histogram,
    jitter,
    load_csv,
    normalize,
    pair,
    summarize,
)
from .rearrangement import loc_index, step_from_curve
from .smoothing import FitSpec, LossKind, SmoothingError, fit_curve

CONFIG_ENV = "LOCINDEX_CONFIG"

_DEFAULTS = {
    "loss": None,  # per-command default
    "grid": 1000,
    "m": 1000,
    "jitter_sd": 1e-5,
    "seed": 0,
    "format": "table",
    "bins": 10,
    "bandwidth": None,
    "max_items": "65,45,80",
    "out": ".",
}

_CONFIG_KEYS = set(_DEFAULTS) | {"input"}


class CliError(Exception):
    """Input or configuration error; maps to exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    input: Path
    schema: ColumnSchema
    loss: str
    grid_size: int
    m: int
    jitter_sd: float
    seed: int
    fmt: str
    bins: int
    bandwidth: float | None
    out: Path


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _load_config_file(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise CliError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"config file {path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise CliError(f"config file {path}: expected a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise CliError(f"config file {path}: unknown key(s) {', '.join(sorted(unknown))}")
    return data


def _parse_max_items(raw) -> tuple[int, ...]:
    if isinstance(raw, (list, tuple)):
        values = [int(v) for v in raw]
    else:
        try:
            values = [int(part) for part in str(raw).split(",")]
        except ValueError:
            raise CliError(f"--max-items expects comma-separated integers, got {raw!r}") from None
    if any(v <= 0 for v in values):
        raise CliError("--max-items values must be positive")
    return tuple(values)


def _build_config(args: argparse.Namespace, default_loss: str) -> RunConfig:
    settings = dict(_DEFAULTS)
    settings.update(_load_config_file(getattr(args, "config", None)))
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    if getattr(args, "input", None) is not None:
        settings["input"] = args.input
    if settings.get("input") is None:
        raise CliError("no input file given (use --input or a config file)")

    max_items = _parse_max_items(settings["max_items"])
    base = ColumnSchema(names=("mathematics", "reading", "spelling"), max_items=(65, 45, 80))
    if len(max_items) != len(base.names):
        raise CliError(f"--max-items needs {len(base.names)} values, got {len(max_items)}")
    schema = ColumnSchema(names=base.names, max_items=max_items, id_column=base.id_column)

    loss = settings["loss"] or default_loss
    if loss not in ("mean", "median", "both"):
        raise CliError(f"unknown loss {loss!r}; expected mean, median or both")
    fmt = settings["format"]
    if fmt not in ("table", "csv", "json"):
        raise CliError(f"unknown format {fmt!r}; expected table, csv or json")
    seed = int(settings["seed"])
    if seed < 0:
        raise CliError("--seed must be non-negative")
    bandwidth = settings["bandwidth"]
    if bandwidth is not None:
        bandwidth = float(bandwidth)
        if bandwidth <= 0:
            raise CliError("--bandwidth must be positive")

    return RunConfig(
        input=Path(settings["input"]),
        schema=schema,
        loss=loss,
        grid_size=int(settings["grid"]),
        m=int(settings["m"]),
        jitter_sd=float(settings["jitter_sd"]),
        seed=seed,
        fmt=fmt,
        bins=int(settings["bins"]),
        bandwidth=bandwidth,
        out=Path(settings["out"]),
    )


def _load_normalized(config: RunConfig) -> NormalizedSample:
    try:
        return normalize(load_csv(config.input, config.schema))
    except FileNotFoundError:
        raise CliError(f"input file not found: {config.input}") from None
    except (ParseError, ValueError) as exc:
        raise CliError(str(exc)) from None


def _loss_kinds(loss: str) -> list[tuple[str, LossKind]]:
    kinds = []
    if loss in ("mean", "both"):
        kinds.append(("mean", LossKind.quadratic()))
    if loss in ("median", "both"):
        kinds.append(("median", LossKind.median()))
    return kinds


def _resolve_bandwidth(config, sample_pair, loss_kind) -> BandwidthEstimate:
    if config.bandwidth is not None:
        return BandwidthEstimate(value=config.bandwidth, method="fixed")
    bw = dpi_bandwidth(sample_pair)
    if loss_kind.kind == "quantile":
        bw = median_adjust(bw, loss_kind.tau)
    return bw


def _print_aligned(rows: list[list[str]]) -> None:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(widths[i]) for i, cell in enumerate(row) if i > 0]
        print("  ".join(cells).rstrip())


# ---------------------------------------------------------------------------
# summarize


def cmd_summarize(config: RunConfig) -> int:
    sample = _load_normalized(config)
    names = sample.column_names
    stats = {name: summarize(sample.columns[name]) for name in names}
    hists = {name: histogram(sample.columns[name], config.bins) for name in names}

    if config.fmt == "json":
        payload = {
            "columns": {
                name: {
                    "minimum": stats[name].minimum,
                    "q1": stats[name].q1,
                    "median": stats[name].median,
                    "q3": stats[name].q3,
                    "mean": stats[name].mean,
                    "maximum": stats[name].maximum,
                    "sd": stats[name].sd,
                }
                for name in names
            },
            "bins": config.bins,
            "histograms": {name: hists[name].tolist() for name in names},
            "n": sample.n,
        }
        print(json.dumps(payload, indent=2))
        return 0

    labels = [
        ("Minimum", "minimum"),
        ("1st quartile", "q1"),
        ("2nd quartile (median)", "median"),
        ("3rd quartile", "q3"),
        ("Mean", "mean"),
        ("Maximum", "maximum"),
        ("Standard deviation", "sd"),
    ]
    if config.fmt == "csv":
        print(",".join(["statistic", *names]))
        for label, attr in labels:
            print(",".join([label, *(_fmt(getattr(stats[n], attr)) for n in names)]))
        for name in names:
            print(",".join([f"histogram {name}", *(str(c) for c in hists[name])]))
        return 0

    rows = [["Summary statistics", *names]]
    for label, attr in labels:
        rows.append([label, *(_fmt(getattr(stats[n], attr)) for n in names)])
    _print_aligned(rows)
    print()
    print(f"Histogram counts ({config.bins} bins, n = {sample.n})")
    for name in names:
        print(f"  {name}: " + " ".join(str(c) for c in hists[name]))
    return 0


# ---------------------------------------------------------------------------
# fit / plot-data


def _write_curve_files(config, x_name, y_name, losses):
    """Write scatter + requested curve files; returns (written, failures, reports)."""
    sample = _load_normalized(config)
    try:
        pr = pair(sample, x_name, y_name)
    except ValueError as exc:
        raise CliError(str(exc)) from None

    config.out.mkdir(parents=True, exist_ok=True)
    written = []
    scatter_path = config.out / f"{x_name}_{y_name}_scatter.dat"
    with scatter_path.open("w", encoding="utf-8") as fh:
        for xv, yv in zip(pr.x, pr.y):
            fh.write(f"{xv:.6f} {yv:.6f}\n")
    written.append(str(scatter_path))

    failures: dict[str, str] = {}
    reports = []
    for label, kind in losses:
        try:
            bw = _resolve_bandwidth(config, pr, kind)
            curve = fit_curve(pr, FitSpec(loss=kind, bandwidth=bw, grid_size=config.grid_size))
        except (BandwidthError, SmoothingError, ValueError) as exc:
            failures[label] = str(exc)
            continue
        path = config.out / f"{x_name}_{y_name}_{label}.dat"
        clamped = np.clip(curve.values, 0.0, 1.0)  # presentation-layer clamp
        with path.open("w", encoding="utf-8") as fh:
            for t, v in zip(curve.grid, clamped):
                fh.write(f"{t:.6f} {v:.6f}\n")
        written.append(str(path))
        reports.append((label, bw))
    return written, failures, reports


def cmd_fit(config: RunConfig, x_name: str, y_name: str) -> int:
    # fit always produces both curves; plot-data honors --loss selection
    written, failures, reports = _write_curve_files(config, x_name, y_name,
                                                    _loss_kinds("both"))
    for path in written:
        print(f"wrote {path}")
    for label, bw in reports:
        blocks = f" blocks={bw.diagnostics.block_count}" if bw.diagnostics else ""
        print(f"bandwidth {label}: {_fmt(bw.value)} method={bw.method}{blocks}")
    for label, message in failures.items():
        print(f"error: {label} curve failed: {message}", file=sys.stderr)
    return 1 if failures else 0


def cmd_plot_data(config: RunConfig, x_name: str, y_name: str) -> int:
    written, failures, _ = _write_curve_files(config, x_name, y_name,
                                              _loss_kinds(config.loss))
    for path in written:
        print(f"wrote {path}")
    for label, message in failures.items():
        print(f"error: {label} curve failed: {message}", file=sys.stderr)
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# loc-matrix


def _print_matrix_table(matrix) -> None:
    k = len(matrix.labels)
    header_span = " " * 12 + "Y"
    print(header_span)
    rows = [["X", *matrix.labels]]
    for i in range(k):
        cells = [_fmt(matrix.entries[i, j] * 1000.0) for j in range(k)]
        rows.append([matrix.labels[i], *cells])
    _print_aligned(rows)


def cmd_loc_matrix(config: RunConfig) -> int:
    if config.m != config.grid_size:
        raise CliError(
            f"m ({config.m}) must equal grid size ({config.grid_size}); the step "
            "function is a direct transfer of the fitted grid"
        )
    sample = _load_normalized(config)
    fixed = (
        BandwidthEstimate(value=config.bandwidth, method="fixed")
        if config.bandwidth is not None
        else None
    )

    matrices = []
    for label, kind in _loss_kinds(config.loss):
        spec = FitSpec(loss=kind, bandwidth=fixed, grid_size=config.grid_size)
        matrices.append(
            (label, loc_matrix(sample, spec, jitter_sd=config.jitter_sd, seed=config.seed))
        )

    if config.fmt == "json":
        payload = {}
        for label, matrix in matrices:
            payload[label] = {
                "labels": list(matrix.labels),
                "loss": label,
                "entries": [[v for v in row] for row in matrix.entries.tolist()],
                "entries_x1000": [[v * 1000.0 for v in row] for row in matrix.entries.tolist()],
                "failures": {f"{a}->{b}": msg for (a, b), msg in matrix.failures.items()},
            }
        print(json.dumps(payload, indent=2))
    elif config.fmt == "csv":
        for label, matrix in matrices:
            print(f"loss,{label}")
            print(",".join(["X", *matrix.labels]))
            for i, name in enumerate(matrix.labels):
                print(",".join([name, *(
                    _fmt(matrix.entries[i, j] * 1000.0) for j in range(len(matrix.labels))
                )]))
    else:
        for label, matrix in matrices:
            print(f"LOC matrix, conditional-{label} fit (entries multiplied by 1000)")
            _print_matrix_table(matrix)
            print()

    any_failures = False
    for label, matrix in matrices:
        for (a, b), msg in matrix.failures.items():
            any_failures = True
            print(f"error: pair ({a} -> {b}), {label} fit: {msg}", file=sys.stderr)
    return 1 if any_failures else 0


# ---------------------------------------------------------------------------
# compare


def cmd_compare(config: RunConfig, x_name: str, y_name: str) -> int:
    if config.m != config.grid_size:
        raise CliError(
            f"m ({config.m}) must equal grid size ({config.grid_size}); the step "
            "function is a direct transfer of the fitted grid"
        )
    sample = _load_normalized(config)
    try:
        pr = pair(sample, x_name, y_name)
    except ValueError as exc:
        raise CliError(str(exc)) from None

    had_ties = (len(np.unique(pr.x)) < pr.n) or (len(np.unique(pr.y)) < pr.n)
    jittered = jitter(pr, config.jitter_sd, config.seed)
    if had_ties and config.jitter_sd > 0:
        print(
            f"note: ties present; applied jitter sd={config.jitter_sd:g} "
            f"seed={config.seed}",
            file=sys.stderr,
        )

    try:
        rho = pearson(pr)
        srho = spearman(jittered)
        zeta_quad = liebscher_zeta(jittered, PsiFunction.quadratic())
        zeta_abs = liebscher_zeta(jittered, PsiFunction.absolute())
        fin_i = finite_population_I(jittered)
        rank_loc = loc_index(rank_step_function(jittered)).value
    except TiesError as exc:
        raise CliError(f"{exc} (jitter_sd is 0; set --jitter-sd > 0)") from None
    identity_ok = bool(math.isclose(rank_loc, fin_i, rel_tol=1e-12, abs_tol=1e-15))

    loc_values: dict[str, float | None] = {}
    loc_errors: dict[str, str] = {}
    for label, kind in _loss_kinds("both"):
        try:
            bw = _resolve_bandwidth(config, jittered, kind)
            curve = fit_curve(jittered, FitSpec(loss=kind, bandwidth=bw,
                                                grid_size=config.grid_size))
            loc_values[label] = loc_index(step_from_curve(curve)).value
        except (BandwidthError, SmoothingError, ValueError) as exc:
            loc_values[label] = None
            loc_errors[label] = str(exc)

    if config.fmt == "json":
        payload = {
            "pair": {"x": x_name, "y": y_name},
            "pearson": rho,
            "spearman": srho,
            "zeta_quadratic": zeta_quad,
            "zeta_absolute": zeta_abs,
            "finite_population_I": fin_i,
            "rank_loc": rank_loc,
            "identity_rank_loc_equals_I": identity_ok,
            "loc_mean": loc_values["mean"],
            "loc_median": loc_values["median"],
        }
        print(json.dumps(payload, indent=2))
    else:
        sep = "," if config.fmt == "csv" else "  "
        def emit(label: str, value: str) -> None:
            if config.fmt == "csv":
                print(f"{label}{sep}{value}")
            else:
                print(f"{label:<28}{value}")

        print(f"pair: {x_name} -> {y_name}" if config.fmt != "csv"
              else f"pair,{x_name}->{y_name}")
        emit("pearson", _fmt(rho))
        emit("spearman", _fmt(srho))
        emit("zeta (quadratic psi)", _fmt(zeta_quad))
        emit("zeta (absolute psi)", _fmt(zeta_abs))
        emit("finite-population I", _fmt(fin_i))
        emit("loc (rank step function)", _fmt(rank_loc))
        emit("identity rank-loc == I", "true" if identity_ok else "false")
        for label in ("mean", "median"):
            value = loc_values[label]
            emit(f"loc ({label} fit)", _fmt(value) if value is not None else "unavailable")

    for label, message in loc_errors.items():
        print(f"error: {label} fit failed: {message}", file=sys.stderr)
    return 1 if loc_errors else 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser, with_loss: bool = True) -> None:
    parser.add_argument("--input", help="CSV file of raw integer marks")
    parser.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    parser.add_argument("--max-items", dest="max_items",
                        help="items per test, e.g. 65,45,80")
    parser.add_argument("--format", choices=("table", "csv", "json"),
                        help="output format (default table)")
    parser.add_argument("--grid", type=int, help="curve evaluation grid size (default 1000)")
    parser.add_argument("--m", type=int, help="step-function piece count (default 1000)")
    parser.add_argument("--jitter-sd", dest="jitter_sd", type=float,
                        help="tie-breaking noise sd (default 1e-5)")
    parser.add_argument("--seed", type=int, help="random seed (default 0)")
    parser.add_argument("--bandwidth", type=float,
                        help="fixed bandwidth overriding the plug-in selection")
    if with_loss:
        parser.add_argument("--loss", choices=("mean", "median", "both"),
                            help="which fitted curve(s) to use")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locindex",
        description="Lack-of-co-monotonicity (LOC) analysis of paired mark data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="per-column summary statistics and histograms")
    _add_common(p, with_loss=False)
    p.add_argument("--bins", type=int, help="histogram bin count (default 10)")

    p = sub.add_parser("fit", help="fit mean and median curves for one ordered pair")
    _add_common(p, with_loss=False)
    p.add_argument("x_name")
    p.add_argument("y_name")
    p.add_argument("--out", help="output directory for plot data files (default .)")

    p = sub.add_parser("plot-data", help="write scatter/curve plot data for one pair")
    _add_common(p)
    p.add_argument("x_name")
    p.add_argument("y_name")
    p.add_argument("--out", help="output directory for plot data files (default .)")

    p = sub.add_parser("loc-matrix", help="LOC over all ordered column pairs")
    _add_common(p)

    p = sub.add_parser("compare", help="classical coefficients and LOC for one pair")
    _add_common(p, with_loss=False)
    p.add_argument("x_name")
    p.add_argument("y_name")

    return parser


_COMMAND_LOSS_DEFAULTS = {
    "summarize": "mean",
    "fit": "both",
    "plot-data": "both",
    "loc-matrix": "mean",
    "compare": "both",
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _build_config(args, _COMMAND_LOSS_DEFAULTS[args.command])
        if args.command == "summarize":
            return cmd_summarize(config)
        if args.command == "fit":
            return cmd_fit(config, args.x_name, args.y_name)
        if args.command == "plot-data":
            return cmd_plot_data(config, args.x_name, args.y_name)
        if args.command == "loc-matrix":
            return cmd_loc_matrix(config)
        if args.command == "compare":
            return cmd_compare(config, args.x_name, args.y_name)
        raise CliError(f"unknown command {args.command!r}")
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
