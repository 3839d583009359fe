"""Command-line entry point: reproducible, cached experiment runs.

Every subcommand routes through a payload builder, wraps the result in an
envelope (config echo, version, wall time, actual seed), and writes it to
the output path: CSV payloads get a `.meta.json` sidecar with the
envelope, JSON outputs embed the payload in the envelope. A one-line
summary goes to standard output. With --figures-dir the report is also
rendered to PNG files alongside the delimited output.

Exit codes: 0 success, 2 invalid usage or config, 3 budget refusal,
4 internal assertion or failed verification.
"""

from __future__ import annotations

import argparse
import csv
import os
import secrets
import sys
import time
from pathlib import Path

from . import __version__, acceptance, figures, runs
from .errors import BudgetExceededError
from .reporting import (
    CACHE_ENV_VAR,
    ResultEnvelope,
    cache_lookup,
    cache_store,
    payload_json,
    write_csv,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


def _add_common(parser: argparse.ArgumentParser, *, seeded: bool = False) -> None:
    parser.add_argument("--out", type=Path, default=None, help="output path (default: <subcommand>.<format>)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--figures-dir", type=Path, default=None,
                        help="also render report figures (PNG) into this directory")
    parser.add_argument("--cache-dir", type=Path, default=None,
                        help=f"envelope cache directory (default: ${CACHE_ENV_VAR} if set)")
    parser.add_argument("--workers", type=int, default=1)
    if seeded:
        parser.add_argument("--seed", type=int, default=None,
                            help="64-bit seed; a random one is drawn and recorded if omitted")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="umpteen",
        description="Sliding-puzzle walks on Z^d: return probabilities, killed chains, "
        "spectra, and spectral-edge tail bounds.",
    )
    parser.add_argument("--version", action="version", version=f"umpteen {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("exact-moments", help="exhaustive p_2n table")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--max-2n", dest="max_two_n", type=int, required=True)
    p.add_argument("--enum-budget", type=int, default=runs.walks.DEFAULT_ENUMERATION_BUDGET)
    _add_common(p)

    p = sub.add_parser("mc-return", help="Monte Carlo p_2n estimate")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--two-n", dest="two_n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    _add_common(p, seeded=True)

    p = sub.add_parser("flex-stats", help="flexible-vertex statistics of sampled walks")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n-steps", dest="n_steps", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    _add_common(p, seeded=True)

    p = sub.add_parser("peierls-classes", help="flip classes of sampled walk heads")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--two-n", dest="two_n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--class-budget", type=int, default=runs.path_classes.DEFAULT_CLASS_BUDGET)
    _add_common(p, seeded=True)

    p = sub.add_parser("decorated", help="killed puzzle chain on a box")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--two-n", dest="two_n", type=int, required=True,
                   help="profile is emitted for all even times up to this one")
    p.add_argument("--state-budget", type=int, default=runs.puzzle_chain.DEFAULT_STATE_BUDGET)
    _add_common(p)

    p = sub.add_parser("laplacian", help="killed walk operator on a box")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--return-n", dest="return_n", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("spectra", help="operator spectra and moment tables")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--graph", choices=sorted(runs.GRAPH_BUILDERS))
    mode.add_argument("--kn", type=int, nargs="+", metavar="N",
                      help="complete-graph moment table for these N")
    p.add_argument("--max-power", type=int, default=6)
    _add_common(p)

    p = sub.add_parser("ids-bounds", help="two-sided tail bounds from moment tables")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--max-2n", dest="max_two_n", type=int, required=True)
    p.add_argument("--chain-L", dest="chain_L", type=int, default=None)
    p.add_argument("--chain-max-2n", dest="chain_max_two_n", type=int, default=0)
    p.add_argument("--grid-points", type=int, default=runs.ids.EPS_GRID_POINTS)
    p.add_argument("--eps-min", type=float, default=runs.ids.EPS_GRID_MIN)
    p.add_argument("--fit", action="store_true", help="append the edge-exponent fit report")
    p.add_argument("--enum-budget", type=int, default=runs.walks.DEFAULT_ENUMERATION_BUDGET)
    p.add_argument("--state-budget", type=int, default=runs.puzzle_chain.DEFAULT_STATE_BUDGET)
    _add_common(p)

    p = sub.add_parser("lifshitz-fit", help="exponent fit of an ids-bounds CSV")
    p.add_argument("--input", type=Path, required=True, help="CSV produced by ids-bounds")
    p.add_argument("--d", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("verify", help="run the acceptance suite")
    return parser


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"out", "format", "figures_dir", "cache_dir"}
    config = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        config[key] = str(value) if isinstance(value, Path) else value
    return config


def _dispatch(args: argparse.Namespace) -> tuple[runs.RunOutput, list]:
    """Route a validated config to its builder; returns output and figure specs."""
    cmd = args.subcommand
    if cmd == "exact-moments":
        out = runs.build_exact_moments(args.d, args.max_two_n, args.enum_budget)
        figs = [("return-probability", figures.return_probability_figure, _walk_rows(out))]
    elif cmd == "mc-return":
        out = runs.build_mc_return(args.d, args.two_n, args.samples, args.seed, args.workers)
        figs = [("return-probability", figures.return_probability_figure, _walk_rows(out))]
    elif cmd == "flex-stats":
        out = runs.build_flex_stats(args.d, args.n_steps, args.samples, args.seed)
        figs = [("flex-quantiles", figures.flex_quantile_figure, out.payload)]
    elif cmd == "peierls-classes":
        out = runs.build_peierls_classes(args.d, args.two_n, args.samples, args.seed,
                                         args.class_budget)
        figs = [("class-sizes", figures.class_size_figure, [r[2] for r in out.csv_rows])]
    elif cmd == "decorated":
        out = runs.build_decorated(args.d, args.L, args.two_n, args.state_budget)
        figs = [("chain-profile", figures.chain_profile_figure, out.payload["records"])]
    elif cmd == "laplacian":
        out = runs.build_laplacian(args.d, args.L, args.return_n)
        rows = [{"label": r[0], "value": r[3], "bound": r[4]} for r in out.csv_rows]
        figs = [("dirichlet-bounds", figures.dirichlet_figure, rows)]
    elif cmd == "spectra":
        if args.graph:
            out = runs.build_spectra_graph(args.graph)
            figs = [(
                f"spectrum-{args.graph}",
                lambda path, payload=out.payload: figures.spectrum_figure(
                    payload["eigenvalues"], payload["normalization"], payload["graph"], path
                ),
                None,
            )]
        else:
            out = runs.build_kn_moments(args.kn, args.max_power)
            figs = []
    elif cmd == "ids-bounds":
        out = runs.build_ids_bounds(
            args.d, args.max_two_n, args.chain_L, args.chain_max_two_n,
            args.grid_points, args.eps_min, args.fit,
            args.enum_budget, args.state_budget,
        )
        figs = [("tail-bounds", figures.tail_bound_figure, out.payload)]
        if args.fit:
            figs.append((
                "lifshitz-fit",
                lambda path, payload=out.payload: figures.lifshitz_fit_figure(
                    payload["epsilons"], payload["upper"], payload["fit"], path
                ),
                None,
            ))
    elif cmd == "lifshitz-fit":
        epsilons, uppers = _read_curve_csv(args.input)
        out = runs.build_lifshitz_fit(args.d, epsilons, uppers)
        figs = [(
            "lifshitz-fit",
            lambda path, e=epsilons, u=uppers, payload=out.payload: figures.lifshitz_fit_figure(
                e, u, payload, path
            ),
            None,
        )]
    else:  # pragma: no cover - argparse enforces the choices
        raise ValueError(f"unknown subcommand {cmd}")
    return out, figs


def _walk_rows(out: runs.RunOutput) -> list[dict]:
    return [
        {"two_n": r[1], "method": r[2], "p": r[5], "ci_low": r[6], "ci_high": r[7]}
        for r in out.csv_rows
    ]


def _read_curve_csv(path: Path) -> tuple[list[float], list[float]]:
    epsilons, uppers = [], []
    with path.open(newline="", encoding="utf-8") as handle:
        for record in csv.DictReader(handle):
            epsilons.append(float(record["eps"]))
            uppers.append(float(record["upper"]))
    if not epsilons:
        raise ValueError(f"no rows in {path}")
    return epsilons, uppers


def _render_figures(figs: list, directory: Path) -> list[str]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, renderer, data in figs:
        target = directory / f"{name}.png"
        if data is None:
            renderer(target)
        else:
            renderer(data, target)
        written.append(str(target))
    return written


def _run_verify() -> int:
    results = acceptance.run_all()
    print(f"umpteen {__version__} acceptance suite")
    for result in results:
        print(result.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed " + ("" if passed == len(results) else "(FAILURES ABOVE)"))
    return EXIT_OK if passed == len(results) else EXIT_INTERNAL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.subcommand == "verify":
        return _run_verify()

    if hasattr(args, "seed") and args.seed is None:
        args.seed = secrets.randbits(63)

    config = _config_dict(args)
    cache_dir = args.cache_dir
    if cache_dir is None and os.environ.get(CACHE_ENV_VAR):
        cache_dir = Path(os.environ[CACHE_ENV_VAR])

    try:
        envelope = cache_lookup(config, cache_dir) if cache_dir else None
        figs: list = []
        if envelope is None:
            started = time.perf_counter()
            out, figs = _dispatch(args)
            envelope = ResultEnvelope(
                config=config,
                payload=out.payload,
                wall_time_s=time.perf_counter() - started,
                csv_header=list(out.csv_header),
                csv_rows=[list(row) for row in out.csv_rows],
            )
            if cache_dir:
                cache_store(envelope, cache_dir)
        elif args.figures_dir is not None:
            # Figures are not cached; rebuild only the figure inputs.
            _, figs = _dispatch(args)
    except BudgetExceededError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    out_path = args.out or Path(f"{args.subcommand}.{args.format}")
    if args.format == "csv":
        write_csv(out_path, envelope.csv_header, envelope.csv_rows)
        meta = out_path.with_name(out_path.name + ".meta.json")
        meta.write_text(envelope.to_json(), encoding="utf-8")
    else:
        out_path.write_text(envelope.to_json(), encoding="utf-8")

    rendered = []
    if args.figures_dir is not None:
        rendered = _render_figures(figs, args.figures_dir)

    summary = {
        "subcommand": args.subcommand,
        "out": str(out_path),
        "cached": envelope.cached,
        "wall_time_s": round(envelope.wall_time_s, 3),
    }
    if hasattr(args, "seed"):
        summary["seed"] = args.seed
    if rendered:
        summary["figures"] = rendered
    print(payload_json(summary))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
