"""Payload builders behind the CLI subcommands.

Each builder is a pure function from validated parameters to a RunOutput:
a JSON-able payload plus the delimited rows. The CLI wraps these in
envelopes and files; the acceptance suite calls them directly, so
determinism checks exercise exactly what the CLI ships.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi
from typing import Any, Sequence

from . import dirichlet, ids, path_classes, puzzle_chain, spectra, walks

WALK_CSV_HEADER = ("d", "n", "method", "samples_or_total", "hits", "p", "ci_low", "ci_high", "seed")


@dataclass(frozen=True)
class RunOutput:
    payload: dict[str, Any]
    csv_header: tuple[str, ...]
    csv_rows: list[tuple]


def build_exact_moments(
    d: int, max_two_n: int, budget: int = walks.DEFAULT_ENUMERATION_BUDGET
) -> RunOutput:
    rows = []
    entries = []
    for two_n in range(0, max_two_n + 1, 2):
        count = walks.exact_return_count(d, two_n, budget=budget)
        p = count.probability()
        rows.append((d, two_n, "exact", count.total, count.identity_count,
                     float(p), float(p), float(p), None))
        entries.append(
            {
                "two_n": two_n,
                "identity_count": count.identity_count,
                "total": count.total,
                "p": float(p),
                "p_exact": str(p),
            }
        )
    return RunOutput({"d": d, "method": "exact", "moments": entries}, WALK_CSV_HEADER, rows)


def build_mc_return(d: int, two_n: int, samples: int, seed: int, workers: int = 1) -> RunOutput:
    est = walks.mc_return_probability(d, two_n, samples, seed, workers)
    row = (d, two_n, "mc", est.samples, est.hits, est.p_hat, est.ci_low, est.ci_high, est.seed)
    payload = {
        "d": d,
        "two_n": two_n,
        "method": "mc",
        "samples": est.samples,
        "hits": est.hits,
        "p_hat": est.p_hat,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "seed": est.seed,
    }
    return RunOutput(payload, WALK_CSV_HEADER, [row])


def build_flex_stats(d: int, n_steps: int, samples: int, seed: int) -> RunOutput:
    summary = walks.flex_statistics(d, n_steps, samples, seed)
    payload = {
        "d": d,
        "n_steps": n_steps,
        "samples": samples,
        "seed": seed,
        "mean_flex_even": summary.mean_flex_even,
        "quantiles": summary.quantiles,
        "flexible_total": summary.flexible_total,
        "decided_total": summary.decided_total,
        "flexible_fraction": summary.flexible_fraction,
        "fraction_se": summary.fraction_se,
        "expected_fraction": (2 * d - 2) / (2 * d),
    }
    header = ("d", "n_steps", "samples", "mean_flex_even", "q10", "q50", "q90",
              "flexible_total", "decided_total", "flexible_fraction", "fraction_se", "seed")
    row = (d, n_steps, samples, summary.mean_flex_even,
           summary.quantiles["q10"], summary.quantiles["q50"], summary.quantiles["q90"],
           summary.flexible_total, summary.decided_total,
           summary.flexible_fraction, summary.fraction_se, seed)
    return RunOutput(payload, header, [row])


def build_peierls_classes(
    d: int,
    two_n: int,
    samples: int,
    seed: int,
    budget: int = path_classes.DEFAULT_CLASS_BUDGET,
) -> RunOutput:
    rows = []
    max_identity = 0
    size_sum = 0
    for path_id, head in enumerate(walks.iter_sampled_heads(d, two_n, samples, seed)):
        pc = path_classes.equivalence_class(head, two_n, budget=budget)
        identity_members = path_classes.verify_unique_identity(pc)
        stats = walks.path_statistics(head)
        rows.append((path_id, two_n, pc.size, len(stats.flexible_even), identity_members))
        max_identity = max(max_identity, identity_members)
        size_sum += pc.size
    payload = {
        "d": d,
        "two_n": two_n,
        "samples": samples,
        "seed": seed,
        "max_identity_members": max_identity,
        "mean_class_size": size_sum / samples,
        "uniqueness_holds": max_identity <= 1,
    }
    header = ("path_id", "two_n", "class_size", "flexible_even_count", "identity_members")
    return RunOutput(payload, header, rows)


def build_decorated(
    d: int, L: int, max_two_n: int, budget: int = puzzle_chain.DEFAULT_STATE_BUDGET
) -> RunOutput:
    records = puzzle_chain.chain_return_profile(d, L, max_two_n, budget=budget)
    rows = [(r.d, r.L, r.two_n, r.chain_return, r.stay_return, r.lower_bound) for r in records]
    payload = {
        "d": d,
        "L": L,
        "max_two_n": max_two_n,
        "records": [
            {
                "two_n": r.two_n,
                "chain_return": r.chain_return,
                "stay_return": r.stay_return,
                "total_mass": r.total_mass,
            }
            for r in records
        ],
    }
    header = ("d", "L", "two_n", "chain_return", "stay_return", "lower_bound")
    return RunOutput(payload, header, rows)


def build_laplacian(d: int, L: int, return_n: int | None = None) -> RunOutput:
    box = dirichlet.FiniteSubset.box(d, L)
    norm = dirichlet.operator_norm(box)
    pair = dirichlet.cosine_eigenpair(d, L)
    rows = [
        ("box_norm", d, L, norm, cos(pi / (2.0 * (L + 1))), abs(norm - pair.eigenvalue)),
        ("cosine_eigenvalue", d, L, pair.eigenvalue, 1.0 - pi * pi / (8.0 * L * L), pair.residual),
        ("origin_value", d, L, pair.value_at_origin, (2.0 * L) ** (-d / 2.0), None),
    ]
    payload = {
        "d": d,
        "L": L,
        "operator_norm": norm,
        "eigenvalue": pair.eigenvalue,
        "value_at_origin": pair.value_at_origin,
        "origin_constant": pair.origin_constant,
        "residual": pair.residual,
    }
    if return_n is not None:
        value = dirichlet.box_return_probability(d, L, return_n)
        spectral = pair.value_at_origin**2 * pair.eigenvalue**return_n
        rows.append((f"box_return_n{return_n}", d, L, value, spectral, None))
        payload["box_return"] = {"n": return_n, "value": value, "spectral_lower": spectral}
    header = ("label", "d", "L_or_size", "norm_or_eigenvalue", "bound", "residual")
    return RunOutput(payload, header, rows)


GRAPH_BUILDERS = {
    "k2": lambda: spectra.FiniteGraph.complete(2),
    "k3": lambda: spectra.FiniteGraph.complete(3),
    "k4": lambda: spectra.FiniteGraph.complete(4),
    "k5": lambda: spectra.FiniteGraph.complete(5),
    "p3": lambda: spectra.FiniteGraph.path(3),
    "p4": lambda: spectra.FiniteGraph.path(4),
    "p5": lambda: spectra.FiniteGraph.path(5),
    "c4": lambda: spectra.FiniteGraph.cycle(4),
    "c5": lambda: spectra.FiniteGraph.cycle(5),
    "box-1-1": lambda: spectra.FiniteGraph.box(1, 1),
    "box-1-2": lambda: spectra.FiniteGraph.box(1, 2),
}


def build_spectra_graph(name: str) -> RunOutput:
    if name not in GRAPH_BUILDERS:
        raise ValueError(f"unknown graph {name!r}; choose from {sorted(GRAPH_BUILDERS)}")
    graph = GRAPH_BUILDERS[name]()
    record = spectra.regular_spectrum(graph)
    report = spectra.verify_decomposition(graph)
    payload = {
        "graph": graph.name,
        "vertices": graph.v,
        "size": len(record.eigenvalues),
        "normalization": record.normalization,
        "eigenvalues": [float(x) for x in record.eigenvalues],
        "decomposition": {
            "max_pairing_deviation": report.max_pairing_deviation,
            "max_counting_deviation": report.max_counting_deviation,
            "count_identity_ok": report.count_identity_ok,
        },
    }
    rows = [(graph.name, i, float(x)) for i, x in enumerate(record.eigenvalues)]
    return RunOutput(payload, ("graph", "index", "eigenvalue"), rows)


def build_kn_moments(n_values: Sequence[int], max_power: int) -> RunOutput:
    rows = []
    entries = []
    for N in n_values:
        for power in range(0, max_power + 1):
            m = spectra.kn_moment(N, power)
            limit = spectra.catalan(power // 2) if power % 2 == 0 else 0
            rows.append((N, power, m.identity_walks, float(m.moment), float(m.scaled), limit))
            entries.append(
                {
                    "N": N,
                    "power": power,
                    "identity_walks": m.identity_walks,
                    "scaled": str(m.scaled),
                    "scaled_float": float(m.scaled),
                    "catalan_limit": limit,
                }
            )
    header = ("N", "power", "identity_walks", "moment", "scaled", "catalan_limit")
    return RunOutput({"moments": entries}, header, rows)


def build_ids_bounds(
    d: int,
    max_two_n: int,
    chain_L: int | None = None,
    chain_max_two_n: int = 0,
    grid_points: int = ids.EPS_GRID_POINTS,
    eps_min: float = ids.EPS_GRID_MIN,
    fit: bool = False,
    enum_budget: int = walks.DEFAULT_ENUMERATION_BUDGET,
    state_budget: int = puzzle_chain.DEFAULT_STATE_BUDGET,
) -> RunOutput:
    table = ids.exact_moment_table(d, max_two_n, budget=enum_budget)
    p_lower: dict[int, float] = {
        e.two_n: e.value for e in table.sorted_entries() if e.two_n > 0
    }
    if chain_L is not None and chain_max_two_n > 0:
        for record in puzzle_chain.chain_return_profile(
            d, chain_L, chain_max_two_n, budget=state_budget
        ):
            if record.two_n > 0 and record.two_n not in p_lower:
                p_lower[record.two_n] = record.chain_return
    grid = ids.default_eps_grid(d, grid_points, eps_min)
    curve = ids.build_tail_curve(table, p_lower, grid)
    rows = list(zip(curve.epsilons, curve.upper, curve.lower,
                    curve.best_n_upper, curve.best_n_lower))
    payload: dict[str, Any] = {
        "d": d,
        "max_two_n": max_two_n,
        "chain_L": chain_L,
        "chain_max_two_n": chain_max_two_n,
        "epsilons": list(curve.epsilons),
        "upper": list(curve.upper),
        "lower": list(curve.lower),
        "best_n_upper": list(curve.best_n_upper),
        "best_n_lower": list(curve.best_n_lower),
    }
    if fit:
        f = ids.lifshitz_fit(curve)
        payload["fit"] = {
            "slope": f.slope,
            "intercept": f.intercept,
            "residual": f.rms_residual,
            "n_points": f.n_points,
            "target": f.target,
            "note": f.note,
        }
    header = ("eps", "upper", "lower", "best_n_upper", "best_n_lower")
    return RunOutput(payload, header, rows)


def build_lifshitz_fit(d: int, epsilons: Sequence[float], uppers: Sequence[float]) -> RunOutput:
    curve = ids.TailBoundCurve(
        d=d,
        epsilons=tuple(float(e) for e in epsilons),
        upper=tuple(float(u) for u in uppers),
        lower=tuple(0.0 for _ in uppers),
        best_n_upper=tuple(0 for _ in uppers),
        best_n_lower=tuple(0 for _ in uppers),
    )
    f = ids.lifshitz_fit(curve)
    payload = {
        "d": d,
        "slope": f.slope,
        "intercept": f.intercept,
        "residual": f.rms_residual,
        "n_points": f.n_points,
        "target": f.target,
        "note": f.note,
    }
    header = ("slope", "intercept", "residual", "n_points", "target")
    rows = [(f.slope, f.intercept, f.rms_residual, f.n_points, f.target)]
    return RunOutput(payload, header, rows)
