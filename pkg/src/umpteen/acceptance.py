"""The acceptance gate: nine go/no-go checks tying the modules together.

Each criterion is a standalone callable returning a CriterionResult; the
CLI `verify` subcommand and the pytest acceptance module both run the
same list. Tolerances and runtime ceilings are pinned here, not in the
callers.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import dirichlet, ids, path_classes, puzzle_chain, spectra, walks
from .reporting import csv_content
from .runs import build_exact_moments, build_mc_return

MC_SEED = 1905
PEIERLS_SEED = 30
SUBSET_SEED = 6

PAIRING_TOL = 1e-8
RESIDUAL_TOL = 1e-10
CROSSCHECK_TOL = 1e-12
MOMENT_QUAD_TOL = 1e-6
FIT_SELFTEST_TOL = 1e-6


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit_seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] criterion {self.number}: {self.name} "
            f"({self.seconds:.1f}s / limit {self.limit_seconds:.0f}s) - {self.detail}"
        )


def _finish(
    number: int, name: str, limit: float, started: float, ok: bool, detail: str
) -> CriterionResult:
    elapsed = time.perf_counter() - started
    return CriterionResult(number, name, ok and elapsed < limit, detail, elapsed, limit)


def criterion_1_one_dim_moments() -> CriterionResult:
    """Exact d=1 return counts equal central binomial coefficients, 2n <= 14."""
    t0 = time.perf_counter()
    failures = []
    for two_n in range(0, 15, 2):
        count = walks.exact_return_count(1, two_n)
        if count.identity_count != math.comb(two_n, two_n // 2):
            failures.append(two_n)
    detail = "all counts C(2n, n)" if not failures else f"mismatch at 2n={failures}"
    return _finish(1, "d=1 moment identity", 10.0, t0, not failures, detail)


def criterion_2_three_way_agreement() -> CriterionResult:
    """Exact, Monte Carlo, and chain lower bound agree on p_{2n}(Z^2)."""
    t0 = time.perf_counter()
    ok = True
    notes = []
    exact_values = {}
    for two_n in (2, 4, 6, 8):
        exact_values[two_n] = walks.exact_return_count(2, two_n).probability()
    if exact_values[2] != Fraction(1, 4) or exact_values[4] != Fraction(7, 64):
        ok = False
        notes.append("frozen exact values p_2=1/4, p_4=7/64 violated")
    chain = {r.two_n: r.chain_return for r in puzzle_chain.chain_return_profile(2, 1, 8)}
    for two_n in (2, 4, 6, 8):
        truth = float(exact_values[two_n])
        est = walks.mc_return_probability(2, two_n, 1_000_000, MC_SEED)
        if not est.ci_low <= truth <= est.ci_high:
            ok = False
            notes.append(f"mc CI misses exact at 2n={two_n}")
        if chain[two_n] > truth + CROSSCHECK_TOL:
            ok = False
            notes.append(f"chain bound exceeds exact at 2n={two_n}")
    detail = "; ".join(notes) if notes else "exact = frozen, mc within Wilson CI, chain <= exact"
    return _finish(2, "three-way agreement on p_2n(Z^2)", 120.0, t0, ok, detail)


def criterion_3_peierls_uniqueness() -> CriterionResult:
    """At most one identity member per flip class; partition reproduces counts."""
    t0 = time.perf_counter()
    ok = True
    notes = []
    worst = 0
    for head in walks.iter_sampled_heads(2, 30, 10_000, PEIERLS_SEED):
        pc = path_classes.equivalence_class(head, 30)
        worst = max(worst, path_classes.verify_unique_identity(pc))
    if worst > 1:
        ok = False
        notes.append(f"class with {worst} identity members")
    for two_n in (2, 4, 6, 8):
        report = path_classes.partition_all_heads(2, two_n)
        exact = walks.exact_return_count(2, two_n).identity_count
        if not (
            report.is_partition
            and report.max_identity_members <= 1
            and report.classes_with_identity == exact
        ):
            ok = False
            notes.append(f"partition inconsistency at 2n={two_n}")
    detail = "; ".join(notes) if notes else f"10^4 classes, max identity members {worst}; partitions reproduce exact counts"
    return _finish(3, "flip-class uniqueness", 120.0, t0, ok, detail)


def criterion_4_decomposition() -> CriterionResult:
    """Regular spectrum equals the irrep assembly for the shipped graphs."""
    t0 = time.perf_counter()
    graphs = [
        spectra.FiniteGraph.complete(2),
        spectra.FiniteGraph.complete(3),
        spectra.FiniteGraph.complete(4),
        spectra.FiniteGraph.path(3),
        spectra.FiniteGraph.path(4),
        spectra.FiniteGraph.cycle(4),
    ]
    ok = True
    notes = []
    for graph in graphs:
        report = spectra.verify_decomposition(graph, tol=PAIRING_TOL)
        if report.max_pairing_deviation > PAIRING_TOL or not report.count_identity_ok:
            ok = False
            notes.append(f"{graph.name}: deviation {report.max_pairing_deviation:.2e}")
    detail = "; ".join(notes) if notes else "multiset equality within 1e-8, counts exact"
    return _finish(4, "irrep decomposition of the spectrum", 60.0, t0, ok, detail)


def criterion_5_kn_moments() -> CriterionResult:
    """Complete-graph moments: (N-1)/N at power 2; power-4 trend toward 2."""
    t0 = time.perf_counter()
    ok = True
    notes = []
    for N in range(2, 9):
        if spectra.kn_moment(N, 2).scaled != Fraction(N - 1, N):
            ok = False
            notes.append(f"power-2 moment wrong at N={N}")
    fourth = [spectra.kn_moment(N, 4).scaled for N in range(4, 9)]
    if not all(a < b for a, b in zip(fourth, fourth[1:])):
        ok = False
        notes.append("power-4 moments not increasing")
    if not all(value < 2 for value in fourth):
        ok = False
        notes.append("power-4 moments exceed the limit 2")
    detail = "; ".join(notes) if notes else "power-2 exact, power-4 monotone toward 2"
    return _finish(5, "complete-graph moment trend", 60.0, t0, ok, detail)


def criterion_6_dirichlet_lemmas() -> CriterionResult:
    """Cosine eigenpairs and subset-norm certificates."""
    t0 = time.perf_counter()
    ok = True
    notes = []
    for d in (1, 2):
        for L in range(1, 6):
            pair = dirichlet.cosine_eigenpair(d, L)
            if pair.residual > RESIDUAL_TOL:
                ok = False
                notes.append(f"residual {pair.residual:.1e} at d={d}, L={L}")
            if pair.eigenvalue < 1.0 - math.pi**2 / (8.0 * L * L):
                ok = False
                notes.append(f"eigenvalue below bound at d={d}, L={L}")
    rng = np.random.default_rng(SUBSET_SEED)
    for _ in range(100):
        size = int(rng.integers(2, 61))
        subset = dirichlet.random_connected_subset(2, size, rng)
        norm = dirichlet.operator_norm(subset)
        if norm > dirichlet.box_norm_bound(subset) + CROSSCHECK_TOL:
            ok = False
            notes.append(f"box bound violated at size {size}")
        extension = dirichlet.random_connected_subset(2, size + int(rng.integers(1, 10)), rng)
        merged = dirichlet.FiniteSubset.from_sites(set(subset.sites) | set(extension.sites))
        if norm > dirichlet.operator_norm(merged) + CROSSCHECK_TOL:
            ok = False
            notes.append(f"domain monotonicity violated at size {size}")
    detail = "; ".join(notes) if notes else "residuals <= 1e-10, bounds and monotonicity hold on 100 subsets"
    return _finish(6, "killed-walk operator lemmas", 60.0, t0, ok, detail)


def criterion_7_chain_inequality() -> CriterionResult:
    """Sandwich (1/m!) * stay <= chain <= stay, cross-checked against the
    killed-operator powers to 1e-12."""
    t0 = time.perf_counter()
    ok = True
    notes = []
    for d, L, max_two_n in ((1, 1, 20), (1, 2, 20), (2, 1, 40)):
        m_factorial = math.factorial((2 * L + 1) ** d)
        records = puzzle_chain.chain_return_profile(d, L, max_two_n)
        for record in records:
            if not (
                record.stay_return / m_factorial <= record.chain_return + 1e-15
                and record.chain_return <= record.stay_return + 1e-15
            ):
                ok = False
                notes.append(f"sandwich fails at d={d}, L={L}, 2n={record.two_n}")
            reference = dirichlet.box_return_probability(d, L, record.two_n)
            if abs(record.stay_return - reference) > CROSSCHECK_TOL:
                ok = False
                notes.append(f"stay_return mismatch at d={d}, L={L}, 2n={record.two_n}")
    detail = "; ".join(notes) if notes else "sandwich and 1e-12 cross-check hold up to 2n=40"
    return _finish(7, "decorated-chain inequality", 300.0, t0, ok, detail)


def criterion_8_ids_pipeline() -> CriterionResult:
    """Tail-bound validity in d=1, moment identity, d=2 ordering, fit self-test."""
    t0 = time.perf_counter()
    ok = True
    notes = []
    table1 = ids.exact_moment_table(1, 12)
    for eps in ids.default_eps_grid(1, 16):
        if ids.chebyshev_upper(float(eps), table1) < ids.ids_one_dim(-2.0 + float(eps)) - CROSSCHECK_TOL:
            ok = False
            notes.append(f"d=1 upper bound invalid at eps={eps:.3f}")
    for two_n in range(0, 11, 2):
        moment = ids.cdf_moment(ids.ids_one_dim, two_n)
        if abs(moment - math.comb(two_n, two_n // 2)) > MOMENT_QUAD_TOL:
            ok = False
            notes.append(f"arcsine moment off at 2n={two_n}")
    table2 = ids.exact_moment_table(2, 8)
    p_lower = {e.two_n: e.value for e in table2.sorted_entries() if e.two_n > 0}
    p_lower.update(
        {
            r.two_n: r.chain_return
            for r in puzzle_chain.chain_return_profile(2, 1, 20)
            if r.two_n > 8
        }
    )
    curve = ids.build_tail_curve(table2, p_lower)
    if not all(lo <= up + 1e-15 for lo, up in zip(curve.lower, curve.upper)):
        ok = False
        notes.append("d=2 lower envelope exceeds upper bound")
    eps = tuple(float(e) for e in ids.default_eps_grid(2, 12))
    synthetic = ids.TailBoundCurve(
        d=2,
        epsilons=eps,
        upper=tuple(math.exp(-1.0 / e) for e in eps),
        lower=tuple(0.0 for _ in eps),
        best_n_upper=tuple(0 for _ in eps),
        best_n_lower=tuple(0 for _ in eps),
    )
    fit = ids.lifshitz_fit(synthetic)
    if abs(fit.slope - 1.0) > FIT_SELFTEST_TOL:
        ok = False
        notes.append(f"fit self-test slope {fit.slope}")
    detail = "; ".join(notes) if notes else "bounds valid and ordered, moments to 1e-6, fit slope 1.0"
    return _finish(8, "tail-bound pipeline sanity", 60.0, t0, ok, detail)


def criterion_9_determinism() -> CriterionResult:
    """Identical configs give bit-identical CSV, independent of workers."""
    t0 = time.perf_counter()
    first = build_mc_return(2, 4, 200_000, MC_SEED, workers=1)
    second = build_mc_return(2, 4, 200_000, MC_SEED, workers=2)
    third = build_mc_return(2, 4, 200_000, MC_SEED, workers=1)
    csv_a = csv_content(first.csv_header, first.csv_rows)
    csv_b = csv_content(second.csv_header, second.csv_rows)
    csv_c = csv_content(third.csv_header, third.csv_rows)
    exact_a = build_exact_moments(2, 6)
    exact_b = build_exact_moments(2, 6)
    csv_d = csv_content(exact_a.csv_header, exact_a.csv_rows)
    csv_e = csv_content(exact_b.csv_header, exact_b.csv_rows)
    ok = csv_a == csv_b == csv_c and csv_d == csv_e
    detail = "mc (workers 1 vs 2) and exact payloads bit-identical" if ok else "payload bytes differ"
    return _finish(9, "bit-identical reruns", 120.0, t0, ok, detail)


ALL_CRITERIA: tuple[Callable[[], CriterionResult], ...] = (
    criterion_1_one_dim_moments,
    criterion_2_three_way_agreement,
    criterion_3_peierls_uniqueness,
    criterion_4_decomposition,
    criterion_5_kn_moments,
    criterion_6_dirichlet_lemmas,
    criterion_7_chain_inequality,
    criterion_8_ids_pipeline,
    criterion_9_determinism,
)


def run_all() -> list[CriterionResult]:
    results = []
    for criterion in ALL_CRITERIA:
        try:
            results.append(criterion())
        except Exception as exc:  # a crash is a failure, not an abort
            results.append(
                CriterionResult(
                    number=len(results) + 1,
                    name=criterion.__name__,
                    passed=False,
                    detail=f"raised {type(exc).__name__}: {exc}",
                    seconds=0.0,
                    limit_seconds=0.0,
                )
            )
    return results
