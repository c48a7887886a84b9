"""
Brute-force oracle: multiset comparison and the corpus-wide theorem suite.

Every closed-form spectrum produced by the package is checked against a
dense eigensolve of the explicitly assembled operator. Failures are data:
the suite returns one ComparisonReport per (graph, check).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import config
from .errors import ParameterError, QWSError
from .graph import Graph, named_graph, random_connected_graph
from .operators import Spectrum, WeightScheme, assemble_W, discriminant, eig
from .qgraph import QGraphParams, build_qgraph_walk, qgraph_spectrum
from .spectral_map import intertwining_residual, lift_eigenvector, mapped_spectrum, szegedy_spectrum
from .support import intertwiner_check_cube, support_spectrum, verify_cube_identity
from .szegedy import (
    build_setting1,
    build_setting2,
    is_norm_preserving,
    simple_random_walk_weights,
    solve_detailed_balance,
    uniform_setting1_weights,
    verify_conjugation,
)

logger = logging.getLogger(__name__)

THEOREMS = ("spectral-map", "conjugation", "szegedy", "qgraph", "supports")

BUILTIN_NAMES = ("P3", "P5", "C4", "C5", "C6", "K4", "K5", "K3,3", "petersen", "K1,3", "dodecahedron")

QGRAPH_POINTS = ((1.0, 1.0, 0.0), (2.0, 1.0, 1.0), (0.7, 2.5, -3.0))

Values = Union[Spectrum, Sequence[complex], np.ndarray]


@dataclass(frozen=True)
class ComparisonReport:
    """
    Result of one check.

    Attributes:
        matched_pairs: (claimed, observed, |difference|)
        unmatched_claimed, unmatched_observed: leftovers of the matching
        max_error: largest matched difference, or the residual of an identity check
        tol: acceptance threshold for max_error
        graph, theorem, note: labels for reporting
    """

    matched_pairs: Tuple[Tuple[complex, complex, float], ...]
    unmatched_claimed: Tuple[complex, ...]
    unmatched_observed: Tuple[complex, ...]
    max_error: float
    tol: float
    graph: str = ""
    theorem: str = ""
    note: str = ""

    @property
    def passed(self) -> bool:
        return (not self.unmatched_claimed and not self.unmatched_observed
                and self.max_error <= self.tol)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def labelled(self, graph: str, theorem: str, note: str = "") -> "ComparisonReport":
        return ComparisonReport(self.matched_pairs, self.unmatched_claimed,
                                self.unmatched_observed, self.max_error, self.tol,
                                graph, theorem, note or self.note)


def _expand(values: Values) -> np.ndarray:
    if isinstance(values, Spectrum):
        values = values.values()
    arr = np.asarray(values, dtype=complex).ravel()
    order = np.lexsort((arr.imag, arr.real))
    return arr[order]


def _report(claimed: np.ndarray, observed: np.ndarray, pairs: List[Tuple[int, int]],
            tol: float) -> ComparisonReport:
    matched = []
    used_c, used_o = set(), set()
    for i, j in pairs:
        gap = float(abs(claimed[i] - observed[j]))
        if gap <= tol:
            matched.append((complex(claimed[i]), complex(observed[j]), gap))
            used_c.add(i)
            used_o.add(j)
    return ComparisonReport(
        tuple(matched),
        tuple(complex(v) for i, v in enumerate(claimed) if i not in used_c),
        tuple(complex(v) for j, v in enumerate(observed) if j not in used_o),
        max((m[2] for m in matched), default=0.0),
        tol,
    )


def compare_multisets(claimed: Values, observed: Values,
                      tol: float = config.SPECTRUM_TOL) -> ComparisonReport:
    """
    Match two eigenvalue multisets within tol.

    Greedy nearest-neighbour matching on the expanded, (re, im)-sorted values;
    if that leaves anything unmatched, an optimal assignment is tried before
    the mismatch is reported.

    Examples:
        >>> compare_multisets([1, 1], [1]).passed
        False
    """
    a = _expand(claimed)
    b = _expand(observed)

    free = list(range(b.size))
    greedy = []
    for i, value in enumerate(a):
        if not free:
            break
        gaps = [abs(value - b[j]) for j in free]
        best = int(np.argmin(gaps))
        greedy.append((i, free.pop(best)))
    report = _report(a, b, greedy, tol)
    if report.passed or a.size == 0 or b.size == 0:
        return report

    rows, cols = linear_sum_assignment(np.abs(a[:, None] - b[None, :]))
    fallback = _report(a, b, list(zip(rows.tolist(), cols.tolist())), tol)
    if len(fallback.unmatched_claimed) < len(report.unmatched_claimed):
        logger.debug("optimal assignment recovered %d extra matches",
                     len(report.unmatched_claimed) - len(fallback.unmatched_claimed))
        return fallback
    return report


def identity_report(residual: float, tol: float, graph: str, theorem: str,
                    note: str = "") -> ComparisonReport:
    """Report for an entrywise identity with a scalar residual."""
    return ComparisonReport((), (), (), float(residual), tol, graph, theorem, note)


def builtin_corpus(random_count: int = 10) -> List[Tuple[str, Graph]]:
    """Named graphs plus seeded random connected graphs with n = 4 + seed % 7."""
    corpus = [(name, named_graph(name)) for name in BUILTIN_NAMES]
    for seed in range(random_count):
        n = 4 + seed % 7
        m = n - 1 + seed % 4
        corpus.append((f"random-{seed}", random_connected_graph(n, m, seed)))
    return corpus


def _is_regular(g: Graph, min_degree: int = 2) -> bool:
    prof = g.profile
    return prof.is_regular and prof.degree >= min_degree


def _check_spectral_map(name: str, g: Graph, tol: float) -> List[ComparisonReport]:
    schemes = [
        build_setting1(g, uniform_setting1_weights(g))[0],
        build_setting2(g, simple_random_walk_weights(g), g.degrees.astype(float))[0],
    ]
    if _is_regular(g):
        schemes.append(WeightScheme.uniform(g, w=1.0, c=1.0, label="support"))
    else:
        logger.info("%s: not regular, skipping the unit-weight support scheme", name)

    reports = []
    for ws in schemes:
        mapped = mapped_spectrum(g, ws)
        observed = eig(assemble_W(g, ws))
        reports.append(compare_multisets(mapped.to_spectrum(), observed, tol)
                       .labelled(name, f"spectral-map/{ws.label}"))
        reports.append(identity_report(intertwining_residual(g, ws), config.OPERATOR_TOL * 10,
                                       name, f"intertwining/{ws.label}"))

    grover = schemes[0]
    _, values, vectors = eig(discriminant(g, grover), vectors=True)
    worst = 0.0
    for idx in range(values.size):
        for lifted in lift_eigenvector(g, grover, values[idx], vectors[:, idx]):
            worst = max(worst, lifted.residual)
    reports.append(identity_report(worst, config.RESIDUAL_TOL, name, "lifting/setting1"))
    return reports


def _check_conjugation(name: str, g: Graph, tol: float) -> List[ComparisonReport]:
    report = verify_conjugation(g, uniform_setting1_weights(g).real, 20, seed=0)
    return [
        identity_report(report.max_operator_error, 1e-9, name, "conjugation/operator"),
        identity_report(report.max_distribution_error, config.WEIGHT_TOL, name,
                        "conjugation/distribution"),
    ]


def _observed_births(observed: Spectrum, disc: Spectrum) -> frozenset:
    out = set()
    for sign in (1, -1):
        extra = (observed.multiplicity_of(sign, config.SPECTRUM_TOL)
                 - disc.multiplicity_of(sign, config.SPECTRUM_TOL))
        if extra > 0:
            out.add(sign)
    return frozenset(out)


def _check_szegedy(name: str, g: Graph, tol: float) -> List[ComparisonReport]:
    reports = []
    for setting, weights in ((1, uniform_setting1_weights(g)), (2, simple_random_walk_weights(g))):
        if setting == 1:
            ws, u = build_setting1(g, weights)
        else:
            ws, u = build_setting2(g, weights, solve_detailed_balance(g, weights))
        result = szegedy_spectrum(g, setting, weights)
        observed = eig(u)
        reports.append(compare_multisets(result.to_spectrum(), observed, tol)
                       .labelled(name, f"szegedy/setting{setting}"))

        births = _observed_births(observed, result.discriminant_spectrum)
        ok = births == result.birth_set
        reports.append(identity_report(
            0.0 if ok else 1.0, 0.0, name, f"szegedy/birth-set{setting}",
            f"table {sorted(result.birth_set)} observed {sorted(births)}"))

        unit = is_norm_preserving(u, ws.m_A)
        reports.append(identity_report(0.0 if unit else 1.0, 0.0, name,
                                       f"szegedy/norm{setting}"))
    return reports


def _check_qgraph(name: str, g: Graph, tol: float) -> List[ComparisonReport]:
    reports = []
    for k, length, alpha in QGRAPH_POINTS:
        p = QGraphParams(k, length, alpha)
        u = build_qgraph_walk(g, p)
        label = f"qgraph/k={k:g},L={length:g},alpha={alpha:g}"
        reports.append(compare_multisets(qgraph_spectrum(g, p).to_spectrum(), eig(u), tol)
                       .labelled(name, label))
        unitary_gap = float(np.max(np.abs(u @ np.conj(u.T) - np.eye(g.num_arcs))))
        reports.append(identity_report(unitary_gap, config.OPERATOR_TOL, name, label + "/unitary"))
    return reports


def _check_supports(name: str, g: Graph, tol: float) -> List[ComparisonReport]:
    reports = []
    girth = g.profile.girth
    for j in (1, 2, 3):
        if j == 3 and girth < 5:
            logger.info("%s: girth %s < 5, (U^3)+ routed to the cube-identity control", name, girth)
            continue
        result = support_spectrum(g, j)
        note = "" if result.theorem_applies else "hypotheses not met; expected deviation"
        reports.append(identity_report(0.0 if result.consistent else result.deviation, 0.0,
                                       name, f"supports/j={j}", note))

    cube = verify_cube_identity(g)
    note = "positive check" if cube.theorem_applies else "negative control"
    reports.append(identity_report(0.0 if cube.consistent else float(cube.mismatches), 0.0,
                                   name, "supports/cube-identity", note))
    if cube.theorem_applies:
        inter = intertwiner_check_cube(g)
        reports.append(identity_report(0.0 if inter.holds else max(inter.residual, 1.0), 0.0,
                                       name, "supports/cube-intertwining"))
    return reports


_CHECKS: Dict[str, Callable[[str, Graph, float], List[ComparisonReport]]] = {
    "spectral-map": _check_spectral_map,
    "conjugation": _check_conjugation,
    "szegedy": _check_szegedy,
    "qgraph": _check_qgraph,
    "supports": _check_supports,
}


def _applicable(theorem: str, g: Graph) -> Optional[str]:
    """Reason a graph is filtered out of a check, or None."""
    if theorem in ("qgraph", "supports") and not _is_regular(g, 2 if theorem == "supports" else 1):
        return "not regular"
    return None


def _run_one(task: Tuple[str, Graph, str, float]) -> List[ComparisonReport]:
    name, g, theorem, tol = task
    try:
        return _CHECKS[theorem](name, g, tol)
    except QWSError as exc:
        logger.warning("%s/%s failed: %s", name, theorem, exc)
        return [identity_report(float("inf"), 0.0, name, theorem, str(exc))]


def run_theorem_suite(corpus: Iterable[Union[Graph, Tuple[str, Graph]]], which: str = "all",
                      tol: float = config.SPECTRUM_TOL,
                      threads: Optional[int] = None) -> List[ComparisonReport]:
    """
    Run the selected checks over a corpus on a thread pool.

    Args:
        corpus: graphs, optionally paired with a display name
        which: one of THEOREMS or "all"
        tol: eigenvalue matching tolerance
        threads: worker cap; QWS_THREADS or the core count when omitted

    Returns:
        reports in corpus order, then check order
    """
    if which != "all" and which not in THEOREMS:
        raise ParameterError(f"Unknown check {which!r}; choose from {', '.join(THEOREMS)} or all")
    selected = THEOREMS if which == "all" else (which,)

    tasks = []
    for index, item in enumerate(corpus):
        name, g = item if isinstance(item, tuple) else (f"graph-{index}", item)
        for theorem in selected:
            reason = _applicable(theorem, g)
            if reason:
                logger.info("%s: skipping %s (%s)", name, theorem, reason)
                continue
            tasks.append((name, g, theorem, tol))

    if not tasks:
        return []
    workers = threads or config.thread_count()
    with ThreadPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        batches = list(pool.map(_run_one, tasks))
    reports = [report for batch in batches for report in batch]
    failed = sum(not r.passed for r in reports)
    logger.info("theorem suite: %d checks, %d failed", len(reports), failed)
    return reports
