"""
Equilateral quantum-graph walk.

On a kappa-regular graph with common edge length L and common delta-type
boundary parameter alpha, the scattering walk at wave number k is

    U~ = e^{ikL} S (c d*d - 1_A),  c = 2 kappa / (kappa + i q),  q = alpha / k,

with w = 1/sqrt(kappa) and m = 1. Non-trivial quantum-graph solutions at k
exist exactly when 1 is an eigenvalue of U~.
"""

import cmath
import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import config
from .errors import ParameterError
from .graph import Graph
from .operators import ComplexMatrix, WeightScheme, assemble_W, eig, matching_distance
from .spectral_map import MappedSpectrum, SpectralMapParams, mapped_spectrum, phi_inverse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QGraphParams:
    """
    Homogeneous quantum-graph parameters.

    Attributes:
        k: wave number, positive
        L: common edge length, positive
        alpha: common boundary parameter, |alpha| <= ALPHA_CAP
        kappa: common degree; filled from the graph when omitted
    """

    k: float
    L: float
    alpha: float = 0.0
    kappa: Optional[int] = None

    def __post_init__(self):
        for name in ("k", "L", "alpha"):
            value = getattr(self, name)
            if np.ndim(value) != 0:
                raise ParameterError(
                    f"{name} must be a single value; vertex- or edge-dependent "
                    f"parameters are not supported"
                )
            if not math.isfinite(float(value)):
                raise ParameterError(f"{name} must be finite, got {value}")
        if self.k <= 0:
            raise ParameterError(f"k must be positive, got {self.k}")
        if self.L <= 0:
            raise ParameterError(f"L must be positive, got {self.L}")
        if abs(self.alpha) > config.ALPHA_CAP:
            raise ParameterError(f"|alpha| = {abs(self.alpha)} exceeds the cap {config.ALPHA_CAP:g}")

    @property
    def q(self) -> float:
        return self.alpha / self.k

    @property
    def phase(self) -> complex:
        return cmath.exp(1j * self.k * self.L)

    def resolve(self, g: Graph) -> "QGraphParams":
        """Bind kappa to the graph's common degree."""
        prof = g.profile
        if not prof.is_regular:
            raise ParameterError("Quantum-graph walk needs a regular graph")
        if self.kappa is not None and self.kappa != prof.degree:
            raise ParameterError(f"kappa = {self.kappa} but the graph is {prof.degree}-regular")
        return replace(self, kappa=prof.degree)


@dataclass(frozen=True)
class ScanRoot:
    """A refined k with 1 in the spectrum of U~(k)."""

    k: float
    lower: float
    upper: float
    multiplicity: int
    distance: float


@dataclass(frozen=True)
class ScanResult:
    roots: Tuple[ScanRoot, ...]
    families: Tuple[Tuple[float, str], ...]


def qgraph_coefficients(kappa: int, q: float) -> Tuple[complex, float, complex]:
    """
    (tau, gamma, c) for degree kappa and q = alpha / k.

    tau = 2 / (kappa + iq), gamma = arg(tau) in (-pi/2, pi/2),
    c = 2 kappa / (kappa + iq), so c - 1 = e^{2i gamma}.
    """
    if kappa < 1:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    tau = 2.0 / complex(kappa, q)
    gamma = cmath.phase(tau)
    c = 2.0 * kappa / complex(kappa, q)
    return tau, gamma, c


def qgraph_scheme(g: Graph, p: QGraphParams) -> WeightScheme:
    p = p.resolve(g)
    _, _, c = qgraph_coefficients(p.kappa, p.q)
    return WeightScheme.uniform(g, w=1.0 / math.sqrt(p.kappa), c=c, label="qgraph")


def build_qgraph_walk(g: Graph, p: QGraphParams) -> ComplexMatrix:
    """
    U~ = e^{ikL} S (c d*d - 1_A).

    Raises:
        ParameterError: non-regular graph or invalid parameters
    """
    return p.phase * assemble_W(g, qgraph_scheme(g, p))


def assemble_qgraph_direct(g: Graph, p: QGraphParams) -> ComplexMatrix:
    """
    Entrywise scattering form: (U~ psi)(e) = e^{ikL} sum_{t(f)=o(e)} (tau - [f = e_bar]) psi(f).
    """
    p = p.resolve(g)
    tau, _, _ = qgraph_coefficients(p.kappa, p.q)
    arcs = np.arange(g.num_arcs)
    u = tau * (g.origin[:, None] == g.terminus[None, :]).astype(complex)
    u[arcs, arcs ^ 1] -= 1.0
    return p.phase * u


def case_table_birth_set(g: Graph, q: float) -> FrozenSet[int]:
    """
    +-1 extras of the quantum-graph case table.

    Tree, or q != 0 with at most one cycle: none. q = 0 with a single odd
    cycle: {1}. Otherwise {1, -1}.
    """
    prof = g.profile
    if prof.is_tree or (q != 0 and prof.cycle_rank <= 1):
        return frozenset()
    if q == 0 and prof.cycle_rank == 1 and not prof.is_bipartite:
        return frozenset({1})
    return frozenset({1, -1})


def closed_form_values(g: Graph, p: QGraphParams) -> np.ndarray:
    """
    e^{ikL} [ e^{i gamma} phi_1^{-1}(cos(gamma) sigma(P)) with {+-1}^{|E|-|V|} ].

    A negative exponent removes one copy of +-1 per unit.
    """
    p = p.resolve(g)
    _, gamma, _ = qgraph_coefficients(p.kappa, p.q)
    unit = SpectralMapParams(2.0, 1.0)
    rotation = cmath.exp(1j * gamma)
    values: List[complex] = []
    for entry in eig(g.adjacency_matrix() / p.kappa).entries:
        pair = phi_inverse(unit, math.cos(gamma) * entry.value)
        values.extend([rotation * pair[0], rotation * pair[1]] * entry.multiplicity)

    extra = g.num_edges - g.num_vertices
    for sign in (1.0, -1.0):
        if extra >= 0:
            values.extend([sign] * extra)
            continue
        for _ in range(-extra):
            idx = int(np.argmin([abs(v - sign) for v in values]))
            values.pop(idx)
    return p.phase * np.array(values, dtype=complex)


def qgraph_spectrum(g: Graph, p: QGraphParams) -> MappedSpectrum:
    """
    Spectrum of U~ through the spectral map, cross-checked two ways.

    The mapped spectrum comes from the discriminant of the quantum-graph
    scheme; it is compared with the rotated random-walk closed form and
    with a dense eigensolve of U~. The case-table extras are attached as
    birth_set.
    """
    p = p.resolve(g)
    ws = qgraph_scheme(g, p)
    mapped = mapped_spectrum(g, ws, phase=p.phase)
    mapped = replace(mapped, birth_set=case_table_birth_set(g, p.q))

    values = mapped.values()
    closed_gap = matching_distance(values, closed_form_values(g, p))
    eig_gap = matching_distance(values, eig(p.phase * assemble_W(g, ws)).values())
    for label, gap in (("closed form", closed_gap), ("dense eigensolve", eig_gap)):
        if gap > config.SPECTRUM_TOL:
            warnings.warn(f"Quantum-graph spectrum deviates from the {label} by {gap:.3g}",
                          RuntimeWarning)
    logger.debug("qgraph k=%g L=%g alpha=%g: closed-form gap %.3g, eig gap %.3g",
                 p.k, p.L, p.alpha, closed_gap, eig_gap)
    return mapped


def _nearest_to_one(g: Graph, L: float, alpha: float, k: float) -> Tuple[float, float, int]:
    values = np.linalg.eigvals(build_qgraph_walk(g, QGraphParams(k, L, alpha)))
    gaps = np.abs(values - 1.0)
    nearest = values[int(np.argmin(gaps))]
    count = int(np.sum(gaps <= config.ROOT_TOL))
    return float(np.angle(nearest)), float(gaps.min()), count


def analytic_families(g: Graph, L: float, k_range: Tuple[float, float]) -> Tuple[Tuple[float, str], ...]:
    """k = 2n pi / L and (2n+1) pi / L inside k_range, for graphs with a cycle."""
    if g.profile.is_tree:
        return ()
    lo, hi = k_range
    found = []
    n = max(1, math.ceil(lo * L / math.pi))
    while n * math.pi / L <= hi:
        k = n * math.pi / L
        found.append((k, "2n*pi/L" if n % 2 == 0 else "(2n+1)*pi/L"))
        n += 1
    return tuple(found)


def scan_nontrivial_k(g: Graph, L: float, alpha: float,
                      k_range: Tuple[float, float], grid: int) -> ScanResult:
    """
    Find k in k_range where 1 is an eigenvalue of U~(k).

    The phase of the eigenvalue nearest 1 is sampled on a uniform grid; sign
    changes are refined by bisection to ROOT_WIDTH and kept when the
    eigenvalue lands within ROOT_TOL of 1. A grid sample already within
    ROOT_TOL is bisected inside a neighbouring bracket (one step past the
    range ends if needed), or the gap is minimised when neither bracket
    changes sign. A k_min of 0 is skipped.

    Raises:
        ParameterError: empty or negative range, grid < 2
    """
    k_min, k_max = (float(x) for x in k_range)
    if grid < 2:
        raise ParameterError(f"grid must be at least 2, got {grid}")
    if k_min < 0 or k_max <= k_min:
        raise ParameterError(f"Invalid k range [{k_min}, {k_max}]")
    QGraphParams(k_max, L, alpha).resolve(g)

    ks = np.linspace(k_min, k_max, grid)
    ks = ks[ks > 0]
    step = float(ks[1] - ks[0]) if ks.size > 1 else k_max - k_min
    samples = [_nearest_to_one(g, L, alpha, k) for k in ks]

    def sample(i: int) -> Tuple[float, float]:
        """(k, angle) at grid index i; one step past either end of the grid."""
        if 0 <= i < ks.size:
            return float(ks[i]), samples[i][0]
        k = float(ks[0]) - step if i < 0 else float(ks[-1]) + step
        if k <= 0:
            k = 0.5 * float(ks[0])
        return k, _nearest_to_one(g, L, alpha, k)[0]

    roots: List[ScanRoot] = []

    def accept(lo: float, hi: float) -> None:
        k_root = 0.5 * (lo + hi)
        _, gap_root, count_root = _nearest_to_one(g, L, alpha, k_root)
        if gap_root > config.ROOT_TOL:
            logger.debug("discarded phase jump near k=%.9g (gap %.3g)", k_root, gap_root)
            return
        if roots and abs(roots[-1].k - k_root) <= 10 * config.ROOT_WIDTH:
            return
        roots.append(ScanRoot(k_root, lo, hi, max(count_root, 1), gap_root))

    for i, (k, (angle, gap, _)) in enumerate(zip(ks, samples)):
        k = float(k)
        if gap <= config.ROOT_TOL:
            # grid point within ROOT_TOL of a root: refine inside a neighbouring bracket
            left_k, left_angle = sample(i - 1)
            right_k, right_angle = sample(i + 1)
            if np.sign(left_angle) != np.sign(angle):
                accept(*_bisect_angle(g, L, alpha, left_k, k, left_angle))
            elif np.sign(angle) != np.sign(right_angle):
                accept(*_bisect_angle(g, L, alpha, k, right_k, angle))
            else:
                found = minimize_scalar(lambda x: _nearest_to_one(g, L, alpha, x)[1],
                                        bounds=(left_k, right_k), method="bounded",
                                        options={"xatol": config.ROOT_WIDTH})
                accept(float(found.x) - 0.5 * config.ROOT_WIDTH, float(found.x) + 0.5 * config.ROOT_WIDTH)
            continue
        if i + 1 == ks.size:
            break
        next_angle, next_gap, _ = samples[i + 1]
        if next_gap <= config.ROOT_TOL or np.sign(angle) == np.sign(next_angle):
            continue
        accept(*_bisect_angle(g, L, alpha, k, float(ks[i + 1]), angle))

    return ScanResult(tuple(roots), analytic_families(g, L, (max(k_min, 0.0), k_max)))


def _bisect_angle(g: Graph, L: float, alpha: float, lo: float, hi: float,
                  lo_angle: float) -> Tuple[float, float]:
    """Shrink [lo, hi] around a sign change of the phase nearest 1 to ROOT_WIDTH."""
    while hi - lo > config.ROOT_WIDTH:
        mid = 0.5 * (lo + hi)
        mid_angle, _, _ = _nearest_to_one(g, L, alpha, mid)
        if mid_angle == 0.0:
            return mid, mid
        if np.sign(mid_angle) == np.sign(lo_angle):
            lo, lo_angle = mid, mid_angle
        else:
            hi = mid
    return lo, hi


def eigen_count_near_one(g: Graph, L: float, alpha: float, k: float) -> int:
    """Number of eigenvalues of U~(k) within ROOT_TOL of 1."""
    return _nearest_to_one(g, L, alpha, k)[2]
