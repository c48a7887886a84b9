"""
Dense operator assembly on C^0(G) and C^1(G).

Builds the boundary operator d, the coboundary d*, the flip S, the weighted
walk W = S(c d*d - 1_A), the discriminant d S d*, positive supports, and the
dense eigensolver used as the brute-force oracle.

Matrices are plain complex numpy arrays indexed by vertices (|V|) or arcs
(|A|) in the Graph's arc order.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linear_sum_assignment

from . import config
from .errors import CapacityError, EigenSolverError, ParameterError, SchemeError
from .graph import Graph

logger = logging.getLogger(__name__)

ComplexMatrix = np.ndarray

PROVENANCES = (
    "inherited",     # phi^{-1} of a discriminant eigenvalue
    "exceptional",   # +-(cc'-1) contributed by +-c' in the discriminant spectrum
    "birth_plus",    # +1 living on ker(d) n H_-
    "birth_minus",   # -1 living on ker(d) n H_+
    "closed_form",   # closed-form support formula
    "observed",      # dense eigensolver
)


@dataclass(frozen=True)
class WeightScheme:
    """
    The quadruple (m_V, m_A, w, c) defining d, d* and W on one graph.

    Attributes:
        m_V: positive vertex measure, shape (|V|,)
        m_A: positive arc measure, shape (|A|,)
        w: complex arc weights, shape (|A|,)
        c: complex scalar in W = S(c d*d - 1_A)
    """

    m_V: np.ndarray
    m_A: np.ndarray
    w: np.ndarray
    c: complex = 2.0
    label: str = field(default="custom", compare=False)

    def __post_init__(self):
        m_V = np.array(self.m_V, dtype=float)
        m_A = np.array(self.m_A, dtype=float)
        w = np.array(self.w, dtype=complex)
        for name, arr in (("m_V", m_V), ("m_A", m_A)):
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                raise SchemeError(f"{name} must be a finite vector")
            if np.any(arr <= 0):
                bad = int(np.flatnonzero(arr <= 0)[0])
                raise SchemeError(f"{name}[{bad}] = {arr[bad]} is not positive")
        if w.ndim != 1 or w.shape != m_A.shape or not np.all(np.isfinite(w)):
            raise SchemeError("w must be a finite vector with one entry per arc")
        if not np.isfinite(complex(self.c)):
            raise SchemeError(f"c must be finite, got {self.c}")
        for arr in (m_V, m_A, w):
            arr.flags.writeable = False
        object.__setattr__(self, "m_V", m_V)
        object.__setattr__(self, "m_A", m_A)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "c", complex(self.c))

    @classmethod
    def uniform(cls, g: Graph, w: complex = 1.0, c: complex = 2.0,
                label: str = "uniform") -> "WeightScheme":
        """Scheme with m_V = 1, m_A = 1 and a constant arc weight."""
        return cls(np.ones(g.num_vertices), np.ones(g.num_arcs),
                   np.full(g.num_arcs, w, dtype=complex), c, label)

    def check_graph(self, g: Graph) -> None:
        """Raise SchemeError unless the array shapes match the graph."""
        if self.m_V.shape != (g.num_vertices,) or self.m_A.shape != (g.num_arcs,):
            raise SchemeError(
                f"Scheme shapes (|V|={self.m_V.size}, |A|={self.m_A.size}) do not "
                f"match graph (|V|={g.num_vertices}, |A|={g.num_arcs})"
            )


@dataclass(frozen=True)
class SpectralEntry:
    value: complex
    multiplicity: int
    provenance: str = "observed"


@dataclass(frozen=True)
class Spectrum:
    """
    Multiset of complex eigenvalues with algebraic multiplicities.

    Entries carry a provenance tag (see PROVENANCES); the same value may
    appear in several entries with different provenance.
    """

    entries: Tuple[SpectralEntry, ...] = ()

    @classmethod
    def from_values(cls, values: Iterable[complex], provenance: str = "observed",
                    cluster_tol: float = config.CLUSTER_TOL) -> "Spectrum":
        """Cluster raw eigenvalues into entries with multiplicities."""
        return cls(tuple(SpectralEntry(v, n, provenance)
                         for v, n in cluster_values(values, cluster_tol)))

    @property
    def dimension(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def values(self) -> np.ndarray:
        """Expanded eigenvalues, each repeated by its multiplicity."""
        out = [e.value for e in self.entries for _ in range(e.multiplicity)]
        return np.array(out, dtype=complex)

    def multiplicity_of(self, value: complex, tol: float = config.CLUSTER_TOL) -> int:
        return sum(e.multiplicity for e in self.entries if abs(e.value - value) <= tol)

    def __add__(self, other: "Spectrum") -> "Spectrum":
        return Spectrum(self.entries + other.entries)

    def __len__(self) -> int:
        return len(self.entries)


def cluster_values(values: Iterable[complex],
                   tol: float = config.CLUSTER_TOL) -> List[Tuple[complex, int]]:
    """
    Single-linkage clustering of complex numbers within an absolute tolerance.

    Returns (mean value, count) pairs sorted by (re, im).
    """
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=complex).ravel()
    if arr.size == 0:
        return []
    if arr.size == 1:
        return [(complex(arr[0]), 1)]
    points = np.column_stack([arr.real, arr.imag])
    labels = fcluster(linkage(points, method="single"), t=tol, criterion="distance")
    clusters = []
    for label in np.unique(labels):
        members = arr[labels == label]
        clusters.append((complex(members.mean()), int(members.size)))
    clusters.sort(key=lambda item: (round(item[0].real, 9), round(item[0].imag, 9)))
    return clusters


# Inner products on l^2(m_V; V) and l^2(m_A; A), weight on the right factor.

def inner_vertex(f1: np.ndarray, f2: np.ndarray, m_V: np.ndarray) -> complex:
    return complex(np.sum(np.conj(f1) * f2 * m_V))


def inner_arc(psi1: np.ndarray, psi2: np.ndarray, m_A: np.ndarray) -> complex:
    return complex(np.sum(np.conj(psi1) * psi2 * m_A))


def arc_norm(psi: np.ndarray, m_A: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(psi) ** 2 * m_A)))


def assemble_d(g: Graph, ws: WeightScheme) -> ComplexMatrix:
    """
    Boundary operator d: C^1 -> C^0, (d psi)(u) = sum_{t(e)=u} conj(w(e_bar)) psi(e).

    Examples:
        >>> assemble_d(named_graph("P2"), WeightScheme.uniform(named_graph("P2"))).real
        array([[0., 1.],
               [1., 0.]])
    """
    ws.check_graph(g)
    arcs = np.arange(g.num_arcs)
    d = np.zeros((g.num_vertices, g.num_arcs), dtype=complex)
    d[g.terminus, arcs] = np.conj(ws.w[arcs ^ 1])
    return d


def assemble_d_star(g: Graph, ws: WeightScheme) -> ComplexMatrix:
    """
    Coboundary d*: C^0 -> C^1, the adjoint of d for the weighted inner products.

    (d* f)(e) = f(t(e)) m_V(t(e)) w(e_bar) / m_A(e)
    """
    ws.check_graph(g)
    arcs = np.arange(g.num_arcs)
    d_star = np.zeros((g.num_arcs, g.num_vertices), dtype=complex)
    d_star[arcs, g.terminus] = ws.m_V[g.terminus] * ws.w[arcs ^ 1] / ws.m_A
    return d_star


def assemble_S(g: Graph) -> ComplexMatrix:
    """Flip S: (S psi)(e) = psi(e_bar), a permutation matrix with S^2 = 1_A."""
    arcs = np.arange(g.num_arcs)
    s = np.zeros((g.num_arcs, g.num_arcs), dtype=complex)
    s[arcs, arcs ^ 1] = 1.0
    return s


def _check_dense(g: Graph) -> None:
    if g.num_arcs > config.MAX_DENSE_DIMENSION:
        raise CapacityError(
            f"|A| = {g.num_arcs} exceeds the dense cap of {config.MAX_DENSE_DIMENSION}"
        )


def c_prime_per_vertex(g: Graph, ws: WeightScheme) -> np.ndarray:
    """Per-vertex sum_{t(e)=u} m_V(t(e)) |w(e_bar)|^2 / m_A(e)."""
    ws.check_graph(g)
    arcs = np.arange(g.num_arcs)
    terms = ws.m_V[g.terminus] * np.abs(ws.w[arcs ^ 1]) ** 2 / ws.m_A
    return np.bincount(g.terminus, weights=terms, minlength=g.num_vertices)


def compute_c_prime(g: Graph, ws: WeightScheme, tol: float = config.C_PRIME_TOL) -> float:
    """
    The constant c' of the scheme.

    Raises:
        SchemeError: if the per-vertex values differ by more than tol (relative)

    Examples:
        >>> compute_c_prime(named_graph("petersen"), WeightScheme.uniform(named_graph("petersen"), c=1))
        3.0
    """
    values = c_prime_per_vertex(g, ws)
    scale = max(1.0, float(np.max(np.abs(values))))
    spread = float(np.max(values) - np.min(values))
    if spread > tol * scale:
        worst = int(np.argmax(np.abs(values - values[0])))
        raise SchemeError(
            f"c' is not constant: vertex 0 gives {values[0]:.12g}, "
            f"vertex {worst} gives {values[worst]:.12g}"
        )
    c_prime = float(np.mean(values))
    report = dd_star_report(g, ws)
    logger.debug("c' = %.12g, dd* diagonal=%s (max off-diagonal %.3g)",
                 c_prime, report["is_diagonal"], report["max_off_diagonal"])
    return c_prime


def dd_star_report(g: Graph, ws: WeightScheme) -> dict:
    """
    Check d d* numerically instead of assuming d d* = c' 1_V.

    Returns:
        dict with keys is_diagonal, diagonal, max_off_diagonal
    """
    product = assemble_d(g, ws) @ assemble_d_star(g, ws)
    diagonal = np.diag(product).copy()
    off = product - np.diag(diagonal)
    max_off = float(np.max(np.abs(off))) if off.size else 0.0
    return {
        "is_diagonal": max_off <= config.OPERATOR_TOL,
        "diagonal": diagonal,
        "max_off_diagonal": max_off,
    }


def validate_walk_scheme(g: Graph, ws: WeightScheme) -> float:
    """Check c' constancy and c c' != 1; return c'."""
    c_prime = compute_c_prime(g, ws)
    if abs(ws.c * c_prime - 1.0) <= config.C_PRIME_TOL:
        raise SchemeError(f"c c' = {ws.c * c_prime} equals 1; the spectral map is undefined")
    return c_prime


def assemble_W(g: Graph, ws: WeightScheme) -> ComplexMatrix:
    """
    Weighted walk W = S (c d* d - 1_A).

    Raises:
        SchemeError: non-constant c' or c c' = 1
        CapacityError: |A| above the dense cap
    """
    _check_dense(g)
    validate_walk_scheme(g, ws)
    d = assemble_d(g, ws)
    d_star = assemble_d_star(g, ws)
    return assemble_S(g) @ (ws.c * (d_star @ d) - np.eye(g.num_arcs))


def discriminant(g: Graph, ws: WeightScheme) -> ComplexMatrix:
    """The |V| x |V| discriminant d S d*."""
    return assemble_d(g, ws) @ assemble_S(g) @ assemble_d_star(g, ws)


def positive_support(M: np.ndarray, mode: str = "positive",
                     tol: float = config.SUPPORT_TOL) -> np.ndarray:
    """
    0/1 support matrix of M.

    Args:
        M: square matrix; integer matrices are treated exactly
        mode: "positive" marks strictly positive entries (real part above tol,
            imaginary part within tol); "nonzero" marks |M_ij| > tol
        tol: threshold for floating matrices

    Returns:
        int64 matrix of zeros and ones
    """
    arr = np.asarray(M)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ParameterError(f"positive_support needs a square matrix, got shape {arr.shape}")
    if mode not in ("positive", "nonzero"):
        raise ParameterError(f"Unknown support mode: {mode}")

    if np.issubdtype(arr.dtype, np.integer) or arr.dtype == bool:
        mask = arr > 0 if mode == "positive" else arr != 0
    elif mode == "positive":
        mask = (arr.real > tol) & (np.abs(arr.imag) <= tol)
    else:
        mask = np.abs(arr) > tol
    return mask.astype(np.int64)


def eig(M: np.ndarray, vectors: bool = False,
        cluster_tol: float = config.CLUSTER_TOL
        ) -> Union[Spectrum, Tuple[Spectrum, np.ndarray, np.ndarray]]:
    """
    Dense nonsymmetric eigensolve with a residual guarantee.

    Every returned pair satisfies ||M v - lambda v||_2 <= RESIDUAL_TOL * ||M||_2.

    Args:
        M: square finite matrix, dimension <= MAX_DENSE_DIMENSION
        vectors: also return raw eigenvalues and unit eigenvectors (columns)
        cluster_tol: clustering tolerance for multiplicities

    Raises:
        CapacityError: dimension over cap
        EigenSolverError: non-convergence or residual violation
    """
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise EigenSolverError(f"eig needs a square matrix, got shape {arr.shape}")
    if arr.shape[0] > config.MAX_DENSE_DIMENSION:
        raise CapacityError(
            f"dimension {arr.shape[0]} exceeds the dense cap of {config.MAX_DENSE_DIMENSION}"
        )
    if not np.all(np.isfinite(arr)):
        raise EigenSolverError("Matrix has non-finite entries")

    try:
        values, vecs = scipy.linalg.eig(arr)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"Dense eigensolver failed: {exc}") from exc

    norm2 = float(np.linalg.norm(arr, 2)) if arr.size else 0.0
    residuals = np.linalg.norm(arr @ vecs - vecs * values, axis=0)
    bound = config.RESIDUAL_TOL * max(norm2, np.finfo(float).tiny)
    if residuals.size and float(np.max(residuals)) > bound:
        raise EigenSolverError(
            f"Eigenpair residual {np.max(residuals):.3g} exceeds {bound:.3g}"
        )

    spectrum = Spectrum.from_values(values, "observed", cluster_tol)
    if vectors:
        return spectrum, values, vecs
    return spectrum


def matching_distance(a: Iterable[complex], b: Iterable[complex]) -> float:
    """
    Largest pairwise gap under the optimal one-to-one matching of two multisets.

    Returns inf when the sizes differ.
    """
    a = np.asarray(list(a), dtype=complex)
    b = np.asarray(list(b), dtype=complex)
    if a.size != b.size:
        return float("inf")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
