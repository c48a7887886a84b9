"""
Positive supports of Grover walk powers on regular graphs.

With w = 1 and m = 1 the strictly positive part of the Grover matrix U is
U+ = S(d*d - 1_A), the transpose of the non-backtracking matrix. For a
kappa-regular graph with adjacency spectrum sigma(M):

    sigma(U+)     = {s1(l)} + {1}^{|E|-|V|} + {-1}^{|E|-|V|}
    sigma((U^2)+) = {s2(l)} + {2}^{2(|E|-|V|)}
    sigma((U^3)+) = {s3(l)} + {2}^{|E|-|V|} + {-2}^{|E|-|V|}     (girth >= 5)

The j = 2 and j = 3 forms need kappa >= 3; cycles make U a permutation.
"""

import cmath
import io
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from . import config
from .errors import GraphError, ParameterError
from .graph import Graph
from .operators import SpectralEntry, Spectrum, eig, matching_distance, positive_support

logger = logging.getLogger(__name__)

SUPPORT_ORDERS = (1, 2, 3)


@dataclass(frozen=True)
class MappedPair:
    source: float
    multiplicity: int
    plus: complex
    minus: complex

    @property
    def degenerate(self) -> bool:
        return abs(self.plus - self.minus) <= config.SUPPORT_SPECTRUM_TOL


@dataclass(frozen=True)
class SupportSpectrumResult:
    """
    Closed-form spectrum of (U^j)+ with its numerical cross-check.

    Attributes:
        j: power of U
        kappa: common degree
        adjacency_spectrum: sigma(M) with multiplicities
        mapped_pairs: (s_plus, s_minus) of every adjacency eigenvalue
        extras: the +-1 / 2 / +-2 eigenvalues living off d*(C^0) + Sd*(C^0)
        theorem_applies: kappa and girth meet the closed form's hypotheses
        deviation: matching distance to the eigenvalues of the assembled matrix
        trace: exact integer trace of the assembled support matrix
    """

    j: int
    kappa: int
    adjacency_spectrum: Spectrum
    mapped_pairs: Tuple[MappedPair, ...]
    extras: Tuple[SpectralEntry, ...]
    theorem_applies: bool
    deviation: float
    trace: int

    @property
    def degenerate_flags(self) -> Tuple[float, ...]:
        return tuple(p.source for p in self.mapped_pairs if p.degenerate)

    @property
    def matches(self) -> bool:
        return self.deviation <= config.SUPPORT_SPECTRUM_TOL

    @property
    def consistent(self) -> bool:
        """The numerical check agrees with what the hypotheses promise."""
        return self.matches == self.theorem_applies

    def to_spectrum(self) -> Spectrum:
        entries = []
        for pair in self.mapped_pairs:
            entries.append(SpectralEntry(pair.plus, pair.multiplicity, "closed_form"))
            entries.append(SpectralEntry(pair.minus, pair.multiplicity, "closed_form"))
        entries.extend(self.extras)
        return Spectrum(tuple(entries))

    @property
    def total(self) -> int:
        return self.to_spectrum().dimension


@dataclass(frozen=True)
class CubeIdentityReport:
    kappa: int
    girth: float
    holds: bool
    mismatches: int

    @property
    def theorem_applies(self) -> bool:
        return self.kappa >= 3 and self.girth >= 5

    @property
    def consistent(self) -> bool:
        return self.holds == self.theorem_applies


@dataclass(frozen=True)
class CubeIntertwinerReport:
    residual: float
    block_errors: Tuple[Tuple[float, float], ...]
    eigen_gaps: Tuple[Tuple[float, float], ...]

    @property
    def holds(self) -> bool:
        return (self.residual <= 1e-9
                and all(err <= 1e-9 for _, err in self.block_errors)
                and all(gap <= config.SUPPORT_SPECTRUM_TOL for _, gap in self.eigen_gaps))


def _sqrt(z) -> complex:
    return cmath.sqrt(complex(z))


def s1(x: complex, kappa: int) -> Tuple[complex, complex]:
    """
    Roots of l^2 - x l + (kappa - 1) = 0.

    Examples:
        >>> s1(3, 3)
        ((2+0j), (1+0j))
    """
    root = _sqrt(x * x - 4 * kappa + 4)
    return (x / 2 + root / 2, x / 2 - root / 2)


def s2(x: complex, kappa: int) -> Tuple[complex, complex]:
    """s1(x)^2 + 1, written out."""
    root = _sqrt(x * x - 4 * kappa + 4)
    head = (x * x - 2 * kappa + 4) / 2
    return (head + x * root / 2, head - x * root / 2)


def s3(x: complex, kappa: int) -> Tuple[complex, complex]:
    """Eigenvalues of the 2 x 2 block Lambda(x)."""
    radicand = (x ** 6 + 2 * (2 - 3 * kappa) * x ** 4
                + (13 * kappa ** 2 - 24 * kappa + 16) * x ** 2
                - 8 * (kappa - 1) * (kappa ** 2 - 2 * kappa + 2))
    head = x * (x * x + 4 - 3 * kappa) / 2
    root = _sqrt(radicand)
    return (head + root / 2, head - root / 2)


_S_FUNCTIONS = {1: s1, 2: s2, 3: s3}


def _regular_degree(g: Graph) -> int:
    prof = g.profile
    if not prof.is_regular:
        raise GraphError("Support spectra need a regular graph")
    if prof.degree < 2:
        raise GraphError(f"Support spectra need degree >= 2, got {prof.degree}")
    return prof.degree


def _check_order(j: int) -> None:
    if j not in SUPPORT_ORDERS:
        raise ParameterError(f"Support order must be 1, 2 or 3, got {j}")


def scaled_grover_matrix(g: Graph) -> np.ndarray:
    """
    kappa U as an integer matrix: 2 S D - kappa S with D[e, f] = [t(e) = t(f)].
    """
    kappa = _regular_degree(g)
    arcs = np.arange(g.num_arcs)
    same_end = (g.terminus[:, None] == g.terminus[None, :]).astype(np.int64)
    flip = np.zeros((g.num_arcs, g.num_arcs), dtype=np.int64)
    flip[arcs, arcs ^ 1] = 1
    return 2 * flip @ same_end - kappa * flip


def flip_support_form(g: Graph) -> np.ndarray:
    """S(d*d - 1_A) at w = 1 as an integer matrix."""
    arcs = np.arange(g.num_arcs)
    same_end = (g.terminus[:, None] == g.terminus[None, :]).astype(np.int64)
    flip = np.zeros((g.num_arcs, g.num_arcs), dtype=np.int64)
    flip[arcs, arcs ^ 1] = 1
    return flip @ (same_end - np.eye(g.num_arcs, dtype=np.int64))


def grover_support_matrix(g: Graph, j: int) -> np.ndarray:
    """(U^j)+ computed exactly from the integer matrix (kappa U)^j."""
    _check_order(j)
    return positive_support(np.linalg.matrix_power(scaled_grover_matrix(g), j))


def support_matches_flip_form(g: Graph) -> bool:
    """U+ = S(d*d - 1_A) with unit weights."""
    return bool(np.array_equal(grover_support_matrix(g, 1), flip_support_form(g)))


def _theorem_applies(j: int, kappa: int, girth) -> bool:
    if j == 1:
        return True
    if kappa < 3:
        return False
    return girth >= 5 if j == 3 else True


def _extras(j: int, excess: int) -> Tuple[SpectralEntry, ...]:
    if j == 1:
        pairs = ((1.0, excess), (-1.0, excess))
    elif j == 2:
        pairs = ((2.0, 2 * excess),)
    else:
        pairs = ((2.0, excess), (-2.0, excess))
    return tuple(SpectralEntry(v, n, "closed_form") for v, n in pairs if n > 0)


def support_spectrum(g: Graph, j: int) -> SupportSpectrumResult:
    """
    Closed-form spectrum of (U^j)+, cross-checked against the assembled matrix.

    Raises:
        GraphError: non-regular graph, or girth below 5 for j = 3
        ParameterError: j not in {1, 2, 3}
    """
    _check_order(j)
    kappa = _regular_degree(g)
    girth = g.profile.girth
    if j == 3 and girth < 5:
        raise GraphError(f"(U^3)+ closed form needs girth >= 5, graph has girth {girth}")
    if j == 2 and girth < 3:
        raise GraphError(f"(U^2)+ closed form needs girth >= 3, graph has girth {girth}")

    adjacency = eig(g.adjacency_matrix())
    s_func = _S_FUNCTIONS[j]
    pairs = []
    for entry in adjacency.entries:
        lam = float(entry.value.real)
        plus, minus = s_func(lam, kappa)
        pairs.append(MappedPair(lam, entry.multiplicity, plus, minus))
    extras = _extras(j, g.num_edges - g.num_vertices)

    matrix = grover_support_matrix(g, j)
    closed = [p.plus for p in pairs for _ in range(p.multiplicity)]
    closed += [p.minus for p in pairs for _ in range(p.multiplicity)]
    closed += [e.value for e in extras for _ in range(e.multiplicity)]
    deviation = matching_distance(closed, eig(matrix).values())

    result = SupportSpectrumResult(j, kappa, adjacency, tuple(pairs), extras,
                                   _theorem_applies(j, kappa, girth), deviation,
                                   int(np.trace(matrix)))
    if not result.consistent:
        logger.warning("(U^%d)+ on %r: closed form deviation %.3g, hypotheses %s",
                       j, g, deviation, "met" if result.theorem_applies else "not met")
    if result.degenerate_flags:
        logger.info("(U^%d)+ has coincident s-pairs at adjacency eigenvalues %s",
                    j, result.degenerate_flags)
    return result


def verify_cube_identity(g: Graph) -> CubeIdentityReport:
    """
    Compare (U^3)+ with (U+)^3 + transpose(U+) in exact integer arithmetic.
    """
    kappa = _regular_degree(g)
    cube = grover_support_matrix(g, 3)
    n = grover_support_matrix(g, 1)
    rhs = np.linalg.matrix_power(n, 3) + n.T
    mismatches = int(np.count_nonzero(cube != rhs))
    report = CubeIdentityReport(kappa, g.profile.girth, mismatches == 0, mismatches)
    logger.debug("cube identity on %r: %d mismatches (girth %s)", g, mismatches, g.profile.girth)
    return report


def lambda_block(lam: float, kappa: int) -> np.ndarray:
    """The 2 x 2 block Lambda(lam) whose eigenvalues are s3(lam)."""
    return np.array([
        [-lam * (kappa - 2), -lam ** 2 + 2 * kappa - 2],
        [(kappa - 1) * (lam ** 2 - kappa + 1) - 1, lam * (lam ** 2 - 2 * kappa + 2)],
    ], dtype=float)


def t_tilde_blocks(m: np.ndarray, kappa: int) -> Tuple[np.ndarray, np.ndarray]:
    """T~ = [[0, -1], [(kappa - 1) 1, M]] and T~' = swap T~ swap."""
    n = m.shape[0]
    eye = np.eye(n)
    t = np.block([[np.zeros((n, n)), -eye], [(kappa - 1) * eye, m]])
    swap = np.block([[np.zeros((n, n)), eye], [eye, np.zeros((n, n))]])
    return t, swap @ t @ swap


def intertwiner_check_cube(g: Graph) -> CubeIntertwinerReport:
    """
    Check (U^3)+ [d*, S d*] = [d*, S d*] (T~^3 + T~') and the block reduction.

    For every adjacency eigenvalue lam, Lambda(lam) must equal the 2 x 2
    reduction of T~^3 + T~' and have eigenvalues s3(lam).

    Raises:
        GraphError: non-regular graph or girth below 5
    """
    kappa = _regular_degree(g)
    if g.profile.girth < 5:
        raise GraphError(f"Cube intertwining needs girth >= 5, graph has girth {g.profile.girth}")

    arcs = np.arange(g.num_arcs)
    d_star = np.zeros((g.num_arcs, g.num_vertices))
    d_star[arcs, g.terminus] = 1.0
    block = np.hstack([d_star, d_star[arcs ^ 1]])
    t, t_prime = t_tilde_blocks(g.adjacency_matrix().astype(float), kappa)
    rhs = block @ (np.linalg.matrix_power(t, 3) + t_prime)
    lhs = grover_support_matrix(g, 3) @ block
    residual = float(np.max(np.abs(lhs - rhs)))

    block_errors = []
    eigen_gaps = []
    for entry in eig(g.adjacency_matrix()).entries:
        lam = float(entry.value.real)
        small_t, small_t_prime = t_tilde_blocks(np.array([[lam]]), kappa)
        reduced = np.linalg.matrix_power(small_t, 3) + small_t_prime
        lam_block = lambda_block(lam, kappa)
        block_errors.append((lam, float(np.max(np.abs(reduced - lam_block)))))
        eigen_gaps.append((lam, matching_distance(np.linalg.eigvals(lam_block), s3(lam, kappa))))
    return CubeIntertwinerReport(residual, tuple(block_errors), tuple(eigen_gaps))


def zeta_poles(g: Graph, j: int) -> Spectrum:
    """
    Poles 1/l of prod_{l in sigma((U^j)+)} (1 - u l)^{-1} with multiplicities.

    Eigenvalues within ZERO_POLE_TOL of zero contribute no pole. When the
    closed form does not reproduce the assembled matrix, the poles come from
    a dense eigensolve of (U^j)+ instead.
    """
    result = support_spectrum(g, j)
    if result.matches:
        values, provenance = result.to_spectrum().values(), "closed_form"
    else:
        logger.info("(U^%d)+ closed form deviates by %.3g; poles from the matrix", j, result.deviation)
        values, provenance = eig(grover_support_matrix(g, j).astype(float)).values(), "observed"
    poles: List[complex] = [1.0 / value for value in values if abs(value) > config.ZERO_POLE_TOL]
    return Spectrum.from_values(poles, provenance, config.SUPPORT_SPECTRUM_TOL)


def render_pole_svg(poles: Spectrum, title: Optional[str] = None) -> str:
    """
    Scatter of poles in the complex plane as SVG text.

    The figure is 600 x 600 px; marker area grows with multiplicity. Output is
    byte stable for equal input.
    """
    size = config.SVG_SIZE_PX / 72.0
    fig = Figure(figsize=(size, size), dpi=72)
    ax = fig.add_subplot(1, 1, 1)
    values = np.array([e.value for e in poles.entries], dtype=complex)
    mults = np.array([e.multiplicity for e in poles.entries], dtype=float)
    extent = 1.1 * float(np.max(np.abs(values))) if values.size else 1.0
    theta = np.linspace(0.0, 2.0 * np.pi, 361)
    ax.plot(np.cos(theta), np.sin(theta), color="0.8", linewidth=0.8)
    ax.scatter(values.real, values.imag, s=20.0 * mults, color="tab:blue", zorder=3)
    ax.axhline(0.0, color="0.6", linewidth=0.5)
    ax.axvline(0.0, color="0.6", linewidth=0.5)
    ax.set_xlim(-extent, extent)
    ax.set_ylim(-extent, extent)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title)

    buffer = io.StringIO()
    with matplotlib.rc_context({"svg.hashsalt": config.SVG_HASH_SALT}):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()
