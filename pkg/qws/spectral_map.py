"""
Spectral mapping from the discriminant d S d* to the walk W = S(c d*d - 1_A).

Each eigenvalue nu of d S d* away from +-c' contributes both roots of
lambda^2 - c nu lambda + (cc' - 1) = 0. An eigenvalue nu = +-c' contributes
+-(cc' - 1) once. The remaining |A| - 2|V| dimensions live on ker(d) and carry
+1 (on the antisymmetric arc functions) or -1 (on the symmetric ones).
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from . import config
from .errors import LiftError, ParameterError, SchemeError
from .graph import Graph
from .operators import (
    ComplexMatrix,
    SpectralEntry,
    Spectrum,
    WeightScheme,
    arc_norm,
    assemble_d,
    assemble_d_star,
    assemble_S,
    assemble_W,
    discriminant,
    eig,
    matching_distance,
    validate_walk_scheme,
)
from .szegedy import (
    build_setting1,
    build_setting2,
    check_setting1,
    laplacian_L,
    solve_detailed_balance,
    transition_operator_T,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralMapParams:
    """The pair (c, c') of a scheme; requires c c' != 1."""

    c: complex
    c_prime: float

    def __post_init__(self):
        if abs(self.c * self.c_prime - 1.0) <= config.C_PRIME_TOL:
            raise SchemeError(f"c c' = {self.c * self.c_prime} equals 1")

    @property
    def shift(self) -> complex:
        """cc' - 1, the constant term of the characteristic quadratic."""
        return complex(self.c * self.c_prime - 1.0)


@dataclass(frozen=True)
class InheritedEntry:
    value: complex
    multiplicity: int
    source: complex


@dataclass(frozen=True)
class MappedSpectrum:
    """
    Spectrum of W assembled from the discriminant spectrum.

    Attributes:
        params: (c, c')
        inherited: phi^{-1} roots with the discriminant eigenvalue they came from
        exceptional: +-(cc' - 1) entries from nu = +-c'
        birth_plus: multiplicity of +1 on ker(d) n H_-
        birth_minus: multiplicity of -1 on ker(d) n H_+
        phase: global factor applied to every value (e^{ikL} for quantum graphs)
        formula_plus, formula_minus: |E| - |V| + m_{+-c'} when m_A is symmetric
        birth_set: +-1 extras predicted by a closed-form case table, if any
    """

    params: SpectralMapParams
    inherited: Tuple[InheritedEntry, ...]
    exceptional: Tuple[SpectralEntry, ...]
    birth_plus: int
    birth_minus: int
    discriminant_spectrum: Spectrum
    phase: complex = 1.0
    formula_plus: Optional[int] = None
    formula_minus: Optional[int] = None
    birth_set: Optional[FrozenSet[int]] = field(default=None, compare=False)

    @property
    def total(self) -> int:
        return (sum(e.multiplicity for e in self.inherited)
                + sum(e.multiplicity for e in self.exceptional)
                + self.birth_plus + self.birth_minus)

    @property
    def formula_diverges(self) -> bool:
        if self.formula_plus is None:
            return False
        return (self.formula_plus, self.formula_minus) != (self.birth_plus, self.birth_minus)

    @property
    def observed_birth_set(self) -> FrozenSet[int]:
        return frozenset(s for s, n in ((1, self.birth_plus), (-1, self.birth_minus)) if n > 0)

    def to_spectrum(self) -> Spectrum:
        entries = [SpectralEntry(e.value * self.phase, e.multiplicity, "inherited")
                   for e in self.inherited]
        entries += [SpectralEntry(e.value * self.phase, e.multiplicity, "exceptional")
                    for e in self.exceptional]
        if self.birth_plus:
            entries.append(SpectralEntry(1.0 * self.phase, self.birth_plus, "birth_plus"))
        if self.birth_minus:
            entries.append(SpectralEntry(-1.0 * self.phase, self.birth_minus, "birth_minus"))
        return Spectrum(tuple(entries))

    def values(self) -> np.ndarray:
        return self.to_spectrum().values()


@dataclass(frozen=True)
class LiftedVector:
    value: complex
    vector: np.ndarray
    provenance: str
    residual: float


def phi(params: SpectralMapParams, x: complex) -> complex:
    """phi(x) = (x + (cc' - 1) / x) / c."""
    if x == 0:
        raise ParameterError("phi is undefined at 0")
    return (x + params.shift / x) / params.c


def phi_inverse(params: SpectralMapParams, nu: complex) -> Tuple[complex, complex]:
    """
    Both roots of lambda^2 - c nu lambda + (cc' - 1) = 0 as (lambda_plus, lambda_minus).

    lambda_plus has the larger imaginary part; when the imaginary parts tie
    it has the larger real part. A double root is returned twice.

    Examples:
        >>> phi_inverse(SpectralMapParams(1.0, 3.0), 3.0)
        ((2+0j), (1+0j))
    """
    b = params.c * complex(nu)
    root = np.sqrt(complex(b * b - 4.0 * params.shift))
    r1 = complex((b + root) / 2.0)
    r2 = complex((b - root) / 2.0)
    scale = max(1.0, abs(r1), abs(r2))
    if abs(r1.imag - r2.imag) <= 1e-14 * scale:
        return (r1, r2) if r1.real >= r2.real else (r2, r1)
    return (r1, r2) if r1.imag > r2.imag else (r2, r1)


def _rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    scale = max(1.0, float(np.linalg.norm(m, 2)))
    return int(np.linalg.matrix_rank(m, tol=config.RANK_TOL * scale))


def symmetric_basis(g: Graph, sign: int) -> np.ndarray:
    """|A| x |E| basis with columns e_{2k} + sign * e_{2k+1}."""
    basis = np.zeros((g.num_arcs, g.num_edges))
    k = np.arange(g.num_edges)
    basis[2 * k, k] = 1.0
    basis[2 * k + 1, k] = float(sign)
    return basis


def birth_counts(g: Graph, ws: WeightScheme) -> Tuple[int, int]:
    """
    (dim ker(d) n H_-, dim ker(d) n H_+) by explicit rank computation.

    The first is the multiplicity of +1 from ker(d), the second of -1.
    """
    d = assemble_d(g, ws)
    plus = g.num_edges - _rank(d @ symmetric_basis(g, -1))
    minus = g.num_edges - _rank(d @ symmetric_basis(g, +1))
    return plus, minus


def _arc_measure_symmetric(ws: WeightScheme) -> bool:
    m = ws.m_A
    return bool(np.allclose(m, m[np.arange(m.size) ^ 1], rtol=config.WEIGHT_TOL, atol=0.0))


def mapped_spectrum(g: Graph, ws: WeightScheme, phase: complex = 1.0) -> MappedSpectrum:
    """
    Spectrum of W from the discriminant plus the ker(d) birth eigenvalues.

    Args:
        g: graph
        ws: scheme with constant c' and c c' != 1
        phase: global factor multiplied into every value

    Returns:
        MappedSpectrum whose total multiplicity is |A|

    Raises:
        SchemeError: invalid scheme
    """
    c_prime = validate_walk_scheme(g, ws)
    params = SpectralMapParams(ws.c, c_prime)
    disc = eig(discriminant(g, ws))

    inherited: List[InheritedEntry] = []
    plus_exc = minus_exc = 0
    for entry in disc.entries:
        nu = entry.value
        if abs(nu - c_prime) <= config.SPECTRUM_TOL:
            plus_exc += entry.multiplicity
        elif abs(nu + c_prime) <= config.SPECTRUM_TOL:
            minus_exc += entry.multiplicity
        else:
            lp, lm = phi_inverse(params, nu)
            inherited.append(InheritedEntry(lp, entry.multiplicity, nu))
            inherited.append(InheritedEntry(lm, entry.multiplicity, nu))

    exceptional = []
    if plus_exc:
        exceptional.append(SpectralEntry(params.shift, plus_exc, "exceptional"))
    if minus_exc:
        exceptional.append(SpectralEntry(-params.shift, minus_exc, "exceptional"))

    birth_plus, birth_minus = birth_counts(g, ws)
    formula_plus = formula_minus = None
    if _arc_measure_symmetric(ws):
        base = g.num_edges - g.num_vertices
        formula_plus, formula_minus = base + plus_exc, base + minus_exc

    result = MappedSpectrum(params, tuple(inherited), tuple(exceptional),
                            birth_plus, birth_minus, disc, phase,
                            formula_plus, formula_minus)
    if result.formula_diverges:
        warnings.warn(
            f"Birth counts by rank ({birth_plus}, {birth_minus}) differ from "
            f"|E|-|V|+m formula ({formula_plus}, {formula_minus})",
            RuntimeWarning,
        )
    logger.debug("mapped spectrum: %d inherited, %d exceptional, births +%d/-%d",
                 sum(e.multiplicity for e in inherited), plus_exc + minus_exc,
                 birth_plus, birth_minus)
    return result


def lift_eigenvector(g: Graph, ws: WeightScheme, nu: complex,
                     f: np.ndarray) -> List[LiftedVector]:
    """
    Lift an eigenvector of d S d* to eigenvectors of W.

    For nu away from +-c' returns (d* - lambda S d*) f for both roots lambda of
    phi^{-1}(nu). For nu = +-c' returns d* f with eigenvalue +-(cc' - 1).
    Vectors are normalized to unit m_A norm and checked against W.

    Raises:
        LiftError: f is zero, not an eigenvector, or a lift vanishes
    """
    f = np.asarray(f, dtype=complex)
    f_norm = float(np.linalg.norm(f))
    if f.shape != (g.num_vertices,) or f_norm <= config.ZERO_VECTOR_TOL:
        raise LiftError("Vertex vector is zero or has the wrong length")

    c_prime = validate_walk_scheme(g, ws)
    params = SpectralMapParams(ws.c, c_prime)
    j = discriminant(g, ws)
    if np.linalg.norm(j @ f - nu * f) > config.RESIDUAL_TOL * max(1.0, np.linalg.norm(j, 2)) * f_norm:
        raise LiftError(f"f is not an eigenvector of d S d* for nu = {nu}")

    d_star_f = assemble_d_star(g, ws) @ f
    s_d_star_f = assemble_S(g) @ d_star_f
    w = assemble_W(g, ws)

    if abs(nu - c_prime) <= config.SPECTRUM_TOL:
        candidates = [(params.shift, d_star_f, "exceptional")]
    elif abs(nu + c_prime) <= config.SPECTRUM_TOL:
        candidates = [(-params.shift, d_star_f, "exceptional")]
    else:
        candidates = [(lam, d_star_f - lam * s_d_star_f, "inherited")
                      for lam in phi_inverse(params, nu)]

    lifted = []
    w_scale = max(1.0, float(np.linalg.norm(w, 2)))
    for lam, psi, provenance in candidates:
        norm = arc_norm(psi, ws.m_A)
        if norm <= config.ZERO_VECTOR_TOL * f_norm:
            raise LiftError(f"Lift for lambda = {lam} vanishes")
        psi = psi / norm
        residual = float(np.linalg.norm(w @ psi - lam * psi))
        if residual > config.RESIDUAL_TOL * w_scale * max(1.0, float(np.linalg.norm(psi))):
            raise LiftError(f"Lifted vector misses lambda = {lam} (residual {residual:.3g})")
        lifted.append(LiftedVector(lam, psi, provenance, residual))
    return lifted


def intertwining_residual(g: Graph, ws: WeightScheme) -> float:
    """
    max |W [d*, S d*] - [d*, S d*] T~| with T~ = [[0, -1], [(cc'-1) 1, c d S d*]].
    """
    c_prime = validate_walk_scheme(g, ws)
    n = g.num_vertices
    d_star = assemble_d_star(g, ws)
    block = np.hstack([d_star, assemble_S(g) @ d_star])
    t_tilde = np.zeros((2 * n, 2 * n), dtype=complex)
    t_tilde[:n, n:] = -np.eye(n)
    t_tilde[n:, :n] = (ws.c * c_prime - 1.0) * np.eye(n)
    t_tilde[n:, n:] = ws.c * discriminant(g, ws)
    return float(np.max(np.abs(assemble_W(g, ws) @ block - block @ t_tilde)))


def setting1_birth_set(g: Graph, t_spectrum: Spectrum) -> FrozenSet[int]:
    """+-1 extras of the setting-1 case table, from indicators of +-1 in sigma(T)."""
    base = g.num_edges - g.num_vertices
    has_plus = t_spectrum.multiplicity_of(1.0, config.SPECTRUM_TOL) > 0
    has_minus = t_spectrum.multiplicity_of(-1.0, config.SPECTRUM_TOL) > 0
    out = set()
    if base + int(has_plus) > 0:
        out.add(1)
    if base + int(has_minus) > 0:
        out.add(-1)
    return frozenset(out)


def setting2_birth_set(g: Graph) -> FrozenSet[int]:
    """Tree: none; one cycle, not bipartite: {1}; otherwise {1, -1}."""
    prof = g.profile
    if prof.is_tree:
        return frozenset()
    if prof.cycle_rank == 1 and not prof.is_bipartite:
        return frozenset({1})
    return frozenset({1, -1})


def szegedy_spectrum(g: Graph, setting: int, weights, m_V=None) -> MappedSpectrum:
    """
    Spectrum of U1 or U2 through the random-walk operators T and L.

    Setting 1 maps sigma(T) with phi_1(x) = (x + 1/x) / 2 (conjugated for
    complex w1); setting 2 maps sigma(L) with phi_2(x) = (x + 1/x) / 2 - 1.
    The +-1 extras follow the case tables; the result is cross-checked
    against mapped_spectrum on the assembled scheme.

    Args:
        g: graph
        setting: 1 or 2
        weights: w1 (setting 1) or w2 (setting 2)
        m_V: vertex measure for setting 2; solved from detailed balance if omitted

    Raises:
        SchemeError: setting constraints violated
        ParameterError: unknown setting
    """
    params = SpectralMapParams(2.0, 1.0)
    if setting == 1:
        ws, _ = build_setting1(g, weights)
        walk_op = np.conj(transition_operator_T(g, check_setting1(g, weights)))
        nus = eig(walk_op)
        birth_set = setting1_birth_set(g, nus)
    elif setting == 2:
        if m_V is None:
            m_V = solve_detailed_balance(g, weights)
        ws, _ = build_setting2(g, weights, m_V)
        # phi_2^{-1}(l) = phi_1^{-1}(l + 1)
        nus = Spectrum(tuple(SpectralEntry(e.value + 1.0, e.multiplicity, e.provenance)
                             for e in eig(laplacian_L(g, np.asarray(weights, dtype=float))).entries))
        birth_set = setting2_birth_set(g)
    else:
        raise ParameterError(f"Setting must be 1 or 2, got {setting}")

    reference = mapped_spectrum(g, ws)
    inherited: List[InheritedEntry] = []
    exceptional: List[SpectralEntry] = []
    for entry in nus.entries:
        if abs(entry.value - 1.0) <= config.SPECTRUM_TOL:
            exceptional.append(SpectralEntry(1.0, entry.multiplicity, "exceptional"))
        elif abs(entry.value + 1.0) <= config.SPECTRUM_TOL:
            exceptional.append(SpectralEntry(-1.0, entry.multiplicity, "exceptional"))
        else:
            lp, lm = phi_inverse(params, entry.value)
            inherited.append(InheritedEntry(lp, entry.multiplicity, entry.value))
            inherited.append(InheritedEntry(lm, entry.multiplicity, entry.value))

    result = MappedSpectrum(params, tuple(inherited), tuple(exceptional),
                            reference.birth_plus, reference.birth_minus, nus, 1.0,
                            reference.formula_plus, reference.formula_minus, birth_set)

    gap = matching_distance(result.values(), reference.values())
    if gap > config.SPECTRUM_TOL:
        warnings.warn(f"Setting-{setting} spectrum deviates from the discriminant map by {gap:.3g}",
                      RuntimeWarning)
    if birth_set != result.observed_birth_set:
        warnings.warn(
            f"Case table predicts extras {sorted(birth_set)} but ker(d) carries "
            f"{sorted(result.observed_birth_set)}",
            RuntimeWarning,
        )
    return result
