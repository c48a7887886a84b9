"""
Szegedy walks in the two norm-preserving settings.

Setting 1: m_V = 1, m_A = 1, weights w1 with sum_{o(e)=u} |w1(e)|^2 = 1.
Setting 2: a random-walk kernel w2 with sum_{o(e)=u} w2(e) = 1 and a vertex
measure m_V satisfying m_V(o(e)) w2(e) = m_V(t(e)) w2(e_bar) =: m_A(e).

Both use c = 2, so c' = 1 and W is the Szegedy evolution U = S(2 d*d - 1_A).
"""

import logging
import warnings
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from . import config
from .errors import ParameterError, SchemeError
from .graph import Graph
from .operators import ComplexMatrix, WeightScheme, arc_norm, assemble_W

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator, None]


@dataclass(frozen=True)
class WalkState:
    """Arc amplitudes together with the scheme whose m_A measures them."""

    amplitudes: np.ndarray
    scheme: WeightScheme

    @property
    def norm(self) -> float:
        return arc_norm(self.amplitudes, self.scheme.m_A)

    def is_unit(self, tol: float = 1e-12) -> bool:
        return abs(self.norm ** 2 - 1.0) <= tol


@dataclass(frozen=True)
class ConjugationReport:
    """Outcome of the setting-1 / setting-2 equivalence check."""

    m_V: np.ndarray
    m_A: np.ndarray
    steps: int
    max_operator_error: float
    max_distribution_error: float

    @property
    def holds(self) -> bool:
        return (self.max_operator_error <= 1e-9
                and self.max_distribution_error <= config.WEIGHT_TOL)


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _outgoing_sums(g: Graph, values: np.ndarray) -> np.ndarray:
    return np.bincount(g.origin, weights=values, minlength=g.num_vertices)


def check_setting1(g: Graph, w1: np.ndarray) -> np.ndarray:
    """Validate sum_{o(e)=u} |w1(e)|^2 = 1 and return w1 as a complex array."""
    w1 = np.asarray(w1, dtype=complex)
    if w1.shape != (g.num_arcs,):
        raise SchemeError(f"Expected {g.num_arcs} arc weights, got shape {w1.shape}")
    sums = _outgoing_sums(g, np.abs(w1) ** 2)
    bad = np.flatnonzero(np.abs(sums - 1.0) > config.WEIGHT_TOL)
    if bad.size:
        u = int(bad[0])
        raise SchemeError(f"Setting 1 normalization fails at vertex {u}: sum |w1|^2 = {sums[u]:.12g}")
    return w1


def check_setting2(g: Graph, w2: np.ndarray) -> np.ndarray:
    """Validate w2 > 0 with unit row sums and return it as a float array."""
    w2 = np.asarray(w2)
    if np.iscomplexobj(w2):
        if np.any(np.abs(w2.imag) > config.WEIGHT_TOL):
            raise SchemeError("Setting 2 weights must be real")
        w2 = w2.real
    w2 = w2.astype(float)
    if w2.shape != (g.num_arcs,):
        raise SchemeError(f"Expected {g.num_arcs} arc weights, got shape {w2.shape}")
    if np.any(w2 <= 0):
        e = int(np.flatnonzero(w2 <= 0)[0])
        raise SchemeError(f"Setting 2 weight on arc {e} is not positive: {w2[e]}")
    sums = _outgoing_sums(g, w2)
    bad = np.flatnonzero(np.abs(sums - 1.0) > config.WEIGHT_TOL)
    if bad.size:
        u = int(bad[0])
        raise SchemeError(f"Setting 2 row sum fails at vertex {u}: sum w2 = {sums[u]:.12g}")
    return w2


def build_setting1(g: Graph, w1) -> Tuple[WeightScheme, ComplexMatrix]:
    """
    Setting-1 scheme and its evolution U1.

    (U1)[e, f] = 2 w1(e) conj(w1(f_bar)) [o(e) = t(f)] - [e = f_bar]

    Raises:
        SchemeError: if the normalization fails at some vertex
    """
    w1 = check_setting1(g, w1)
    ws = WeightScheme(np.ones(g.num_vertices), np.ones(g.num_arcs), w1, 2.0, "setting1")
    return ws, assemble_W(g, ws)


def build_setting2(g: Graph, w2, m_V) -> Tuple[WeightScheme, ComplexMatrix]:
    """
    Setting-2 scheme and its evolution U2.

    m_A(e) := m_V(o(e)) w2(e) and must equal m_V(t(e)) w2(e_bar) on every arc.

    Raises:
        SchemeError: row sums violated or m_V incompatible with w2
    """
    w2 = check_setting2(g, w2)
    m_V = np.asarray(m_V, dtype=float)
    if m_V.shape != (g.num_vertices,) or np.any(m_V <= 0):
        raise SchemeError("m_V must be positive with one entry per vertex")
    m_A = m_V[g.origin] * w2
    reverse = m_V[g.terminus] * w2[np.arange(g.num_arcs) ^ 1]
    gap = np.abs(m_A - reverse) / np.maximum(np.abs(m_A), 1.0)
    if np.any(gap > config.WEIGHT_TOL):
        e = int(np.argmax(gap))
        u, v = g.arc(e)
        raise SchemeError(
            f"Extended detailed balance fails on arc {e} ({u} -> {v}): "
            f"{m_A[e]:.12g} != {reverse[e]:.12g}"
        )
    ws = WeightScheme(m_V, m_A, w2.astype(complex), 2.0, "setting2")
    return ws, assemble_W(g, ws)


def uniform_setting1_weights(g: Graph) -> np.ndarray:
    """w1(e) = 1 / sqrt(deg(o(e))); the Grover walk."""
    return (1.0 / np.sqrt(g.degrees[g.origin])).astype(complex)


def simple_random_walk_weights(g: Graph) -> np.ndarray:
    """w2(e) = 1 / deg(o(e))."""
    return 1.0 / g.degrees[g.origin].astype(float)


def random_setting1_weights(g: Graph, seed: Seed = None, phases: bool = True) -> np.ndarray:
    """
    Random weights satisfying the setting-1 normalization.

    Magnitudes are uniform on (0.1, 1) before per-vertex normalization; with
    phases=True each weight gets an independent uniform phase.
    """
    rng = _rng(seed)
    mags = rng.uniform(0.1, 1.0, size=g.num_arcs)
    mags /= np.sqrt(_outgoing_sums(g, mags ** 2))[g.origin]
    if not phases:
        return mags.astype(complex)
    return mags * np.exp(2j * np.pi * rng.random(g.num_arcs))


def random_unit_state(m_A: np.ndarray, seed: Seed = None) -> np.ndarray:
    """Complex Gaussian amplitudes normalized to unit m_A-weighted norm."""
    rng = _rng(seed)
    m_A = np.asarray(m_A, dtype=float)
    psi = rng.standard_normal(m_A.size) + 1j * rng.standard_normal(m_A.size)
    return psi / arc_norm(psi, m_A)


def delta_state(g: Graph, arc: int, ws: WeightScheme) -> WalkState:
    """Unit state concentrated on one arc."""
    psi = np.zeros(g.num_arcs, dtype=complex)
    psi[arc] = 1.0 / np.sqrt(ws.m_A[arc])
    return WalkState(psi, ws)


def transition_operator_T(g: Graph, w1) -> ComplexMatrix:
    """(T f)(u) = sum_{o(e)=u} w1(e) conj(w1(e_bar)) f(t(e))."""
    w1 = np.asarray(w1, dtype=complex)
    arcs = np.arange(g.num_arcs)
    t = np.zeros((g.num_vertices, g.num_vertices), dtype=complex)
    np.add.at(t, (g.origin, g.terminus), w1 * np.conj(w1[arcs ^ 1]))
    return t


def random_walk_P(g: Graph, w2) -> ComplexMatrix:
    """Transition matrix P[u, v] = sum of w2 over arcs u -> v."""
    p = np.zeros((g.num_vertices, g.num_vertices), dtype=complex)
    np.add.at(p, (g.origin, g.terminus), np.asarray(w2, dtype=complex))
    return p


def laplacian_L(g: Graph, w2) -> ComplexMatrix:
    """(L f)(u) = sum_{o(e)=u} w2(e) (f(t(e)) - f(u)), so L + 1_V = P."""
    w2 = np.asarray(w2, dtype=complex)
    out = _outgoing_sums(g, w2.real) + 1j * _outgoing_sums(g, w2.imag)
    return random_walk_P(g, w2) - np.diag(out)


def solve_detailed_balance(g: Graph, w2) -> np.ndarray:
    """
    Find m_V with m_V(o(e)) w2(e) = m_V(t(e)) w2(e_bar) on every arc.

    Propagates m_V(v) = m_V(u) w2(u -> v) / w2(v -> u) along a BFS spanning
    tree from vertex 0, then checks the remaining edges. The result is scaled
    so that sum m_V = |A|; the simple random walk gets m_V = deg.

    Raises:
        SchemeError: if w2 is not reversible
    """
    w2 = check_setting2(g, w2)
    m_V = np.zeros(g.num_vertices)
    m_V[0] = 1.0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v, k in g.incidence[u]:
            if m_V[v] > 0:
                continue
            forward = 2 * k if g.edges[k][0] == u else 2 * k + 1
            m_V[v] = m_V[u] * w2[forward] / w2[forward ^ 1]
            queue.append(v)

    m_V *= g.num_arcs / m_V.sum()
    lhs = m_V[g.origin] * w2
    rhs = m_V[g.terminus] * w2[np.arange(g.num_arcs) ^ 1]
    gap = np.abs(lhs - rhs) / np.maximum(lhs, 1.0)
    if np.any(gap > config.WEIGHT_TOL):
        e = int(np.argmax(gap))
        u, v = g.arc(e)
        raise SchemeError(
            f"No vertex measure balances w2: arc {e} ({u} -> {v}) is off by {gap[e]:.3g}"
        )
    return m_V


def is_norm_preserving(U: ComplexMatrix, m_A, tol: float = config.OPERATOR_TOL) -> bool:
    """True when ||U psi||_{m_A} = ||psi||_{m_A} for every psi (U* D U = D)."""
    m_A = np.asarray(m_A, dtype=float)
    gram = np.conj(U.T) @ (m_A[:, None] * U)
    return bool(np.max(np.abs(gram - np.diag(m_A))) <= tol * max(1.0, float(m_A.max())))


def evolve(U: ComplexMatrix, psi0: WalkState, n: int) -> List[WalkState]:
    """
    Run psi_k = U psi_{k-1} for k = 1..n.

    Raises:
        ParameterError: negative step count
        SchemeError: dimension mismatch, or U does not preserve the m_A norm
    """
    if n < 0:
        raise ParameterError(f"Step count must be non-negative, got {n}")
    if U.shape != (psi0.amplitudes.size, psi0.amplitudes.size):
        raise SchemeError(f"Operator shape {U.shape} does not match state of size {psi0.amplitudes.size}")
    if not is_norm_preserving(U, psi0.scheme.m_A):
        raise SchemeError("Operator does not preserve the m_A norm; refusing to simulate")
    states = [psi0]
    psi = psi0.amplitudes
    for _ in range(n):
        psi = U @ psi
        states.append(WalkState(psi, psi0.scheme))
    return states


def arc_distribution(psi: WalkState) -> np.ndarray:
    """mu(e) = |psi(e)|^2 m_A(e). Warns when psi is not a unit state."""
    mu = np.abs(psi.amplitudes) ** 2 * psi.scheme.m_A
    total = float(mu.sum())
    if abs(total - 1.0) > config.WEIGHT_TOL:
        warnings.warn(f"State is not unit (total probability {total:.12g})", RuntimeWarning)
    return mu


def vertex_distribution(psi: WalkState, g: Graph) -> np.ndarray:
    """nu(u) = sum_{t(e)=u} mu(e)."""
    return np.bincount(g.terminus, weights=arc_distribution(psi), minlength=g.num_vertices)


def verify_conjugation(g: Graph, w1, n: int,
                       psi0: Optional[np.ndarray] = None,
                       seed: Seed = None) -> ConjugationReport:
    """
    Check that the setting-2 walk with w2 = w1^2 is the setting-1 walk in disguise.

    Verifies D^{-1/2} U1^k D^{1/2} = U2^k for k <= n, with D = diag(m_A), and
    that the setting-2 distribution from psi0 equals the setting-1
    distribution from D^{1/2} psi0.

    Args:
        g: graph
        w1: real positive setting-1 weights
        n: number of steps
        psi0: unit state for the setting-2 walk (random when omitted)
        seed: seed for the random state

    Raises:
        SchemeError: w1 not real positive, or w1^2 not reversible
    """
    w1 = check_setting1(g, w1)
    if np.any(np.abs(w1.imag) > config.WEIGHT_TOL) or np.any(w1.real <= 0):
        raise SchemeError("Conjugation check needs real positive setting-1 weights")
    w1 = w1.real
    w2 = w1 ** 2
    m_V = solve_detailed_balance(g, w2)
    _, u1 = build_setting1(g, w1)
    ws2, u2 = build_setting2(g, w2, m_V)
    m_A = ws2.m_A
    root = np.sqrt(m_A)

    if psi0 is None:
        psi0 = random_unit_state(m_A, seed)
    psi2 = np.asarray(psi0, dtype=complex)
    psi1 = root * psi2

    op_err = 0.0
    dist_err = 0.0
    p1 = np.eye(g.num_arcs, dtype=complex)
    p2 = np.eye(g.num_arcs, dtype=complex)
    for _ in range(n):
        p1 = u1 @ p1
        p2 = u2 @ p2
        psi1 = u1 @ psi1
        psi2 = u2 @ psi2
        conj = p1 * (root[None, :] / root[:, None])
        op_err = max(op_err, float(np.max(np.abs(conj - p2))))
        dist_err = max(dist_err, float(np.max(np.abs(
            np.abs(psi2) ** 2 * m_A - np.abs(psi1) ** 2))))

    report = ConjugationReport(m_V, m_A, n, op_err, dist_err)
    logger.debug("conjugation over %d steps: operator %.3g, distribution %.3g",
                 n, op_err, dist_err)
    return report
