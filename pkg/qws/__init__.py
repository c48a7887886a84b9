"""
Quantum Walk Spectra (qws) - weighted quantum walks on finite graphs

This package builds the weighted walk operator W = S(c d*d - 1) on the arcs
of a finite graph, predicts its spectrum from the vertex-side discriminant
d S d*, and specializes the prediction to Szegedy walks, equilateral
quantum-graph walks and positive supports of Grover-walk powers.

Arc convention: edge k = {u, v} gives arc 2k = (u -> v), arc 2k+1 = (v -> u)
"""

from .config import __version__
__author__ = 'QWS Project'

from .errors import (
    QWSError,
    GraphError,
    SchemeError,
    CapacityError,
    EigenSolverError,
    LiftError,
    ParameterError,
)
from .graph import Graph, GraphProfile, profile, parse_graph, named_graph, random_connected_graph
from .operators import (
    WeightScheme,
    Spectrum,
    SpectralEntry,
    assemble_d,
    assemble_d_star,
    assemble_S,
    assemble_W,
    discriminant,
    compute_c_prime,
    positive_support,
    eig,
)
from .spectral_map import (
    SpectralMapParams,
    MappedSpectrum,
    mapped_spectrum,
    lift_eigenvector,
    phi,
    phi_inverse,
    szegedy_spectrum,
)
from .szegedy import (
    WalkState,
    build_setting1,
    build_setting2,
    evolve,
    arc_distribution,
    vertex_distribution,
    verify_conjugation,
)
from .qgraph import QGraphParams, build_qgraph_walk, qgraph_spectrum, scan_nontrivial_k
from .support import (
    grover_support_matrix,
    support_spectrum,
    verify_cube_identity,
    intertwiner_check_cube,
    zeta_poles,
)
from .oracle import ComparisonReport, compare_multisets, run_theorem_suite

__all__ = [
    'QWSError', 'GraphError', 'SchemeError', 'CapacityError',
    'EigenSolverError', 'LiftError', 'ParameterError',
    'Graph', 'GraphProfile', 'profile', 'parse_graph', 'named_graph', 'random_connected_graph',
    'WeightScheme', 'Spectrum', 'SpectralEntry',
    'assemble_d', 'assemble_d_star', 'assemble_S', 'assemble_W', 'discriminant',
    'compute_c_prime', 'positive_support', 'eig',
    'SpectralMapParams', 'MappedSpectrum', 'mapped_spectrum', 'lift_eigenvector',
    'phi', 'phi_inverse', 'szegedy_spectrum',
    'WalkState', 'build_setting1', 'build_setting2', 'evolve',
    'arc_distribution', 'vertex_distribution', 'verify_conjugation',
    'QGraphParams', 'build_qgraph_walk', 'qgraph_spectrum', 'scan_nontrivial_k',
    'grover_support_matrix', 'support_spectrum', 'verify_cube_identity',
    'intertwiner_check_cube', 'zeta_poles',
    'ComparisonReport', 'compare_multisets', 'run_theorem_suite',
]
