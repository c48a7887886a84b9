"""
Command-line interface for quantum-walk spectra.

Usage:
    qws info petersen.txt                          # Structural profile
    qws spectrum --setting 2 --weights uniform tree.txt
    qws walk --setting 1 --steps 10 C4             # Vertex distributions per step
    qws qgraph --k 2 --L 1 --alpha 1 petersen      # Quantum-graph walk spectrum
    qws qgraph --L 1 --scan 0:10:400 C4            # k values with 1 in the spectrum
    qws support --j 3 --poles --csv out.csv petersen.txt
    qws verify --builtin                           # Oracle suite over the builtin corpus

A GRAPH argument is an edge-list file or a catalogue name (P5, C4, K3,3,
petersen, dodecahedron, ...).
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import config
from .errors import GraphError, QWSError, SchemeError
from .graph import Graph, named_graph, parse_graph
from .operators import SpectralEntry, Spectrum, WeightScheme, assemble_W, eig
from .oracle import THEOREMS, builtin_corpus, run_theorem_suite
from .qgraph import QGraphParams, build_qgraph_walk, eigen_count_near_one, qgraph_spectrum, scan_nontrivial_k
from .spectral_map import mapped_spectrum, szegedy_spectrum
from .support import (
    grover_support_matrix,
    intertwiner_check_cube,
    render_pole_svg,
    support_spectrum,
    verify_cube_identity,
    zeta_poles,
)
from .szegedy import (
    WalkState,
    build_setting1,
    build_setting2,
    delta_state,
    evolve,
    random_unit_state,
    simple_random_walk_weights,
    solve_detailed_balance,
    uniform_setting1_weights,
    vertex_distribution,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

CONSTRUCTIONS = ("setting1", "setting2", "grover", "support", "qgraph", "custom")


class UsageError(Exception):
    """Bad flags or unreadable input files."""


@dataclass(frozen=True)
class RunConfig:
    """Validated flags of one invocation."""

    command: str
    graph: Optional[str] = None
    construction: str = "grover"
    weights: str = "uniform"
    c: complex = 2.0
    k: Optional[float] = None
    L: float = 1.0
    alpha: float = 0.0
    j: int = 1
    steps: int = 10
    start: int = 0
    seed: Optional[int] = None
    method: str = "mapped"
    output: Optional[str] = None
    matrix_output: Optional[str] = None
    json: bool = False
    tol: float = config.SPECTRUM_TOL
    scan: Optional[Tuple[float, float, int]] = None
    poles: bool = False
    svg: Optional[str] = None
    csv_path: Optional[str] = None
    verify_identity: bool = False
    corpus: Optional[str] = None
    builtin: bool = False
    which: str = "all"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        construction = getattr(args, "construction", None) or "grover"
        setting = getattr(args, "setting", None)
        if setting is not None:
            construction = f"setting{setting}"
        scan = getattr(args, "scan", None)
        if scan is not None:
            scan = _parse_scan(scan)
        if getattr(args, "tol", None) is not None and args.tol <= 0:
            raise UsageError(f"--tol must be positive, got {args.tol}")
        if args.command == "verify" and not (args.builtin or args.corpus):
            raise UsageError("verify needs --builtin or --corpus DIR")
        if args.command == "qgraph" and scan is None and args.k is None:
            raise UsageError("qgraph needs --k or --scan")
        if construction == "qgraph" and getattr(args, "k", None) is None:
            raise UsageError("the qgraph construction needs --k")
        if getattr(args, "steps", 0) < 0:
            raise UsageError(f"--steps must be non-negative, got {args.steps}")
        if (getattr(args, "verify_identity", False) and args.poles
                and not (args.csv or args.json)):
            raise UsageError("--verify-identity with --poles needs --csv for the pole table")
        return cls(
            command=args.command,
            graph=getattr(args, "graph", None),
            construction=construction,
            weights=getattr(args, "weights", "uniform"),
            c=complex(getattr(args, "c", 2.0)),
            k=getattr(args, "k", None),
            L=getattr(args, "L", 1.0),
            alpha=getattr(args, "alpha", 0.0),
            j=getattr(args, "j", 1),
            steps=getattr(args, "steps", 10),
            start=getattr(args, "start", 0),
            seed=getattr(args, "seed", None),
            method=getattr(args, "method", "mapped"),
            output=getattr(args, "output", None),
            matrix_output=getattr(args, "matrix_output", None),
            json=args.json,
            tol=getattr(args, "tol", None) or config.SPECTRUM_TOL,
            scan=scan,
            poles=getattr(args, "poles", False),
            svg=getattr(args, "svg", None),
            csv_path=getattr(args, "csv", None),
            verify_identity=getattr(args, "verify_identity", False),
            corpus=getattr(args, "corpus", None),
            builtin=getattr(args, "builtin", False),
            which=getattr(args, "which", "all"),
        )


def _parse_scan(text: str) -> Tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--scan expects k_min:k_max:grid, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"--scan expects k_min:k_max:grid, got {text!r}")


# Formatting

def fmt(x: float) -> str:
    return f"{x:.{config.CSV_DIGITS}g}"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _sorted_entries(spectrum: Spectrum) -> List[SpectralEntry]:
    return sorted(spectrum.entries,
                  key=lambda e: (round(e.value.real, 12), round(e.value.imag, 12), e.provenance))


def spectrum_csv(spectrum: Spectrum) -> str:
    """CSV with header re,im,multiplicity,provenance."""
    rows = [(fmt(e.value.real), fmt(e.value.imag), e.multiplicity, e.provenance)
            for e in _sorted_entries(spectrum)]
    return _csv_text(("re", "im", "multiplicity", "provenance"), rows)


def parse_spectrum_csv(text: str) -> Spectrum:
    """Inverse of spectrum_csv."""
    reader = csv.DictReader(io.StringIO(text))
    entries = []
    for row in reader:
        entries.append(SpectralEntry(complex(float(row["re"]), float(row["im"])),
                                     int(row["multiplicity"]), row.get("provenance") or "observed"))
    return Spectrum(tuple(entries))


def matrix_csv(matrix: np.ndarray) -> str:
    """Long format row,col,re,im in row-major order."""
    rows = [(i, j, fmt(matrix[i, j].real), fmt(matrix[i, j].imag))
            for i in range(matrix.shape[0]) for j in range(matrix.shape[1])]
    return _csv_text(("row", "col", "re", "im"), rows)


def parse_weight_csv(text: str, num_arcs: int) -> np.ndarray:
    """
    Arc weights from CSV with header arc,re[,im].

    Raises:
        SchemeError: unknown, repeated or missing arcs; malformed numbers
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"arc", "re"} <= set(reader.fieldnames):
        raise SchemeError("Weight CSV needs an 'arc,re[,im]' header")
    weights = np.full(num_arcs, np.nan, dtype=complex)
    for lineno, row in enumerate(reader, start=2):
        try:
            arc = int(row["arc"])
            value = complex(float(row["re"]), float(row.get("im") or 0.0))
        except (TypeError, ValueError):
            raise SchemeError(f"Weight CSV line {lineno}: malformed row {row}")
        if not 0 <= arc < num_arcs:
            raise SchemeError(f"Weight CSV line {lineno}: arc {arc} outside 0..{num_arcs - 1}")
        if not np.isnan(weights[arc]):
            raise SchemeError(f"Weight CSV line {lineno}: arc {arc} given twice")
        weights[arc] = value
    missing = np.flatnonzero(np.isnan(weights))
    if missing.size:
        raise SchemeError(f"Weight CSV has no entry for arc {int(missing[0])}")
    return weights


def _complex_json(z: complex) -> List[float]:
    return [float(z.real), float(z.imag)]


def _spectrum_json(spectrum: Spectrum) -> list:
    return [{"value": _complex_json(e.value), "multiplicity": e.multiplicity,
             "provenance": e.provenance} for e in _sorted_entries(spectrum)]


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise UsageError(f"Cannot write {path}: {exc}")


def _emit_json(document: dict, path: Optional[str]) -> None:
    _emit(json.dumps(document, indent=2, sort_keys=True) + "\n", path)


# Inputs

def load_graph(spec: str) -> Graph:
    """Read an edge-list file, or build a catalogue graph by name."""
    if os.path.exists(spec):
        try:
            with open(spec, encoding="utf-8") as handle:
                return parse_graph(handle.read())
        except OSError as exc:
            raise UsageError(f"Cannot read {spec}: {exc}")
    try:
        return named_graph(spec)
    except GraphError:
        raise UsageError(f"{spec!r} is neither a readable file nor a known graph name")


def _load_weights(cfg: RunConfig, g: Graph, default: np.ndarray) -> np.ndarray:
    if cfg.weights == "uniform":
        return default
    try:
        with open(cfg.weights, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise UsageError(f"Cannot read weights {cfg.weights}: {exc}")
    return parse_weight_csv(text, g.num_arcs)


def _walk_scheme(cfg: RunConfig, g: Graph) -> Tuple[Optional[WeightScheme], np.ndarray]:
    """Scheme and evolution matrix for a walk construction."""
    if cfg.construction in ("setting1", "grover"):
        w1 = uniform_setting1_weights(g) if cfg.construction == "grover" \
            else _load_weights(cfg, g, uniform_setting1_weights(g))
        return build_setting1(g, w1)
    if cfg.construction == "setting2":
        w2 = _load_weights(cfg, g, simple_random_walk_weights(g)).real
        return build_setting2(g, w2, solve_detailed_balance(g, w2))
    if cfg.construction == "qgraph":
        u = build_qgraph_walk(g, QGraphParams(cfg.k, cfg.L, cfg.alpha))
        return WeightScheme.uniform(g, label="qgraph"), u
    if cfg.construction == "support":
        return WeightScheme.uniform(g, w=1.0, c=1.0, label="support"), grover_support_matrix(g, cfg.j)
    w = _load_weights(cfg, g, np.ones(g.num_arcs, dtype=complex))
    ws = WeightScheme(np.ones(g.num_vertices), np.ones(g.num_arcs), w, cfg.c, "custom")
    return ws, assemble_W(g, ws)


# Commands

def cmd_info(cfg: RunConfig) -> int:
    """Print the structural profile of a graph."""
    g = load_graph(cfg.graph)
    prof = g.profile
    girth = "inf" if math.isinf(prof.girth) else str(prof.girth)
    regular = str(prof.degree) if prof.is_regular else "false"
    if cfg.json:
        _emit_json({"vertices": g.num_vertices, "edges": g.num_edges,
                    "girth": None if math.isinf(prof.girth) else prof.girth,
                    "regular": prof.degree if prof.is_regular else False,
                    "bipartite": prof.is_bipartite, "cycle_rank": prof.cycle_rank}, cfg.output)
        return EXIT_OK
    _emit(f"vertices={g.num_vertices} edges={g.num_edges} girth={girth} regular={regular} "
          f"bipartite={str(prof.is_bipartite).lower()} cycle_rank={prof.cycle_rank}\n", cfg.output)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    """Spectrum of the selected construction, closed form or dense eigensolve."""
    g = load_graph(cfg.graph)
    ws, matrix = _walk_scheme(cfg, g)

    if cfg.method == "eig":
        spectrum = eig(matrix)
    elif cfg.construction == "grover":
        spectrum = szegedy_spectrum(g, 1, uniform_setting1_weights(g)).to_spectrum()
    elif cfg.construction in ("setting1", "setting2"):
        setting = int(cfg.construction[-1])
        weights = ws.w if setting == 1 else ws.w.real
        spectrum = szegedy_spectrum(g, setting, weights, None if setting == 1 else ws.m_V).to_spectrum()
    elif cfg.construction == "support":
        spectrum = support_spectrum(g, cfg.j).to_spectrum()
    elif cfg.construction == "qgraph":
        spectrum = qgraph_spectrum(g, QGraphParams(cfg.k, cfg.L, cfg.alpha)).to_spectrum()
    else:
        spectrum = mapped_spectrum(g, ws).to_spectrum()

    if cfg.matrix_output:
        _emit(matrix_csv(matrix), cfg.matrix_output)
    if cfg.json:
        _emit_json({"construction": cfg.construction, "method": cfg.method,
                    "dimension": spectrum.dimension, "spectrum": _spectrum_json(spectrum)}, cfg.output)
    else:
        _emit(spectrum_csv(spectrum), cfg.output)
    return EXIT_OK


def cmd_walk(cfg: RunConfig) -> int:
    """Simulate a walk and print the vertex distribution of every step."""
    g = load_graph(cfg.graph)
    ws, matrix = _walk_scheme(cfg, g)
    if cfg.seed is not None:
        psi0 = WalkState(random_unit_state(ws.m_A, cfg.seed), ws)
    else:
        if not 0 <= cfg.start < g.num_arcs:
            raise UsageError(f"--start must be an arc index in 0..{g.num_arcs - 1}")
        psi0 = delta_state(g, cfg.start, ws)

    rows = []
    for step, state in enumerate(evolve(matrix, psi0, cfg.steps)):
        for vertex, prob in enumerate(vertex_distribution(state, g)):
            rows.append((step, vertex, prob))
    if cfg.json:
        _emit_json({"construction": cfg.construction,
                    "distributions": [[float(p) for s, _, p in rows if s == step]
                                      for step in range(cfg.steps + 1)]}, cfg.output)
    else:
        _emit(_csv_text(("step", "vertex", "probability"),
                        [(s, v, fmt(p)) for s, v, p in rows]), cfg.output)
    return EXIT_OK


def cmd_qgraph(cfg: RunConfig) -> int:
    """Quantum-graph walk spectrum, or a scan for k with 1 in the spectrum."""
    g = load_graph(cfg.graph)
    if cfg.scan is None:
        result = qgraph_spectrum(g, QGraphParams(cfg.k, cfg.L, cfg.alpha))
        spectrum = result.to_spectrum()
        if cfg.json:
            kappa = g.profile.degree
            # random-walk scaling is kappa / sqrt(kappa^2 + q^2), i.e. cos(gamma)
            scaling = kappa / math.hypot(kappa, cfg.alpha / cfg.k)
            _emit_json({"k": cfg.k, "L": cfg.L, "alpha": cfg.alpha,
                        "random_walk_scaling": scaling,
                        "birth_set": sorted(result.birth_set or ()),
                        "spectrum": _spectrum_json(spectrum)}, cfg.output)
        else:
            _emit(spectrum_csv(spectrum), cfg.output)
        return EXIT_OK

    k_min, k_max, grid = cfg.scan
    result = scan_nontrivial_k(g, cfg.L, cfg.alpha, (k_min, k_max), grid)
    rows = [(fmt(r.k), r.multiplicity, "scan") for r in result.roots]
    rows += [(fmt(k), eigen_count_near_one(g, cfg.L, cfg.alpha, k), f"family {label}")
             for k, label in result.families]
    if cfg.json:
        _emit_json({"roots": [{"k": r.k, "lower": r.lower, "upper": r.upper,
                               "multiplicity": r.multiplicity} for r in result.roots],
                    "families": [{"k": k, "family": label} for k, label in result.families]},
                   cfg.output)
    else:
        _emit(_csv_text(("k_root", "multiplicity", "source"), rows), cfg.output)
    return EXIT_OK


def cmd_support(cfg: RunConfig) -> int:
    """Support spectra, zeta poles and the cube identity."""
    g = load_graph(cfg.graph)
    document = {"j": cfg.j}
    exit_code = EXIT_OK

    if cfg.verify_identity:
        cube = verify_cube_identity(g)
        document["cube_identity"] = {"holds": cube.holds, "theorem_applies": cube.theorem_applies,
                                     "mismatches": cube.mismatches}
        line = (f"cube_identity={'holds' if cube.holds else 'fails'} girth={g.profile.girth} "
                f"kappa={cube.kappa} expected={'holds' if cube.theorem_applies else 'fails'}")
        if cube.theorem_applies:
            inter = intertwiner_check_cube(g)
            document["intertwining_residual"] = inter.residual
            line += f" intertwining_residual={inter.residual:.3g}"
        if not cube.consistent:
            exit_code = EXIT_FAILURE
        if not cfg.json:
            _emit(line + "\n", cfg.output)

    if cfg.poles:
        poles = zeta_poles(g, cfg.j)
        rows = [(fmt(e.value.real), fmt(e.value.imag), e.multiplicity) for e in _sorted_entries(poles)]
        document["poles"] = [{"value": _complex_json(e.value), "multiplicity": e.multiplicity}
                             for e in _sorted_entries(poles)]
        if cfg.svg:
            _emit(render_pole_svg(poles, f"(U^{cfg.j})+ zeta poles"), cfg.svg)
        if cfg.csv_path or not cfg.json:
            _emit(_csv_text(("re", "im", "multiplicity"), rows), cfg.csv_path or cfg.output)
    elif not cfg.verify_identity:
        result = support_spectrum(g, cfg.j)
        spectrum = result.to_spectrum()
        document["spectrum"] = _spectrum_json(spectrum)
        document["degenerate"] = list(result.degenerate_flags)
        document["deviation"] = result.deviation
        document["theorem_applies"] = result.theorem_applies
        if cfg.csv_path or not cfg.json:
            _emit(spectrum_csv(spectrum), cfg.csv_path or cfg.output)

    if cfg.json:
        _emit_json(document, cfg.output)
    return exit_code


def _read_corpus(directory: str) -> List[Tuple[str, Graph]]:
    if not os.path.isdir(directory):
        raise UsageError(f"Corpus directory {directory} does not exist")
    corpus = []
    for name in sorted(os.listdir(directory)):
        path = os.path.join(directory, name)
        if os.path.isfile(path):
            corpus.append((name, load_graph(path)))
    return corpus


def cmd_verify(cfg: RunConfig) -> int:
    """Run the oracle suite; nonzero exit on any failed check."""
    corpus = builtin_corpus() if cfg.builtin else []
    if cfg.corpus:
        corpus += _read_corpus(cfg.corpus)
    reports = run_theorem_suite(corpus, cfg.which, cfg.tol)

    rows = [(r.graph, r.theorem, r.verdict, fmt(r.max_error), fmt(r.tol), r.note) for r in reports]
    if cfg.csv_path:
        _emit(_csv_text(("graph", "check", "verdict", "max_error", "tol", "note"), rows), cfg.csv_path)

    failed = [r for r in reports if not r.passed]
    if cfg.json:
        _emit_json({"checks": len(reports), "failed": len(failed),
                    "reports": [dict(zip(("graph", "check", "verdict", "max_error", "tol", "note"), row))
                                for row in rows]}, cfg.output)
    else:
        lines = [f"{'graph':<16} {'check':<44} verdict"]
        lines += [f"{r.graph:<16} {r.theorem:<44} {r.verdict}" for r in reports]
        lines.append(f"\n{len(reports)} checks, {len(failed)} failed")
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_FAILURE if failed else EXIT_OK


COMMANDS = {
    "info": cmd_info,
    "spectrum": cmd_spectrum,
    "walk": cmd_walk,
    "qgraph": cmd_qgraph,
    "support": cmd_support,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=config.PACKAGE_CODE,
        description=f"{config.PACKAGE_FULL_NAME}: weighted quantum-walk spectra on finite graphs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  qws info petersen                           Vertices, edges, girth, regularity
  qws spectrum --setting 2 --weights uniform P5
  qws spectrum --construction support --j 3 --method eig petersen
  qws walk --construction qgraph --k 1 --L 3.14 --steps 20 C5
  qws qgraph --L 1 --scan 0:10:400 C4
  qws support --j 3 --poles --svg poles.svg petersen
  qws verify --builtin --which supports
        """,
    )
    parser.add_argument("--version", action="version",
                        version=f"{config.PACKAGE_FULL_NAME} v{config.__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--json", action="store_true", help="emit one JSON document instead of CSV")
    parser.add_argument("-o", "--output", help="write the main output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p_info = sub.add_parser("info", help="structural profile of a graph")
    p_info.add_argument("graph")

    def add_construction(p):
        p.add_argument("graph")
        p.add_argument("--construction", choices=CONSTRUCTIONS)
        p.add_argument("--setting", type=int, choices=(1, 2), help="shorthand for setting1/setting2")
        p.add_argument("--weights", default="uniform", help="'uniform' or a CSV file arc,re,im")
        p.add_argument("--c", type=complex, default=2.0, help="c for the custom construction, e.g. 1.5+0.5j")
        p.add_argument("--j", type=int, choices=(1, 2, 3), default=1)
        p.add_argument("--k", type=float)
        p.add_argument("--L", type=float, default=1.0)
        p.add_argument("--alpha", type=float, default=0.0)

    p_spec = sub.add_parser("spectrum", help="spectrum of a walk operator")
    add_construction(p_spec)
    p_spec.add_argument("--method", choices=("mapped", "eig"), default="mapped")
    p_spec.add_argument("--matrix-output", dest="matrix_output", help="also write the operator as CSV")

    p_walk = sub.add_parser("walk", help="simulate a walk and print vertex distributions")
    add_construction(p_walk)
    p_walk.add_argument("--steps", type=int, default=10)
    p_walk.add_argument("--start", type=int, default=0, help="initial arc for a point-mass state")
    p_walk.add_argument("--seed", type=int, help="start from a seeded random unit state instead")

    p_qg = sub.add_parser("qgraph", help="quantum-graph walk spectrum or k-scan")
    p_qg.add_argument("graph")
    p_qg.add_argument("--k", type=float)
    p_qg.add_argument("--L", type=float, default=1.0)
    p_qg.add_argument("--alpha", type=float, default=0.0)
    p_qg.add_argument("--scan", help="k_min:k_max:grid")

    p_sup = sub.add_parser("support", help="positive-support spectra and zeta poles")
    p_sup.add_argument("graph")
    p_sup.add_argument("--j", type=int, choices=(1, 2, 3), default=1)
    p_sup.add_argument("--verify-identity", dest="verify_identity", action="store_true")
    p_sup.add_argument("--poles", action="store_true")
    p_sup.add_argument("--svg")
    p_sup.add_argument("--csv")

    p_ver = sub.add_parser("verify", help="run the oracle suite")
    p_ver.add_argument("--corpus", help="directory of edge-list files")
    p_ver.add_argument("--builtin", action="store_true")
    p_ver.add_argument("--which", choices=THEOREMS + ("all",), default="all")
    p_ver.add_argument("--tol", type=float)
    p_ver.add_argument("--csv")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QWSError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
