"""
Graph representation for quantum-walk operators.

A Graph is a finite connected undirected (multi)graph whose arcs are indexed
so that edge k = {u, v} yields arc 2k = (u -> v) and arc 2k+1 = (v -> u).
The inverse of arc i is therefore i ^ 1.
"""

import math
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from . import config
from .errors import GraphError

Edge = Tuple[int, int]


@dataclass(frozen=True)
class GraphProfile:
    """
    Structural invariants the spectral formulas branch on.

    Attributes:
        is_tree: |E| = |V| - 1
        cycle_rank: |E| - |V| + 1
        is_bipartite: a proper 2-coloring exists
        girth: length of the shortest cycle, math.inf for trees
        is_regular: every vertex has the same degree
        degree: the common degree when regular, else None
    """

    is_tree: bool
    cycle_rank: int
    is_bipartite: bool
    girth: Union[int, float]
    is_regular: bool
    degree: Optional[int]


class Graph:
    """
    Finite connected undirected graph with symmetric-arc indexing.

    Instances are immutable after construction; the arc arrays are read-only
    numpy views and may be shared across threads.

    Attributes:
        num_vertices (int): |V|
        edges (tuple): unordered vertex pairs in input order
        origin (np.ndarray): o(e) for every arc index e
        terminus (np.ndarray): t(e) for every arc index e
    """

    def __init__(self, num_vertices: int, edges: Iterable[Sequence[int]],
                 allow_parallel: bool = config.ALLOW_PARALLEL_EDGES):
        """
        Create a graph with validation.

        Args:
            num_vertices: number of vertices, labelled 0..num_vertices-1
            edges: vertex pairs (u, v) with u != v
            allow_parallel: accept repeated vertex pairs

        Raises:
            GraphError: on self-loops, out-of-range vertices, duplicate edges
                (unless allowed), an edgeless graph or a disconnected graph

        Examples:
            >>> triangle = Graph(3, [(0, 1), (1, 2), (2, 0)])
            >>> triangle.num_arcs
            6
        """
        if num_vertices < 1:
            raise GraphError(f"Graph needs at least one vertex, got {num_vertices}")

        edge_list: List[Edge] = []
        seen = set()
        for index, pair in enumerate(edges):
            u, v = (int(x) for x in pair)
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise GraphError(
                    f"Edge {index} = ({u}, {v}) has a vertex outside 0..{num_vertices - 1}"
                )
            if u == v:
                raise GraphError(f"Edge {index} = ({u}, {v}) is a self-loop")
            key = (min(u, v), max(u, v))
            if key in seen and not allow_parallel:
                raise GraphError(f"Edge {index} = ({u}, {v}) duplicates an earlier edge")
            seen.add(key)
            edge_list.append((u, v))

        if not edge_list:
            raise GraphError("Graph has no edges; walks need at least one arc")

        self.num_vertices = num_vertices
        self.edges = tuple(edge_list)
        self.allow_parallel = allow_parallel

        if not nx.is_connected(self.to_networkx()):
            raise GraphError("Graph is disconnected (BFS from vertex 0 misses vertices)")

        origin = np.empty(2 * len(edge_list), dtype=np.int64)
        terminus = np.empty_like(origin)
        for k, (u, v) in enumerate(edge_list):
            origin[2 * k], terminus[2 * k] = u, v
            origin[2 * k + 1], terminus[2 * k + 1] = v, u
        origin.flags.writeable = False
        terminus.flags.writeable = False
        self.origin = origin
        self.terminus = terminus

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        """Convert a networkx graph, relabelling nodes 0..n-1 in sorted order."""
        relabelled = nx.convert_node_labels_to_integers(graph, ordering="sorted")
        pairs = sorted((min(u, v), max(u, v)) for u, v in relabelled.edges())
        return cls(relabelled.number_of_nodes(), pairs,
                   allow_parallel=graph.is_multigraph())

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_arcs(self) -> int:
        return 2 * len(self.edges)

    @staticmethod
    def inverse(arc: int) -> int:
        """Index of the inverse arc: arcs 2k and 2k+1 are mutually inverse."""
        return arc ^ 1

    def arc(self, index: int) -> Edge:
        """Return the arc with the given index as (origin, terminus)."""
        return int(self.origin[index]), int(self.terminus[index])

    def arc_index(self, u: int, v: int) -> int:
        """Index of the first arc (u -> v); raises GraphError if absent."""
        hits = np.flatnonzero((self.origin == u) & (self.terminus == v))
        if hits.size == 0:
            raise GraphError(f"No arc ({u} -> {v}) in graph")
        return int(hits[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        """Vertex degrees (number of arcs terminating at each vertex)."""
        deg = np.bincount(self.terminus, minlength=self.num_vertices)
        deg.flags.writeable = False
        return deg

    @cached_property
    def incidence(self) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
        """Per-vertex tuple of (neighbour, edge index)."""
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(self.num_vertices)]
        for k, (u, v) in enumerate(self.edges):
            adj[u].append((v, k))
            adj[v].append((u, k))
        return tuple(tuple(row) for row in adj)

    def adjacency_matrix(self) -> np.ndarray:
        """Integer adjacency matrix M (parallel edges counted)."""
        m = np.zeros((self.num_vertices, self.num_vertices), dtype=np.int64)
        np.add.at(m, (self.origin, self.terminus), 1)
        return m

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.num_vertices))
        graph.add_edges_from(self.edges)
        return graph

    @cached_property
    def profile(self) -> GraphProfile:
        return _compute_profile(self)

    def edge_list_text(self) -> str:
        """Serialize to the canonical edge-list text format."""
        lines = [str(self.num_vertices)]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"Graph(num_vertices={self.num_vertices}, num_edges={self.num_edges})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return False
        return self.num_vertices == other.num_vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.num_vertices, self.edges))


def _girth(g: Graph) -> Union[int, float]:
    # BFS from every vertex; a non-tree edge closing at (u, v) gives a cycle
    # of length dist[u] + dist[v] + 1, exact when minimised over all roots.
    best: Union[int, float] = math.inf
    for root in range(g.num_vertices):
        dist = [-1] * g.num_vertices
        parent_edge = [-1] * g.num_vertices
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for v, k in g.incidence[u]:
                if k == parent_edge[u]:
                    continue
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    parent_edge[v] = k
                    queue.append(v)
                else:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


def _compute_profile(g: Graph) -> GraphProfile:
    cycle_rank = g.num_edges - g.num_vertices + 1
    degrees = g.degrees
    is_regular = bool(np.all(degrees == degrees[0]))
    return GraphProfile(
        is_tree=cycle_rank == 0,
        cycle_rank=cycle_rank,
        is_bipartite=nx.is_bipartite(g.to_networkx()),
        girth=_girth(g),
        is_regular=is_regular,
        degree=int(degrees[0]) if is_regular else None,
    )


def profile(g: Graph) -> GraphProfile:
    """
    Structural profile of a graph (cached on the instance).

    Examples:
        >>> profile(named_graph("C5")).girth
        5
        >>> profile(named_graph("petersen")).cycle_rank
        6
    """
    return g.profile


def parse_graph(text: str, strict: bool = True) -> Graph:
    """
    Parse the canonical edge-list text format.

    The first non-comment line holds the vertex count; every further line is
    "u v". Text after '#' is ignored.

    Args:
        text: edge-list text
        strict: reject duplicate edges (parallel edges allowed when False)

    Returns:
        Graph with arcs ordered by input edge order

    Raises:
        GraphError: malformed lines, out-of-range vertices, self-loops,
            duplicates in strict mode, disconnected input
    """
    num_vertices: Optional[int] = None
    edges: List[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(config.COMMENT_PREFIX, 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if num_vertices is None:
            if len(fields) != 1 or not fields[0].isdigit():
                raise GraphError(f"Line {lineno}: expected vertex count, got {line!r}")
            num_vertices = int(fields[0])
            continue
        if len(fields) != 2 or not all(re.fullmatch(r"-?\d+", f) for f in fields):
            raise GraphError(f"Line {lineno}: expected 'u v', got {line!r}")
        edges.append((int(fields[0]), int(fields[1])))

    if num_vertices is None:
        raise GraphError("Missing vertex count header line")
    return Graph(num_vertices, edges, allow_parallel=not strict)


def random_connected_graph(n: int, m: int, seed: int) -> Graph:
    """
    Seeded random connected simple graph.

    A random spanning tree (each vertex of a random permutation attaches to a
    uniformly chosen earlier one) plus m - n + 1 distinct non-tree edges.

    Raises:
        GraphError: if (n, m) admits no connected simple graph
    """
    if n < 2 or m < n - 1 or m > n * (n - 1) // 2:
        raise GraphError(f"No connected simple graph with n={n}, m={m}")

    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    tree = set()
    for i in range(1, n):
        parent = int(order[rng.integers(0, i)])
        child = int(order[i])
        tree.add((min(parent, child), max(parent, child)))

    candidates = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in tree]
    extra = rng.choice(len(candidates), size=m - (n - 1), replace=False)
    edges = sorted(tree) + [candidates[i] for i in sorted(int(x) for x in extra)]
    return Graph(n, edges)


_NAMED = re.compile(r"^(?P<kind>[PCK])(?P<a>\d+)(?:,(?P<b>\d+))?$")


def named_graph(name: str) -> Graph:
    """
    Build a graph from the named catalogue.

    Names: "P<n>" path on n vertices, "C<n>" cycle, "K<n>" complete,
    "K<a>,<b>" complete bipartite (K1,n is the star), "petersen",
    "dodecahedron".
    """
    key = name.strip()
    lowered = key.lower()
    if lowered == "petersen":
        return Graph.from_networkx(nx.petersen_graph())
    if lowered == "dodecahedron":
        return Graph.from_networkx(nx.dodecahedral_graph())

    match = _NAMED.match(key.upper())
    if not match:
        raise GraphError(f"Unknown graph name: {name!r}")
    kind, a, b = match.group("kind"), int(match.group("a")), match.group("b")
    if b is not None:
        if kind != "K":
            raise GraphError(f"Unknown graph name: {name!r}")
        return Graph.from_networkx(nx.complete_bipartite_graph(a, int(b)))
    if kind == "P":
        return Graph.from_networkx(nx.path_graph(a))
    if kind == "C":
        if a < 3:
            raise GraphError(f"Cycle needs at least 3 vertices, got {a}")
        return Graph.from_networkx(nx.cycle_graph(a))
    return Graph.from_networkx(nx.complete_graph(a))
