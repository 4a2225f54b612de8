"""Labelled undirected graphs and the graph-level operations on them.

Graphs are immutable values. Node ids are arbitrary non-negative integers
with no meaning beyond identity; everything that matters is invariant under
renaming them, which is what :func:`canonical_key` captures.
"""

from __future__ import annotations

import re
from collections import defaultdict
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import (
    DanglingEdge,
    DuplicateEdge,
    DuplicateNode,
    EmptyOperand,
    GraphError,
    SelfLoop,
    TooLarge,
    UnknownNode,
)

LABEL_RE = re.compile(r"[A-Za-z0-9_#]+\Z")
UNDERLYING_LABEL = "#u"
RESERVED_PREFIX = "#"
CANONICAL_CAP = 16


def is_label(text) -> bool:
    return isinstance(text, str) and LABEL_RE.match(text) is not None


def check_label(text) -> str:
    if not is_label(text):
        raise GraphError(f"invalid label {text!r}")
    return text


class Edge(NamedTuple):
    """Undirected edge, stored with ``u < v``."""

    u: int
    v: int
    label: str

    @classmethod
    def make(cls, u: int, v: int, label: str) -> "Edge":
        return cls(u, v, label) if u < v else cls(v, u, label)

    def other(self, w: int) -> int:
        return self.v if w == self.u else self.u


class LabeledGraph:
    __slots__ = ("_nodes", "_edges", "_adj", "_hash")

    def __init__(self, nodes: Mapping[int, str] | None = None, edges: Iterable[Edge] = ()):
        # trusted constructor: callers go through build_graph or keep invariants themselves
        self._nodes = dict(sorted((nodes or {}).items()))
        self._edges = frozenset(edges)
        self._adj = None
        self._hash = None

    @property
    def nodes(self) -> Mapping[int, str]:
        return self._nodes

    @property
    def edges(self) -> frozenset:
        return self._edges

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node: int) -> bool:
        return node in self._nodes

    def label(self, node: int) -> str:
        return self._nodes[node]

    def node_ids(self) -> list[int]:
        return list(self._nodes)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self._edges)

    def adjacency(self) -> dict[int, list[tuple[int, str]]]:
        """Map each node to its ``(neighbour, edge label)`` pairs."""
        if self._adj is None:
            adj: dict[int, list[tuple[int, str]]] = {n: [] for n in self._nodes}
            for e in self._edges:
                adj[e.u].append((e.v, e.label))
                adj[e.v].append((e.u, e.label))
            self._adj = adj
        return self._adj

    def neighbors(self, node: int) -> list[tuple[int, str]]:
        return self.adjacency()[node]

    def degree(self, node: int) -> int:
        return len(self.adjacency()[node])

    def node_labels(self) -> set[str]:
        return set(self._nodes.values())

    def edge_labels(self) -> set[str]:
        return {e.label for e in self._edges}

    def max_id(self) -> int:
        return max(self._nodes) if self._nodes else -1

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((tuple(self._nodes.items()), self._edges))
        return self._hash

    def __repr__(self) -> str:
        nodes = ", ".join(f"{k}:{v}" for k, v in self._nodes.items())
        edges = ", ".join(f"{e.u}-{e.label}-{e.v}" for e in self.sorted_edges())
        return f"LabeledGraph({{{nodes}}}, [{edges}])"


EMPTY_GRAPH = LabeledGraph()


def build_graph(
    nodes: Iterable[tuple[int, str]], edges: Iterable[tuple[int, int, str]] = ()
) -> LabeledGraph:
    """Build a graph, rejecting anything that breaks the graph invariants."""
    node_map: dict[int, str] = {}
    for node_id, label in nodes:
        if not isinstance(node_id, int) or isinstance(node_id, bool) or node_id < 0:
            raise GraphError(f"node id must be a non-negative integer, got {node_id!r}")
        if node_id in node_map:
            raise DuplicateNode(f"node {node_id} declared twice")
        node_map[node_id] = check_label(label)
    edge_set: set[Edge] = set()
    for u, v, label in edges:
        check_label(label)
        for end in (u, v):
            if end not in node_map:
                raise DanglingEdge(f"edge {u}-{v} refers to unknown node {end}")
        if u == v:
            raise SelfLoop(f"self-loop on node {u}")
        edge = Edge.make(u, v, label)
        if edge in edge_set:
            raise DuplicateEdge(f"edge {edge.u}-{edge.v} labelled {label!r} declared twice")
        edge_set.add(edge)
    return LabeledGraph(node_map, edge_set)


def single_node(label: str) -> LabeledGraph:
    return build_graph([(0, label)])


def relabel_ids(g: LabeledGraph, offset: int) -> LabeledGraph:
    return LabeledGraph(
        {n + offset: lab for n, lab in g.nodes.items()},
        (Edge(e.u + offset, e.v + offset, e.label) for e in g.edges),
    )


def compact(g: LabeledGraph) -> LabeledGraph:
    """Renumber node ids to ``0..n-1`` preserving their order."""
    mapping = {n: i for i, n in enumerate(g.nodes)}
    return LabeledGraph(
        {mapping[n]: lab for n, lab in g.nodes.items()},
        (Edge.make(mapping[e.u], mapping[e.v], e.label) for e in g.edges),
    )


def disjoint_sum_graphs(g1: LabeledGraph, g2: LabeledGraph) -> LabeledGraph:
    return _disjoint_sum_with_offset(g1, g2)[0]


def _disjoint_sum_with_offset(g1: LabeledGraph, g2: LabeledGraph) -> tuple[LabeledGraph, int]:
    offset = g1.max_id() + 1 - (min(g2.nodes) if len(g2) else 0)
    offset = max(offset, 0)
    shifted = relabel_ids(g2, offset)
    nodes = dict(g1.nodes)
    nodes.update(shifted.nodes)
    return LabeledGraph(nodes, g1.edges | shifted.edges), offset


def disjoint_sum_all(graphs: Iterable[LabeledGraph]) -> LabeledGraph:
    total = EMPTY_GRAPH
    for g in graphs:
        total = disjoint_sum_graphs(total, g)
    return total


def underlying(g: LabeledGraph) -> LabeledGraph:
    """Erase every node and edge label; parallel edges collapse to one."""
    return LabeledGraph(
        {n: UNDERLYING_LABEL for n in g.nodes},
        {Edge(e.u, e.v, UNDERLYING_LABEL) for e in g.edges},
    )


def chain_join(
    g1: LabeledGraph, d1: int, g2: LabeledGraph, d2: int, alpha: str
) -> LabeledGraph:
    if not len(g1) or not len(g2):
        raise EmptyOperand("chain_join operands must be nonempty")
    if d1 not in g1:
        raise UnknownNode(f"designated node {d1} not in first operand")
    if d2 not in g2:
        raise UnknownNode(f"designated node {d2} not in second operand")
    check_label(alpha)
    joined, offset = _disjoint_sum_with_offset(g1, g2)
    return LabeledGraph(joined.nodes, joined.edges | {Edge.make(d1, d2 + offset, alpha)})


def star_join(
    parts: Sequence[tuple[LabeledGraph, int]], center_label: str, alpha: str
) -> LabeledGraph:
    if not parts:
        raise EmptyOperand("star_join needs at least one part")
    check_label(center_label)
    check_label(alpha)
    nodes: dict[int, str] = {}
    edges: set[Edge] = set()
    designated: list[int] = []
    next_id = 0
    for g, d in parts:
        if not len(g):
            raise EmptyOperand("star_join parts must be nonempty")
        if d not in g:
            raise UnknownNode(f"designated node {d} not in its part")
        shifted = relabel_ids(compact(g), next_id)
        designated.append(next_id + list(g.nodes).index(d))
        nodes.update(shifted.nodes)
        edges |= shifted.edges
        next_id += len(g)
    center = next_id
    nodes[center] = center_label
    edges |= {Edge.make(center, d, alpha) for d in designated}
    return LabeledGraph(nodes, edges)


# ---------------------------------------------------------------------------
# isomorphism


def _pair_labels(g: LabeledGraph) -> dict[tuple[int, int], tuple[str, ...]]:
    pairs: dict[tuple[int, int], list[str]] = defaultdict(list)
    for e in g.edges:
        pairs[(e.u, e.v)].append(e.label)
    return {k: tuple(sorted(v)) for k, v in pairs.items()}


def _pair_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def are_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    """Backtracking search for a label-preserving bijection."""
    if len(g1) != len(g2) or len(g1.edges) != len(g2.edges):
        return False
    if sorted(g1.nodes.values()) != sorted(g2.nodes.values()):
        return False
    p1, p2 = _pair_labels(g1), _pair_labels(g2)

    def signature(g, pairs, n):
        incident = sorted(
            (g.nodes[b if a == n else a], labs) for (a, b), labs in pairs.items() if n in (a, b)
        )
        return (g.nodes[n], tuple(incident))

    sig1 = {n: signature(g1, p1, n) for n in g1.nodes}
    sig2 = {n: signature(g2, p2, n) for n in g2.nodes}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return False

    # most constrained first: rare signatures, then high degree
    counts: dict = defaultdict(int)
    for s in sig1.values():
        counts[s] += 1
    order = sorted(g1.nodes, key=lambda n: (counts[sig1[n]], -len(sig1[n][1]), n))
    candidates = {n: [m for m in g2.nodes if sig2[m] == sig1[n]] for n in order}
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def consistent(n: int, m: int) -> bool:
        for prev, img in mapping.items():
            if p1.get(_pair_key(n, prev), ()) != p2.get(_pair_key(m, img), ()):
                return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        n = order[i]
        for m in candidates[n]:
            if m in used or not consistent(n, m):
                continue
            mapping[n] = m
            used.add(m)
            if extend(i + 1):
                return True
            del mapping[n]
            used.discard(m)
        return False

    return extend(0)


# ---------------------------------------------------------------------------
# canonical form: individualisation/refinement with twin pruning


def _rank(values: dict[int, object]) -> dict[int, int]:
    order = {v: i for i, v in enumerate(sorted(set(values.values())))}
    return {n: order[v] for n, v in values.items()}


def _refine(colors: dict[int, int], adj: dict[int, list[tuple[int, str]]]) -> dict[int, int]:
    while True:
        sigs = {
            n: (c, tuple(sorted((colors[m], lab) for m, lab in adj[n])))
            for n, c in colors.items()
        }
        new = _rank(sigs)
        if len(set(new.values())) == len(set(colors.values())):
            return new
        colors = new


def _twin_classes(g: LabeledGraph) -> dict[int, int]:
    """Map each node to a representative of its twin class.

    Twins share a label and have identical labelled neighbourhoods outside
    the pair itself, so swapping them is an automorphism.
    """
    adj = g.adjacency()
    groups: dict[str, list[int]] = defaultdict(list)
    for n, lab in g.nodes.items():
        groups[lab].append(n)
    rep: dict[int, int] = {}
    for members in groups.values():
        for n in members:
            if n in rep:
                continue
            rep[n] = n
            for m in members:
                if m in rep or m == n:
                    continue
                out_n = {(w, lab) for w, lab in adj[n] if w != m}
                out_m = {(w, lab) for w, lab in adj[m] if w != n}
                if out_n == out_m:
                    rep[m] = n
    return rep


def _certificate(g: LabeledGraph, order: list[int], pairs) -> tuple:
    pos = {n: i for i, n in enumerate(order)}
    labels = tuple(g.nodes[n] for n in order)
    edges = tuple(
        sorted(
            (min(pos[a], pos[b]), max(pos[a], pos[b]), labs) for (a, b), labs in pairs.items()
        )
    )
    return (labels, edges)


def _components(g: LabeledGraph) -> list[list[int]]:
    adj = g.adjacency()
    seen: set[int] = set()
    out = []
    for start in g.nodes:
        if start in seen:
            continue
        seen.add(start)
        stack, comp = [start], [start]
        while stack:
            for w, _ in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
                    comp.append(w)
        out.append(comp)
    return out


def induced_subgraph(g: LabeledGraph, keep) -> LabeledGraph:
    keep = set(keep)
    return LabeledGraph(
        {n: lab for n, lab in g.nodes.items() if n in keep},
        (e for e in g.edges if e.u in keep and e.v in keep),
    )


def canonical_form(g: LabeledGraph, cap: int = CANONICAL_CAP) -> tuple:
    """``(labels, edges)`` of ``g`` under its canonical node ordering.

    Components are canonicalised separately and laid out in sorted order,
    so repeated identical components cost nothing extra.
    """
    if len(g) > cap:
        raise TooLarge(f"graph has {len(g)} nodes; canonicalisation cap is {cap}")
    if not len(g):
        return ((), ())
    comps = _components(g)
    if len(comps) == 1:
        return _connected_form(g)
    labels: list[str] = []
    edges: list[tuple] = []
    for c_labels, c_edges in sorted(_connected_form(induced_subgraph(g, c)) for c in comps):
        offset = len(labels)
        labels.extend(c_labels)
        edges.extend((a + offset, b + offset, labs) for a, b, labs in c_edges)
    return (tuple(labels), tuple(edges))


def _connected_form(g: LabeledGraph) -> tuple:
    adj = g.adjacency()
    pairs = _pair_labels(g)
    twins = _twin_classes(g)
    initial = _refine(_rank({n: lab for n, lab in g.nodes.items()}), adj)
    best: list = [None]

    def search(colors: dict[int, int]) -> None:
        cells: dict[int, list[int]] = defaultdict(list)
        for n, c in colors.items():
            cells[c].append(n)
        if len(cells) == len(colors):
            order = sorted(colors, key=colors.__getitem__)
            cert = _certificate(g, order, pairs)
            if best[0] is None or cert < best[0]:
                best[0] = cert
            return
        target = min(
            (c for c, ms in cells.items() if len(ms) > 1), key=lambda c: (len(cells[c]), c)
        )
        seen_twins: set[int] = set()
        for v in sorted(cells[target]):
            if twins[v] in seen_twins:
                continue
            seen_twins.add(twins[v])
            split = {n: (c, 0 if n == v else 1) for n, c in colors.items()}
            search(_refine(_rank(split), adj))

    search(initial)
    return best[0]


def canonical_key(g: LabeledGraph, cap: int = CANONICAL_CAP) -> bytes:
    """Byte string equal for two graphs exactly when they are isomorphic."""
    labels, edges = canonical_form(g, cap)
    parts = [str(len(labels)), ",".join(labels)]
    parts.extend(f"{a}-{b}:{'/'.join(labs)}" for a, b, labs in edges)
    return ";".join(parts).encode()


# ---------------------------------------------------------------------------


class GraphSet:
    """Graphs deduplicated up to isomorphism.

    ``truncated`` records that some budget pruned the computation that
    produced the set, so the set may be incomplete.
    """

    def __init__(self, graphs: Iterable[LabeledGraph] = (), truncated: bool = False):
        self._members: dict[bytes, LabeledGraph] = {}
        self.truncated = truncated
        for g in graphs:
            self.add(g)

    def add(self, g: LabeledGraph, key: bytes | None = None) -> bool:
        if key is None:
            key = canonical_key(g)
        if key in self._members:
            return False
        self._members[key] = g
        return True

    def __contains__(self, g: LabeledGraph) -> bool:
        return canonical_key(g) in self._members

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[LabeledGraph]:
        for key in sorted(self._members):
            yield self._members[key]

    def keys(self) -> list[bytes]:
        return sorted(self._members)

    def items(self) -> list[tuple[bytes, LabeledGraph]]:
        return sorted(self._members.items())

    def map(self, fn) -> "GraphSet":
        return GraphSet((fn(g) for g in self), truncated=self.truncated)

    def __or__(self, other: "GraphSet") -> "GraphSet":
        out = GraphSet(truncated=self.truncated or other.truncated)
        for key, g in self.items() + other.items():
            out.add(g, key)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphSet):
            return NotImplemented
        return self._members.keys() == other._members.keys()

    __hash__ = None

    def __repr__(self) -> str:
        flag = ", truncated" if self.truncated else ""
        return f"GraphSet({len(self)} graphs{flag})"


# ---------------------------------------------------------------------------


def to_dot(g: LabeledGraph) -> str:
    lines = ["graph G {"]
    lines += [f'  n{n} [label="{lab}"];' for n, lab in g.nodes.items()]
    lines += [f'  n{e.u} -- n{e.v} [label="{e.label}"];' for e in g.sorted_edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"
