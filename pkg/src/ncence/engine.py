"""Applying productions, running control words and enumerating languages."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .control import automaton
from .errors import BudgetError, DeadEnd, NotApplicable
from .grammar import Grammar, Jumping, Production, Standard
from .graph import Edge, GraphSet, LabeledGraph, canonical_key


@dataclass(frozen=True)
class EnumLimits:
    max_word_len: int = 5
    max_nodes: int = 14
    max_states: int = 50_000

    def __post_init__(self):
        for name in ("max_word_len", "max_nodes", "max_states"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class DerivationState:
    graph: LabeledGraph
    word_applied: tuple = ()


def applicable_nodes(g: LabeledGraph, prod: Production) -> list[int]:
    return [n for n, lab in g.nodes.items() if lab == prod.lhs]


def daughter_placement(g: LabeledGraph, prod: Production) -> dict[int, int]:
    """Host ids given to the daughter's nodes when ``prod`` rewrites a node of ``g``.

    Daughter nodes are numbered after the host's largest id, in order of
    their local ids.
    """
    base = g.max_id() + 1
    return {d: base + i for i, d in enumerate(prod.daughter.nodes)}


def apply_production(g: LabeledGraph, prod: Production, m: int) -> LabeledGraph:
    if m not in g:
        raise NotApplicable(f"node {m} is not in the host graph")
    if g.label(m) != prod.lhs:
        raise NotApplicable(f"node {m} is labelled {g.label(m)!r}, production needs {prod.lhs!r}")

    former = g.neighbors(m)
    nodes = {n: lab for n, lab in g.nodes.items() if n != m}
    remainder = list(nodes.items())
    edges = {e for e in g.edges if m not in (e.u, e.v)}

    place = daughter_placement(g, prod)
    for d, lab in prod.daughter.nodes.items():
        nodes[place[d]] = lab
    edges.update(Edge(place[e.u], place[e.v], e.label) for e in prod.daughter.edges)

    for instr in prod.instructions:
        if isinstance(instr, Standard):
            target = place[instr.target]
            for x, lab in former:
                if lab == instr.old_edge and g.label(x) == instr.neighbor_label:
                    edges.add(Edge.make(x, target, instr.new_edge))
        elif isinstance(instr, Jumping):
            sources = [place[d] for d, lab in prod.daughter.nodes.items() if lab == instr.daughter_label]
            hosts = [h for h, lab in remainder if lab == instr.host_label]
            edges.update(Edge.make(s, h, instr.edge) for s in sources for h in hosts)
    return LabeledGraph(nodes, edges)


def derive_word(
    g0: LabeledGraph, grammar: Grammar, word: Sequence[str], limits: EnumLimits
) -> GraphSet:
    """All graphs reachable from ``g0`` by applying ``word`` left to right.

    Every choice of mother node is explored. Branches growing past
    ``limits.max_nodes`` are dropped and the result is marked truncated.
    """
    states = {canonical_key(g0): g0}
    truncated = False
    for name in word:
        prod = grammar.productions[name]
        nxt: dict[bytes, LabeledGraph] = {}
        for g in states.values():
            for m in applicable_nodes(g, prod):
                h = apply_production(g, prod, m)
                if len(h) > limits.max_nodes:
                    truncated = True
                    continue
                nxt.setdefault(canonical_key(h), h)
                if len(nxt) > limits.max_states:
                    raise BudgetError(f"more than {limits.max_states} live derivation states")
        states = nxt
    out = GraphSet(truncated=truncated)
    for key, g in states.items():
        out.add(g, key)
    return out


@dataclass
class Enumeration:
    """Terminal graphs found, each with the shortest control word length
    that produced it."""

    graphs: dict[bytes, LabeledGraph]
    min_word_len: dict[bytes, int]
    truncated: bool = False

    def graph_set(self) -> GraphSet:
        out = GraphSet(truncated=self.truncated)
        for key, g in self.graphs.items():
            out.add(g, key)
        return out


def enumerate_with_lengths(grammar: Grammar, limits: EnumLimits) -> Enumeration:
    """Breadth-first search over (control state, graph) pairs.

    This is equivalent to taking every control word up to
    ``limits.max_word_len`` and deriving it, but shares work between words
    with a common prefix. A pair reached again at a greater depth can only
    lead to a subset of what it led to before, so it is skipped.
    """
    auto = automaton(grammar.control)
    start_key = canonical_key(grammar.start)
    frontier = [(auto.START, start_key, grammar.start)]
    seen = {(auto.START, start_key)}
    found: dict[bytes, LabeledGraph] = {}
    lengths: dict[bytes, int] = {}
    truncated = False

    for depth in range(limits.max_word_len + 1):
        for state, key, g in frontier:
            if auto.is_accepting(state) and grammar.is_terminal_graph(g) and key not in found:
                found[key] = g
                lengths[key] = depth
        if depth == limits.max_word_len:
            break
        nxt = []
        for state, _, g in frontier:
            for name in auto.enabled(state):
                prod = grammar.productions[name]
                target = auto.step(state, name)
                for m in applicable_nodes(g, prod):
                    h = apply_production(g, prod, m)
                    if len(h) > limits.max_nodes:
                        truncated = True
                        continue
                    hkey = canonical_key(h)
                    if (target, hkey) in seen:
                        continue
                    seen.add((target, hkey))
                    if len(seen) > limits.max_states:
                        raise BudgetError(f"more than {limits.max_states} derivation states")
                    nxt.append((target, hkey, h))
        frontier = nxt
    return Enumeration(found, lengths, truncated)


def enumerate_language(grammar: Grammar, limits: EnumLimits) -> GraphSet:
    return enumerate_with_lengths(grammar, limits).graph_set()


def sample_derivation(
    grammar: Grammar, seed: int, limits: EnumLimits
) -> tuple[tuple[str, ...], LabeledGraph]:
    """One random derivation, reproducible from ``seed``.

    At each step the walk picks uniformly among stopping (when the control
    accepts) and the productions that are enabled, applicable, and can still
    reach acceptance within the word-length limit; then uniformly among the
    mother nodes. Raises :class:`DeadEnd` when the walk gets stuck or stops
    on a graph with nonterminal labels.
    """
    rng = random.Random(seed)
    auto = automaton(grammar.control)
    state = auto.START
    g = grammar.start
    word: list[str] = []
    while True:
        remaining = limits.max_word_len - len(word)
        options: list = ["stop"] if auto.is_accepting(state) else []
        if remaining > 0:
            for name in auto.enabled(state):
                target = auto.step(state, name)
                if auto.distance_to_accept(target) > remaining - 1:
                    continue
                if applicable_nodes(g, grammar.productions[name]):
                    options.append(name)
        if not options:
            raise DeadEnd(f"no way to continue after {' '.join(word) or 'the empty word'}")
        choice = rng.choice(options)
        if choice == "stop":
            if not grammar.is_terminal_graph(g):
                raise DeadEnd(f"derivation {' '.join(word)} ends in a nonterminal graph")
            return tuple(word), g
        prod = grammar.productions[choice]
        m = rng.choice(applicable_nodes(g, prod))
        g = apply_production(g, prod, m)
        if len(g) > limits.max_nodes:
            raise DeadEnd(f"graph exceeded {limits.max_nodes} nodes")
        word.append(choice)
        state = auto.step(state, choice)
