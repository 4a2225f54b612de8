"""Grammar-to-grammar constructions for union, disjoint sum, Kleene sum,
chain concatenation and star concatenation of graph languages."""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import control as ctl
from .control import ControlExpr
from .errors import NoTerminalProduction
from .grammar import (
    Grammar,
    Jumping,
    Production,
    Standard,
    ensure_valid,
    fresh_label,
    prefix_productions,
    rename_apart,
)
from .graph import EMPTY_GRAPH, LabeledGraph, disjoint_sum_graphs, single_node


@dataclass(frozen=True)
class MarkedGrammar:
    grammar: Grammar
    marked_control: ControlExpr
    marker: str
    primed_names: dict

    __hash__ = None


def _assemble(
    name: str,
    parts: list[Grammar],
    extra_productions: list[Production],
    control: ControlExpr,
    *,
    start_label: str,
    node_terminals: frozenset = frozenset(),
    edge_terminals: frozenset = frozenset(),
) -> Grammar:
    productions: dict[str, Production] = {}
    for g in parts:
        productions.update(g.productions)
    for p in extra_productions:
        productions[p.name] = p
    g = Grammar(
        name=name,
        sigma=frozenset().union(*(g.sigma for g in parts)) | {start_label} | node_terminals,
        delta=frozenset().union(*(g.delta for g in parts)) | node_terminals,
        gamma=frozenset().union(*(g.gamma for g in parts)) | edge_terminals,
        omega=frozenset().union(*(g.omega for g in parts)) | edge_terminals,
        productions=productions,
        start=single_node(start_label),
        control=control,
        generated=True,
    )
    return ensure_valid(g)


def _taken(*grammars: Grammar) -> set[str]:
    out: set[str] = set()
    for g in grammars:
        out |= g.all_labels()
    return out


def union_grammar(g1: Grammar, g2: Grammar) -> Grammar:
    ensure_valid(g1)
    ensure_valid(g2)
    h1, h2, _ = rename_apart(g1, g2)
    taken = _taken(h1, h2)
    s = fresh_label(taken, "S")
    p01 = fresh_label(taken, "p0")
    p02 = fresh_label(taken | {p01}, "p0")
    control = ctl.union(
        [ctl.concat([ctl.sym(p01), h1.control]), ctl.concat([ctl.sym(p02), h2.control])]
    )
    return _assemble(
        f"union_{g1.name}_{g2.name}",
        [h1, h2],
        [Production(p01, s, h1.start), Production(p02, s, h2.start)],
        control,
        start_label=s,
    )


def disjoint_sum_grammar(g1: Grammar, g2: Grammar) -> Grammar:
    ensure_valid(g1)
    ensure_valid(g2)
    h1, h2, _ = rename_apart(g1, g2)
    taken = _taken(h1, h2)
    s = fresh_label(taken, "S")
    p01 = fresh_label(taken, "p0")
    control = ctl.concat([ctl.sym(p01), h1.control, h2.control])
    return _assemble(
        f"dsum_{g1.name}_{g2.name}",
        [h1, h2],
        [Production(p01, s, disjoint_sum_graphs(h1.start, h2.start))],
        control,
        start_label=s,
    )


def _iterating_productions(taken: set[str], start: LabeledGraph):
    s = fresh_label(taken, "S")
    p01 = fresh_label(taken, "p0")
    p02 = fresh_label(taken | {p01}, "p0")
    loop = Production(p01, s, disjoint_sum_graphs(start, single_node(s)))
    return s, p01, p02, loop


def kleene_sum_grammar(g1: Grammar) -> Grammar:
    ensure_valid(g1)
    h1, _ = prefix_productions(g1, "g1_")
    s, p01, p02, loop = _iterating_productions(_taken(h1), h1.start)
    control = ctl.concat([ctl.star(ctl.concat([ctl.sym(p01), h1.control])), ctl.sym(p02)])
    return _assemble(
        f"ksum_{g1.name}",
        [h1],
        [loop, Production(p02, s, EMPTY_GRAPH)],
        control,
        start_label=s,
    )


# ---------------------------------------------------------------------------
# marking


def _substitutions(instr, old: str, new: str) -> list:
    """Copies of ``instr`` with some nonempty set of ``old`` label slots
    switched to ``new``."""
    if isinstance(instr, Standard):
        if instr.neighbor_label != old:
            return []
        return [instr._replace(neighbor_label=new)]
    out = []
    a_hit = instr.daughter_label == old
    b_hit = instr.host_label == old
    for swap_a in (False, True) if a_hit else (False,):
        for swap_b in (False, True) if b_hit else (False,):
            if swap_a or swap_b:
                out.append(
                    instr._replace(
                        daughter_label=new if swap_a else instr.daughter_label,
                        host_label=new if swap_b else instr.host_label,
                    )
                )
    return out


def prime_production(prod: Production, terminals: frozenset, marker: str, new_name: str) -> Production:
    """Copy ``prod`` with its lowest-id terminal daughter node relabelled to
    ``marker``; every instruction mentioning the old label gains a twin that
    mentions the marker instead."""
    chosen = min(n for n, lab in prod.daughter.nodes.items() if lab in terminals)
    old = prod.daughter.label(chosen)
    nodes = dict(prod.daughter.nodes)
    nodes[chosen] = marker
    daughter = LabeledGraph(nodes, prod.daughter.edges)
    extra = [dup for c in prod.instructions for dup in _substitutions(c, old, marker)]
    return Production(new_name, prod.lhs, daughter, prod.instructions + tuple(extra))


def _has_terminal_daughter(prod: Production, terminals: frozenset) -> bool:
    return any(lab in terminals for lab in prod.daughter.nodes.values())


def prime_marked_control(g: Grammar, marker_stem: str, avoid=frozenset()) -> MarkedGrammar:
    """Expose one designated terminal node in every derived graph.

    The control is split into plus-free components. In each, the last
    explicit occurrence of a production with a terminal daughter node is
    replaced by a primed copy that labels one such node with a fresh marker.
    """
    taken = g.all_labels() | set(avoid)
    marker = fresh_label(taken, marker_stem)
    components = ctl.plus_free_normal_form(g.control)
    productions = dict(g.productions)
    primed: dict[str, str] = {}
    rewritten = []
    failures = []
    for comp in components:
        handles = [
            h
            for h in ctl.explicit_occurrences(comp)
            if _has_terminal_daughter(g.productions[h.name], g.delta)
        ]
        if not handles:
            failures.append(ctl.to_text(comp))
            continue
        target = handles[-1]
        if target.name not in primed:
            new_name = f"{target.name}{marker}"
            while new_name in taken or new_name in productions:
                new_name += "_"
            primed[target.name] = new_name
            productions[new_name] = prime_production(
                g.productions[target.name], g.delta, marker, new_name
            )
        rewritten.append(ctl.substitute_occurrence(comp, target, primed[target.name]))
    if failures:
        raise NoTerminalProduction(failures)
    marked_control = ctl.union(rewritten)
    grammar = replace(
        g,
        sigma=g.sigma | {marker},
        delta=g.delta | {marker},
        productions=productions,
        control=marked_control,
        generated=True,
    )
    return MarkedGrammar(ensure_valid(grammar), marked_control, marker, primed)


def chain_concat_grammar(g1: Grammar, g2: Grammar) -> Grammar:
    ensure_valid(g1)
    ensure_valid(g2)
    h1, h2, _ = rename_apart(g1, g2)
    m1 = prime_marked_control(h1, "x", avoid=h2.all_labels())
    m2 = prime_marked_control(h2, "y", avoid=h1.all_labels() | {m1.marker})
    taken = _taken(m1.grammar, m2.grammar)
    alpha = fresh_label(taken, "alpha")
    s = fresh_label(taken, "S")
    p01 = fresh_label(taken, "p0")
    jump = Jumping(m2.marker, alpha, m1.marker)
    second = dict(m2.grammar.productions)
    for primed_name in m2.primed_names.values():
        prod = second[primed_name]
        second[primed_name] = replace(prod, instructions=prod.instructions + (jump,))
    part2 = replace(m2.grammar, productions=second)
    control = ctl.concat([ctl.sym(p01), m1.marked_control, m2.marked_control])
    return _assemble(
        f"chain_{g1.name}_{g2.name}",
        [m1.grammar, part2],
        [Production(p01, s, disjoint_sum_graphs(h1.start, h2.start))],
        control,
        start_label=s,
        node_terminals=frozenset({m1.marker, m2.marker}),
        edge_terminals=frozenset({alpha}),
    )


def star_concat_grammar(g1: Grammar) -> Grammar:
    ensure_valid(g1)
    h1, _ = prefix_productions(g1, "g1_")
    m1 = prime_marked_control(h1, "x")
    taken = _taken(m1.grammar)
    alpha = fresh_label(taken, "alpha")
    center = fresh_label(taken, "c")
    s, p01, p02, loop = _iterating_productions(taken | {alpha, center}, h1.start)
    hub = Production(p02, s, single_node(center), (Jumping(center, alpha, m1.marker),))
    control = ctl.concat(
        [ctl.star(ctl.concat([ctl.sym(p01), m1.marked_control])), ctl.sym(p02)]
    )
    return _assemble(
        f"star_{g1.name}",
        [m1.grammar],
        [loop, hub],
        control,
        start_label=s,
        node_terminals=frozenset({m1.marker, center}),
        edge_terminals=frozenset({alpha}),
    )
