"""Grammar values, validation, and the line-oriented grammar file format."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, NamedTuple, Union as _U

from . import control as ctl
from .control import ControlExpr
from .errors import GraphError, ParseError, ValidationError
from .graph import RESERVED_PREFIX, Edge, LabeledGraph, build_graph, is_label


class Standard(NamedTuple):
    """``(a, p|q, B)``: re-attach an ``a``-neighbour that hung off the mother
    by a ``p`` edge to daughter node ``B`` with a ``q`` edge."""

    neighbor_label: str
    old_edge: str
    new_edge: str
    target: int

    def sort_key(self):
        return (0, self.neighbor_label, self.old_edge, self.new_edge, self.target)

    def to_text(self) -> str:
        return f"connect {self.neighbor_label} {self.old_edge}|{self.new_edge} {self.target}"


class Jumping(NamedTuple):
    """``(a, alpha, b)``: join every daughter ``a`` node to every ``b`` node
    of the host remainder."""

    daughter_label: str
    edge: str
    host_label: str

    def sort_key(self):
        return (1, self.daughter_label, self.edge, self.host_label)

    def to_text(self) -> str:
        return f"jump {self.daughter_label} {self.edge} {self.host_label}"


ConnectionInstruction = _U[Standard, Jumping]


def _normalize_instructions(instructions: Iterable[ConnectionInstruction]) -> tuple:
    return tuple(sorted(set(instructions), key=lambda c: c.sort_key()))


@dataclass(frozen=True)
class Production:
    name: str
    lhs: str
    daughter: LabeledGraph
    instructions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "instructions", _normalize_instructions(self.instructions))


@dataclass(frozen=True)
class Grammar:
    name: str
    sigma: frozenset
    delta: frozenset
    gamma: frozenset
    omega: frozenset
    productions: Mapping[str, Production]
    start: LabeledGraph
    control: ControlExpr
    # machine-built grammars may use the reserved "#" namespace
    generated: bool = False

    def __post_init__(self):
        for attr in ("sigma", "delta", "gamma", "omega"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))
        object.__setattr__(self, "productions", dict(sorted(self.productions.items())))

    __hash__ = None

    @property
    def nonterminals(self) -> frozenset:
        return self.sigma - self.delta

    def is_terminal_graph(self, g: LabeledGraph) -> bool:
        return all(lab in self.delta for lab in g.nodes.values()) and all(
            e.label in self.omega for e in g.edges
        )

    def all_labels(self) -> set[str]:
        return set(self.sigma | self.gamma) | set(self.productions)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    location: str = ""

    def __str__(self) -> str:
        where = f" at {self.location}" if self.location else ""
        return f"{self.kind}({self.detail}){where}"


# ---------------------------------------------------------------------------
# validation


def validate_grammar(g: Grammar) -> list[Violation]:
    out: list[Violation] = []

    def add(kind, detail, location=""):
        out.append(Violation(kind, str(detail), location))

    def check_label(lab, location):
        if not is_label(lab):
            add("BadLabel", lab, location)
            return False
        if lab.startswith(RESERVED_PREFIX) and not g.generated:
            add("ReservedLabel", lab, location)
        return True

    check_label(g.name, "grammar name")
    for attr in ("sigma", "delta", "gamma", "omega"):
        for lab in sorted(getattr(g, attr), key=str):
            check_label(lab, attr)
    for lab in sorted(g.delta - g.sigma, key=str):
        add("TerminalNotInSigma", lab, "delta")
    for lab in sorted(g.omega - g.gamma, key=str):
        add("TerminalEdgeNotInGamma", lab, "omega")

    def check_graph(graph, location):
        for n, lab in graph.nodes.items():
            if lab not in g.sigma:
                add("UnknownNodeLabel", lab, f"{location} node {n}")
        for e in sorted(graph.edges):
            if e.label not in g.gamma:
                add("UnknownEdgeLabel", e.label, f"{location} edge {e.u}-{e.v}")

    check_graph(g.start, "start")

    for key, prod in g.productions.items():
        where = f"production {key}"
        check_label(key, where)
        if prod.name != key:
            add("NameMismatch", prod.name, where)
        if prod.lhs not in g.sigma:
            add("UnknownNodeLabel", prod.lhs, f"{where} lhs")
        elif prod.lhs in g.delta:
            add("TerminalLhs", prod.lhs, where)
        check_graph(prod.daughter, f"{where} daughter")
        if not len(prod.daughter) and prod.instructions:
            add("InstructionsOnEmptyDaughter", len(prod.instructions), where)
        for instr in prod.instructions:
            loc = f"{where} instruction {instr.to_text()}"
            if isinstance(instr, Standard):
                if instr.neighbor_label not in g.sigma:
                    add("UnknownNodeLabel", instr.neighbor_label, loc)
                for lab in (instr.old_edge, instr.new_edge):
                    if lab not in g.gamma:
                        add("UnknownEdgeLabel", lab, loc)
                if instr.target not in prod.daughter:
                    add("UnknownTarget", instr.target, loc)
            elif isinstance(instr, Jumping):
                for lab in (instr.daughter_label, instr.host_label):
                    if lab not in g.sigma:
                        add("UnknownNodeLabel", lab, loc)
                if instr.edge not in g.gamma:
                    add("UnknownEdgeLabel", instr.edge, loc)
            else:
                add("BadInstruction", repr(instr), where)

    for name in sorted(ctl.symbols(g.control)):
        if name not in g.productions:
            add("UnknownProduction", name, "control")
    return out


def ensure_valid(g: Grammar) -> Grammar:
    violations = validate_grammar(g)
    if violations:
        raise ValidationError(violations)
    return g


# ---------------------------------------------------------------------------
# file format

_SET_KEYS = {
    "node_labels": "sigma",
    "terminal_nodes": "delta",
    "edge_labels": "gamma",
    "terminal_edges": "omega",
}
_COMMENT_RE = re.compile(r"(?:^|\s)#(?=\s|$)")
_PROD_RE = re.compile(r"prod\s+(\S+)\s*:\s*(\S+)\s*->\s*$")


def _strip_comment(line: str) -> str:
    if line.lstrip().startswith("#"):
        return ""
    m = _COMMENT_RE.search(line)
    return line[: m.start()] if m else line


def _label(token: str, lineno: int, line: str) -> str:
    if not is_label(token):
        raise ParseError(f"invalid label {token!r}", lineno, line.find(token) + 1)
    return token


def _int(token: str, lineno: int, line: str) -> int:
    if not token.isdigit():
        raise ParseError(f"expected a node id, got {token!r}", lineno, line.find(token) + 1)
    return int(token)


class _Block:
    def __init__(self, kind: str, lineno: int, name: str | None = None, lhs: str | None = None):
        self.kind = kind
        self.lineno = lineno
        self.name = name
        self.lhs = lhs
        self.nodes: list[tuple[int, str]] = []
        self.edges: list[tuple[int, int, str]] = []
        self.instructions: list[ConnectionInstruction] = []

    def graph(self) -> LabeledGraph:
        try:
            return build_graph(self.nodes, self.edges)
        except GraphError as exc:
            raise ParseError(f"bad graph in block: {exc}", self.lineno, 1) from exc


def parse_grammar_file(text: str) -> Grammar:
    name = None
    generated = False
    sets: dict[str, frozenset] = {}
    start: LabeledGraph | None = None
    productions: dict[str, Production] = {}
    control_expr = None
    block: _Block | None = None
    last_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        words = line.split()
        head = words[0]

        if block is not None:
            if head == "end" and len(words) == 1:
                if block.kind == "start":
                    start = block.graph()
                else:
                    productions[block.name] = Production(
                        block.name, block.lhs, block.graph(), tuple(block.instructions)
                    )
                block = None
            elif head == "node" and len(words) == 3:
                block.nodes.append((_int(words[1], lineno, raw), _label(words[2], lineno, raw)))
            elif head == "edge" and len(words) == 4:
                block.edges.append(
                    (
                        _int(words[1], lineno, raw),
                        _int(words[2], lineno, raw),
                        _label(words[3], lineno, raw),
                    )
                )
            elif head == "connect" and len(words) == 4 and block.kind == "prod":
                old, bar, new = words[2].partition("|")
                if not bar:
                    raise ParseError("expected <old>|<new> edge labels", lineno, raw.find(words[2]) + 1)
                block.instructions.append(
                    Standard(
                        _label(words[1], lineno, raw),
                        _label(old, lineno, raw),
                        _label(new, lineno, raw),
                        _int(words[3], lineno, raw),
                    )
                )
            elif head == "jump" and len(words) == 4 and block.kind == "prod":
                block.instructions.append(
                    Jumping(*(_label(w, lineno, raw) for w in words[1:]))
                )
            else:
                raise ParseError(f"unexpected line in {block.kind} block", lineno, raw.find(head) + 1)
            continue

        if head == "grammar":
            if name is not None:
                raise ParseError("duplicate grammar header", lineno, 1)
            if len(words) not in (2, 3) or (len(words) == 3 and words[2] != "generated"):
                raise ParseError("expected: grammar <name> [generated]", lineno, 1)
            name = _label(words[1], lineno, raw)
            generated = len(words) == 3
        elif head.endswith(":") and head[:-1] in _SET_KEYS:
            key = _SET_KEYS[head[:-1]]
            if key in sets:
                raise ParseError(f"duplicate section {head[:-1]}", lineno, 1)
            rest = line.split(":", 1)[1].strip()
            items = [t.strip() for t in rest.split(",")] if rest else []
            sets[key] = frozenset(_label(t, lineno, raw) for t in items)
        elif head == "start:" and len(words) == 1:
            if start is not None:
                raise ParseError("duplicate start block", lineno, 1)
            block = _Block("start", lineno)
        elif head == "prod":
            m = _PROD_RE.match(line.strip())
            if not m:
                raise ParseError("expected: prod <name>: <lhs> ->", lineno, 1)
            pname = _label(m.group(1), lineno, raw)
            if pname in productions:
                raise ParseError(f"duplicate production {pname}", lineno, 1)
            block = _Block("prod", lineno, pname, _label(m.group(2), lineno, raw))
        elif head == "control:" or head.startswith("control:"):
            if control_expr is not None:
                raise ParseError("duplicate control", lineno, 1)
            body = line.split(":", 1)[1]
            try:
                control_expr = ctl.parse_control(body)
            except ParseError as exc:
                offset = raw.find(":") + 1
                raise ParseError(exc.message, lineno, offset + exc.column) from exc
        else:
            raise ParseError(f"unexpected line starting with {head!r}", lineno, raw.find(head) + 1)

    if block is not None:
        raise ParseError(f"unterminated {block.kind} block", block.lineno, 1)
    if name is None:
        raise ParseError("missing grammar header", last_line or 1, 1)
    for key, attr in _SET_KEYS.items():
        if attr not in sets:
            raise ParseError(f"missing section {key}", last_line or 1, 1)
    if start is None:
        raise ParseError("missing start block", last_line, 1)
    if control_expr is None:
        raise ParseError("missing control", last_line, 1)

    g = Grammar(
        name=name,
        sigma=sets["sigma"],
        delta=sets["delta"],
        gamma=sets["gamma"],
        omega=sets["omega"],
        productions=productions,
        start=start,
        control=control_expr,
        generated=generated,
    )
    return ensure_valid(g)


def _graph_lines(g: LabeledGraph) -> list[str]:
    lines = [f"  node {n} {lab}" for n, lab in g.nodes.items()]
    lines += [f"  edge {e.u} {e.v} {e.label}" for e in g.sorted_edges()]
    return lines


def serialize_grammar(g: Grammar) -> str:
    header = f"grammar {g.name}" + (" generated" if g.generated else "")
    lines = [header]
    for key, attr in _SET_KEYS.items():
        items = ", ".join(sorted(getattr(g, attr)))
        lines.append(f"{key}: {items}".rstrip())
    lines.append("start:")
    lines += _graph_lines(g.start)
    lines.append("end")
    for name, prod in g.productions.items():
        lines.append(f"prod {name}: {prod.lhs} ->")
        lines += _graph_lines(prod.daughter)
        lines += [f"  {instr.to_text()}" for instr in prod.instructions]
        lines.append("end")
    lines.append(f"control: {ctl.to_text(g.control)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# renaming


def fresh_label(taken: Iterable[str], stem: str) -> str:
    taken = set(taken)
    k = 1
    while f"{RESERVED_PREFIX}{stem}{k}" in taken:
        k += 1
    return f"{RESERVED_PREFIX}{stem}{k}"


@dataclass
class NameMap:
    productions: dict[str, str] = field(default_factory=dict)
    node_labels: dict[str, str] = field(default_factory=dict)
    edge_labels: dict[str, str] = field(default_factory=dict)


def _rename_graph(g: LabeledGraph, nodes: Mapping[str, str], edges: Mapping[str, str]) -> LabeledGraph:
    return LabeledGraph(
        {n: nodes.get(lab, lab) for n, lab in g.nodes.items()},
        (Edge(e.u, e.v, edges.get(e.label, e.label)) for e in g.edges),
    )


def _rename_instruction(instr, nodes, edges):
    if isinstance(instr, Standard):
        return Standard(
            nodes.get(instr.neighbor_label, instr.neighbor_label),
            edges.get(instr.old_edge, instr.old_edge),
            edges.get(instr.new_edge, instr.new_edge),
            instr.target,
        )
    return Jumping(
        nodes.get(instr.daughter_label, instr.daughter_label),
        edges.get(instr.edge, instr.edge),
        nodes.get(instr.host_label, instr.host_label),
    )


def rename_grammar(g: Grammar, names: NameMap, *, name: str | None = None, generated: bool | None = None) -> Grammar:
    nodes, edges, prods = names.node_labels, names.edge_labels, names.productions

    def relabel(labels, mapping):
        return frozenset(mapping.get(lab, lab) for lab in labels)

    productions = {}
    for pname, prod in g.productions.items():
        new_name = prods.get(pname, pname)
        productions[new_name] = Production(
            new_name,
            nodes.get(prod.lhs, prod.lhs),
            _rename_graph(prod.daughter, nodes, edges),
            tuple(_rename_instruction(c, nodes, edges) for c in prod.instructions),
        )
    return Grammar(
        name=name or g.name,
        sigma=relabel(g.sigma, nodes),
        delta=relabel(g.delta, nodes),
        gamma=relabel(g.gamma, edges),
        omega=relabel(g.omega, edges),
        productions=productions,
        start=_rename_graph(g.start, nodes, edges),
        control=ctl.rename(g.control, prods),
        generated=g.generated if generated is None else generated,
    )


def prefix_productions(g: Grammar, prefix: str) -> tuple[Grammar, NameMap]:
    names = NameMap(productions={p: f"{prefix}{p}" for p in g.productions})
    return rename_grammar(g, names), names


def rename_apart(g1: Grammar, g2: Grammar) -> tuple[Grammar, Grammar, tuple[NameMap, NameMap]]:
    """Make production names and nonterminals of two grammars disjoint.

    Production names get ``g1_``/``g2_`` prefixes. A nonterminal (node or
    edge) is suffixed with ``#1``/``#2`` when the other grammar uses the same
    label in the same namespace. Terminals stay shared.
    """
    taken = g1.all_labels() | g2.all_labels()
    maps = []
    for idx, (g, other) in enumerate(((g1, g2), (g2, g1)), start=1):
        names = NameMap(productions={p: f"g{idx}_{p}" for p in g.productions})
        for mapping, own_nt, other_labels in (
            (names.node_labels, g.sigma - g.delta, other.sigma),
            (names.edge_labels, g.gamma - g.omega, other.gamma),
        ):
            for lab in sorted(own_nt & other_labels):
                new = f"{lab}#{idx}"
                while new in taken:
                    new += f"#{idx}"
                taken.add(new)
                mapping[lab] = new
        maps.append(names)
    out = []
    for g, names in zip((g1, g2), maps):
        reserved = bool(names.node_labels or names.edge_labels)
        out.append(rename_grammar(g, names, generated=g.generated or reserved))
    return out[0], out[1], (maps[0], maps[1])


def with_control(g: Grammar, control: ControlExpr) -> Grammar:
    return replace(g, control=control)
