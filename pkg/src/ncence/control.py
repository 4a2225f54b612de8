"""Regular control expressions over production names.

Syntax: names are label tokens, ``.`` concatenates, ``+`` is union, postfix
``*`` is Kleene star, ``eps`` is the empty word, parentheses group.
Precedence is ``*`` over ``.`` over ``+``.

Two independent routes answer membership questions: :func:`accepts` runs a
position (Glushkov) automaton, while :func:`words_up_to` expands the
expression structurally. Tests play them against each other.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union as _U

from .errors import BudgetError, ParseError, StaleHandle

WORD_CAP = 10_000
COMPONENT_CAP = 256


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Symbol:
    name: str


@dataclass(frozen=True)
class Concat:
    children: tuple


@dataclass(frozen=True)
class Union:
    children: tuple


@dataclass(frozen=True)
class Star:
    child: object


ControlExpr = _U[Epsilon, Symbol, Concat, Union, Star]
EPS = Epsilon()
Word = tuple


# ---------------------------------------------------------------------------
# smart constructors


def concat(children: Iterable[ControlExpr]) -> ControlExpr:
    flat: list = []
    for c in children:
        flat.extend(c.children if isinstance(c, Concat) else (c,))
    if not flat:
        return EPS
    return flat[0] if len(flat) == 1 else Concat(tuple(flat))


def union(children: Iterable[ControlExpr]) -> ControlExpr:
    flat: list = []
    for c in children:
        flat.extend(c.children if isinstance(c, Union) else (c,))
    if not flat:
        raise ValueError("union of nothing")
    return flat[0] if len(flat) == 1 else Union(tuple(flat))


def star(child: ControlExpr) -> ControlExpr:
    if isinstance(child, (Star, Epsilon)):
        return child
    return Star(child)


def seq(*parts: ControlExpr) -> ControlExpr:
    """Concatenation that also drops epsilons."""
    return concat(p for p in _flatten_concat(parts) if p != EPS)


def _flatten_concat(parts):
    for p in parts:
        if isinstance(p, Concat):
            yield from p.children
        else:
            yield p


def sym(name: str) -> Symbol:
    return Symbol(name)


# ---------------------------------------------------------------------------
# text form

_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[A-Za-z0-9_#]+)|(?P<op>[.+*()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", column=bad + 1)
        if m.group("name"):
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, message: str):
        tok = self.peek()
        col = tok[2] + 1 if tok else len(self.text.rstrip()) + 1
        raise ParseError(message, column=col)

    def expect(self, value: str):
        tok = self.peek()
        if tok is None or tok[1] != value or tok[0] != "op":
            self.error(f"expected {value!r}")
        self.i += 1

    def parse(self) -> ControlExpr:
        if not self.tokens:
            raise ParseError("empty control expression", column=1)
        expr = self.union()
        if self.peek() is not None:
            self.error(f"unexpected token {self.peek()[1]!r}")
        return expr

    def union(self):
        parts = [self.concat()]
        while self.peek() and self.peek()[1] == "+":
            self.i += 1
            parts.append(self.concat())
        return union(parts)

    def concat(self):
        parts = [self.postfix()]
        while self.peek() and self.peek()[1] == ".":
            self.i += 1
            parts.append(self.postfix())
        return concat(parts)

    def postfix(self):
        expr = self.atom()
        while self.peek() and self.peek()[1] == "*":
            self.i += 1
            expr = star(expr)
        return expr

    def atom(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of expression")
        kind, value, _ = tok
        if kind == "name":
            self.i += 1
            return EPS if value == "eps" else Symbol(value)
        if value == "(":
            self.i += 1
            inner = self.union()
            self.expect(")")
            return inner
        self.error(f"unexpected token {value!r}")


def parse_control(text: str) -> ControlExpr:
    return _Parser(text).parse()


def to_text(expr: ControlExpr) -> str:
    if isinstance(expr, Epsilon):
        return "eps"
    if isinstance(expr, Symbol):
        return expr.name
    if isinstance(expr, Star):
        inner = to_text(expr.child)
        if isinstance(expr.child, (Concat, Union)):
            inner = f"({inner})"
        return inner + "*"
    if isinstance(expr, Concat):
        return " . ".join(
            f"({to_text(c)})" if isinstance(c, Union) else to_text(c) for c in expr.children
        )
    return " + ".join(to_text(c) for c in expr.children)


def symbols(expr: ControlExpr) -> set[str]:
    if isinstance(expr, Symbol):
        return {expr.name}
    if isinstance(expr, Star):
        return symbols(expr.child)
    if isinstance(expr, (Concat, Union)):
        return set().union(*(symbols(c) for c in expr.children))
    return set()


def rename(expr: ControlExpr, mapping: dict[str, str]) -> ControlExpr:
    if isinstance(expr, Symbol):
        return Symbol(mapping.get(expr.name, expr.name))
    if isinstance(expr, Star):
        return Star(rename(expr.child, mapping))
    if isinstance(expr, Concat):
        return Concat(tuple(rename(c, mapping) for c in expr.children))
    if isinstance(expr, Union):
        return Union(tuple(rename(c, mapping) for c in expr.children))
    return expr


# ---------------------------------------------------------------------------
# position automaton


class ControlAutomaton:
    """Deterministic view of the Glushkov automaton of an expression.

    States are frozensets of positions; ``START`` stands for the initial
    state. Only reachable states are ever materialised.
    """

    START = frozenset({-1})

    def __init__(self, expr: ControlExpr):
        self.expr = expr
        self.positions: list[str] = []
        self.follow: dict[int, set[int]] = {}
        nullable, first, last = self._walk(expr)
        self.nullable = nullable
        self.first = first
        self.last = last
        self._steps: dict = {}
        self._distance: dict | None = None

    def _walk(self, e):
        if isinstance(e, Epsilon):
            return True, set(), set()
        if isinstance(e, Symbol):
            p = len(self.positions)
            self.positions.append(e.name)
            self.follow[p] = set()
            return False, {p}, {p}
        if isinstance(e, Star):
            _, first, last = self._walk(e.child)
            for p in last:
                self.follow[p] |= first
            return True, first, last
        if isinstance(e, Union):
            nullable, first, last = False, set(), set()
            for c in e.children:
                n, f, l = self._walk(c)
                nullable |= n
                first |= f
                last |= l
            return nullable, first, last
        # Concat
        nullable, first, last = True, set(), set()
        for c in e.children:
            n, f, l = self._walk(c)
            for p in last:
                self.follow[p] |= f
            if nullable:
                first |= f
            last = (last | l) if n else set(l)
            nullable &= n
        return nullable, first, last

    def is_accepting(self, state: frozenset) -> bool:
        if state == self.START:
            return self.nullable
        return bool(state & self.last)

    def _successors(self, state: frozenset) -> dict[str, frozenset]:
        if state not in self._steps:
            reach = self.first if state == self.START else set().union(
                *(self.follow[p] for p in state)
            )
            out: dict[str, set[int]] = {}
            for p in reach:
                out.setdefault(self.positions[p], set()).add(p)
            self._steps[state] = {name: frozenset(ps) for name, ps in out.items()}
        return self._steps[state]

    def step(self, state: frozenset, name: str) -> frozenset | None:
        return self._successors(state).get(name)

    def enabled(self, state: frozenset) -> list[str]:
        return sorted(self._successors(state))

    def distance_to_accept(self, state: frozenset) -> float:
        """Fewest further symbols needed to reach acceptance (inf if none)."""
        if self._distance is None:
            states = [self.START]
            seen = {self.START}
            edges: dict = {}
            while states:
                s = states.pop()
                edges[s] = list(self._successors(s).values())
                for t in edges[s]:
                    if t not in seen:
                        seen.add(t)
                        states.append(t)
            dist = {s: (0 if self.is_accepting(s) else float("inf")) for s in seen}
            changed = True
            while changed:
                changed = False
                for s, targets in edges.items():
                    best = min((dist[t] + 1 for t in targets), default=float("inf"))
                    if best < dist[s]:
                        dist[s] = best
                        changed = True
            self._distance = dist
        return self._distance.get(state, float("inf"))


@functools.lru_cache(maxsize=256)
def automaton(expr: ControlExpr) -> ControlAutomaton:
    return ControlAutomaton(expr)


def accepts(expr: ControlExpr, word: Sequence[str]) -> bool:
    auto = automaton(expr)
    state = auto.START
    for name in word:
        state = auto.step(state, name)
        if state is None:
            return False
    return auto.is_accepting(state)


# ---------------------------------------------------------------------------
# bounded word enumeration by structural expansion


def words_up_to(expr: ControlExpr, max_len: int, cap: int = WORD_CAP) -> set[Word]:
    if max_len < 0:
        raise ValueError("max_len must be non-negative")

    def check(words: set) -> set:
        if len(words) > cap:
            raise BudgetError(f"more than {cap} control words of length <= {max_len}")
        return words

    def product(left: set, right: set) -> set:
        return check({a + b for a in left for b in right if len(a) + len(b) <= max_len})

    def lang(e) -> set:
        if isinstance(e, Epsilon):
            return {()}
        if isinstance(e, Symbol):
            return {(e.name,)} if max_len >= 1 else set()
        if isinstance(e, Union):
            return check(set().union(*(lang(c) for c in e.children)))
        if isinstance(e, Concat):
            acc = {()}
            for c in e.children:
                acc = product(acc, lang(c))
            return acc
        base = lang(e.child) - {()}
        acc = {()}
        frontier = {()}
        while frontier:
            frontier = product(frontier, base) - acc
            acc = check(acc | frontier)
        return acc

    return lang(expr)


# ---------------------------------------------------------------------------
# plus-free normal form


def _dedup(items: Iterable) -> list:
    return list(dict.fromkeys(items))


def _star_of(pieces: Sequence[ControlExpr]) -> ControlExpr:
    """A union-free expression for ``(p1 + ... + pn)*``."""
    pieces = _dedup(p for p in pieces if p != EPS)
    if not pieces:
        return EPS
    if len(pieces) == 1:
        return star(pieces[0])
    head, rest = pieces[0], pieces[1:]
    # (x + y)* = (x* y)* x*
    inner = _star_of([seq(star(head), r) for r in rest])
    return seq(inner, star(head))


def _product(groups: Sequence[list], cap: int) -> list:
    out: list = [EPS]
    for group in groups:
        out = _dedup(seq(a, b) for a in out for b in group)
        if len(out) > cap:
            raise BudgetError(f"more than {cap} plus-free components")
    return out


def _union_free_pieces(e, cap: int) -> list:
    if isinstance(e, (Epsilon, Symbol)):
        return [e]
    if isinstance(e, Union):
        return _dedup(p for c in e.children for p in _union_free_pieces(c, cap))
    if isinstance(e, Concat):
        return _product([_union_free_pieces(c, cap) for c in e.children], cap)
    return [_star_of(_union_free_pieces(e.child, cap))]


def plus_free_normal_form(expr: ControlExpr, cap: int = COMPONENT_CAP) -> list[ControlExpr]:
    """Split ``expr`` into union-free components whose languages cover it.

    Every starred block ``x*`` is unfolded once into ``x* x + eps`` so that
    its final iteration appears outside any star.
    """

    def nf(e) -> list:
        if isinstance(e, (Epsilon, Symbol)):
            return [e]
        if isinstance(e, Union):
            out = _dedup(c for child in e.children for c in nf(child))
        elif isinstance(e, Concat):
            out = _product([nf(c) for c in e.children], cap)
        else:
            looped = _star_of(_union_free_pieces(e.child, cap))
            if looped == EPS:
                return [EPS]
            out = _dedup([seq(looped, c) for c in nf(e.child) if c != EPS] + [EPS])
        if len(out) > cap:
            raise BudgetError(f"more than {cap} plus-free components")
        return out

    return nf(expr)


def is_union_free(expr: ControlExpr) -> bool:
    if isinstance(expr, Union):
        return False
    if isinstance(expr, Star):
        return is_union_free(expr.child)
    if isinstance(expr, Concat):
        return all(is_union_free(c) for c in expr.children)
    return True


@dataclass(frozen=True)
class Occurrence:
    """A symbol occurrence: ``index`` counts symbol leaves left to right."""

    name: str
    index: int

    def __str__(self) -> str:
        return f"{self.name}@{self.index}"


def _leaves(expr, in_star=False):
    if isinstance(expr, Symbol):
        yield expr.name, in_star
    elif isinstance(expr, Star):
        yield from _leaves(expr.child, True)
    elif isinstance(expr, (Concat, Union)):
        for c in expr.children:
            yield from _leaves(c, in_star)


def explicit_occurrences(seq_expr: ControlExpr) -> list[Occurrence]:
    """Occurrences outside every star, i.e. those executed exactly once."""
    if not is_union_free(seq_expr):
        raise ValueError("explicit_occurrences needs a union-free expression")
    return [
        Occurrence(name, i)
        for i, (name, starred) in enumerate(_leaves(seq_expr))
        if not starred
    ]


def substitute_occurrence(seq_expr: ControlExpr, handle: Occurrence, new_name: str) -> ControlExpr:
    counter = itertools.count()
    hit = []

    def walk(e, in_star):
        if isinstance(e, Symbol):
            i = next(counter)
            if i == handle.index:
                if e.name != handle.name or in_star:
                    raise StaleHandle(f"{handle} does not name an explicit occurrence")
                hit.append(i)
                return Symbol(new_name)
            return e
        if isinstance(e, Star):
            return Star(walk(e.child, True))
        if isinstance(e, Concat):
            return Concat(tuple(walk(c, in_star) for c in e.children))
        if isinstance(e, Union):
            return Union(tuple(walk(c, in_star) for c in e.children))
        return e

    out = walk(seq_expr, False)
    if not hit:
        raise StaleHandle(f"{handle} is out of range")
    return out
