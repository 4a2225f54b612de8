import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncence.control import (
    EPS,
    Concat,
    Epsilon,
    Occurrence,
    Star,
    Symbol,
    Union,
    accepts,
    explicit_occurrences,
    is_union_free,
    parse_control,
    plus_free_normal_form,
    substitute_occurrence,
    to_text,
    words_up_to,
)
from ncence.errors import BudgetError, ParseError, StaleHandle
from oracles import CONTROL_CORPUS, all_words

p1, p2, p3 = Symbol("p1"), Symbol("p2"), Symbol("p3")
STAR_P1_P2 = Concat((Star(p1), p2))


def test_parse_examples():
    expr = parse_control("(p01.p1*.p2)+(p02.q1)")
    assert expr == Union(
        (
            Concat((Symbol("p01"), Star(p1), p2)),
            Concat((Symbol("p02"), Symbol("q1"))),
        )
    )
    assert parse_control("eps") == EPS
    assert parse_control("p1**") == Star(p1)
    assert parse_control("p1 . (p2 . p3)") == Concat((p1, p2, p3))
    assert parse_control("p1 + (p2 + p3)") == Union((p1, p2, p3))


def test_precedence():
    assert parse_control("p1 + p2 . p3*") == Union((p1, Concat((p2, Star(p3)))))


@pytest.mark.parametrize("text, column", [("", 1), ("p1 .", 5), ("(p1", 4), ("p1 ) p2", 4), ("p1 $", 4), ("+p1", 1)])
def test_parse_errors_report_position(text, column):
    with pytest.raises(ParseError) as info:
        parse_control(text)
    assert info.value.column == column


@pytest.mark.parametrize("text", CONTROL_CORPUS)
def test_text_round_trip(text):
    expr = parse_control(text)
    assert parse_control(to_text(expr)) == expr


def test_accepts_examples():
    assert accepts(STAR_P1_P2, ["p2"])
    assert accepts(STAR_P1_P2, ["p1", "p1", "p2"])
    assert not accepts(STAR_P1_P2, ["p1"])
    assert accepts(EPS, [])
    assert not accepts(EPS, ["p1"])


def test_words_up_to_examples():
    assert words_up_to(STAR_P1_P2, 3) == {("p2",), ("p1", "p2"), ("p1", "p1", "p2")}
    assert words_up_to(EPS, 5) == {()}
    assert words_up_to(Union((p1, p2)), 1) == {("p1",), ("p2",)}
    assert words_up_to(p1, 0) == set()


def test_words_up_to_budget():
    with pytest.raises(BudgetError):
        words_up_to(parse_control("(p1 + p2 + p3)*"), 9, cap=1000)


@pytest.mark.parametrize("text", CONTROL_CORPUS)
def test_accepts_matches_enumeration(text):
    expr = parse_control(text)
    words = words_up_to(expr, 6)
    alphabet = {"p1", "p2", "p3", "zz"}
    for w in all_words(alphabet, 5):
        assert accepts(expr, w) == (w in words), w


def test_plus_free_examples():
    assert plus_free_normal_form(STAR_P1_P2) == [Concat((Star(p1), p1, p2)), p2]
    assert plus_free_normal_form(parse_control("(p1+p2).p3")) == [Concat((p1, p3)), Concat((p2, p3))]
    assert plus_free_normal_form(p1) == [p1]
    assert plus_free_normal_form(EPS) == [EPS]


@pytest.mark.parametrize("text", CONTROL_CORPUS)
def test_plus_free_preserves_language(text):
    expr = parse_control(text)
    comps = plus_free_normal_form(expr)
    assert len(comps) == len(set(comps))
    union = set()
    for c in comps:
        assert is_union_free(c)
        assert isinstance(c, Epsilon) or explicit_occurrences(c)
        union |= words_up_to(c, 8)
    assert union == words_up_to(expr, 8)


def test_plus_free_budget():
    with pytest.raises(BudgetError):
        plus_free_normal_form(parse_control("(p1+p2).(p1+p2).(p1+p2).(p1+p2)"), cap=8)


def test_explicit_occurrences():
    comp = Concat((Star(p1), p1, p2))
    assert explicit_occurrences(comp) == [Occurrence("p1", 1), Occurrence("p2", 2)]
    assert [str(h) for h in explicit_occurrences(Concat((p1, p2, p1)))] == ["p1@0", "p2@1", "p1@2"]
    assert explicit_occurrences(Star(p1)) == []
    with pytest.raises(ValueError):
        explicit_occurrences(Union((p1, p2)))


def test_substitute_occurrence():
    comp = Concat((Star(p1), p1, p2))
    primed = substitute_occurrence(comp, Occurrence("p1", 1), "p1x")
    assert primed == Concat((Star(p1), Symbol("p1x"), p2))
    assert substitute_occurrence(p1, Occurrence("p1", 0), "q") == Symbol("q")
    back = substitute_occurrence(primed, Occurrence("p1x", 1), "p1")
    assert back == comp


@pytest.mark.parametrize("handle", [Occurrence("p1", 0), Occurrence("p2", 1), Occurrence("p1", 9)])
def test_substitute_stale_handle(handle):
    with pytest.raises(StaleHandle):
        substitute_occurrence(Concat((Star(p1), p1, p2)), handle, "q")


# random expressions for the property check
names = st.sampled_from(["p1", "p2", "p3"])
exprs = st.recursive(
    st.one_of(names.map(Symbol), st.just(EPS)),
    lambda inner: st.one_of(
        st.lists(inner, min_size=2, max_size=3).map(lambda cs: Concat(tuple(cs))),
        st.lists(inner, min_size=2, max_size=3).map(lambda cs: Union(tuple(cs))),
        inner.map(Star),
    ),
    max_leaves=6,
)


@settings(max_examples=80, deadline=None)
@given(exprs)
def test_random_expressions(expr):
    words = words_up_to(expr, 5)
    for w in all_words({"p1", "p2", "p3"}, 4):
        assert accepts(expr, w) == (w in words)
    covered = set()
    for c in plus_free_normal_form(expr):
        assert is_union_free(c)
        covered |= words_up_to(c, 5)
    assert covered == words
