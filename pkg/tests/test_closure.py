from dataclasses import replace

import pytest

from ncence.closure import (
    chain_concat_grammar,
    disjoint_sum_grammar,
    kleene_sum_grammar,
    prime_marked_control,
    star_concat_grammar,
    union_grammar,
)
from ncence.control import Symbol, parse_control, words_up_to
from ncence.engine import EnumLimits, derive_word, enumerate_language
from ncence.errors import NoTerminalProduction
from ncence.grammar import Jumping, Standard, parse_grammar_file, serialize_grammar, validate_grammar, with_control
from ncence.graph import EMPTY_GRAPH, are_isomorphic, build_graph, canonical_key, single_node, underlying
from oracles import components, key_set, label_counts, load_sample, path_graph, underlying_keys

SMALL = EnumLimits(max_word_len=4)


def all_constructions(paths, stars):
    return {
        "union": union_grammar(paths, stars),
        "dsum": disjoint_sum_grammar(paths, paths),
        "ksum": kleene_sum_grammar(paths),
        "chain": chain_concat_grammar(paths, stars),
        "star": star_concat_grammar(stars),
    }


def test_outputs_valid_and_round_trip(paths, stars):
    for name, g in all_constructions(paths, stars).items():
        assert validate_grammar(g) == [], name
        assert g.generated
        text = serialize_grammar(g)
        assert parse_grammar_file(text) == g
        fresh = (g.sigma | g.gamma) - (paths.sigma | paths.gamma | stars.sigma | stars.gamma)
        assert all("#" in lab for lab in fresh), (name, fresh)
        for prod in g.productions:
            assert prod.startswith(("g1_", "g2_", "#")), (name, prod)


def test_union_examples(paths, stars):
    u = union_grammar(paths, stars)
    assert key_set(enumerate_language(u, EnumLimits(max_word_len=5))) == key_set(
        enumerate_language(paths, SMALL)
    ) | key_set(enumerate_language(stars, SMALL))
    twice = union_grammar(paths, paths)
    for k in (3, 5):
        assert key_set(enumerate_language(twice, EnumLimits(max_word_len=k + 1))) == key_set(
            enumerate_language(paths, EnumLimits(max_word_len=k))
        )
    n = len(words_up_to(u.control, 5))
    assert n == len(words_up_to(paths.control, 4)) + len(words_up_to(stars.control, 4))
    assert {p.instructions for p in u.productions.values() if p.name.startswith("#")} == {()}


def test_disjoint_sum_examples(paths):
    d = disjoint_sum_grammar(paths, paths)
    factors = list(enumerate_language(paths, EnumLimits(max_word_len=3)))
    sizes = {len(x) + len(y) for x in factors for y in factors}
    for g in enumerate_language(d, EnumLimits(max_word_len=5)):
        parts = components(g)
        assert len(parts) == 2
        assert len(g) in sizes
        assert all(are_isomorphic(p, path_graph(len(p))) for p in parts)


def test_kleene_sum_examples(paths):
    k = kleene_sum_grammar(paths)
    got = enumerate_language(k, EnumLimits(max_word_len=7, max_nodes=10))
    assert canonical_key(EMPTY_GRAPH) in set(got.keys())
    factor_keys = underlying_keys(enumerate_language(paths, EnumLimits(max_word_len=6)))
    for g in got:
        for part in components(g):
            assert canonical_key(underlying(part)) in factor_keys
    assert derive_word(k.start, k, ["#p02"], SMALL).keys() == [canonical_key(EMPTY_GRAPH)]


def test_prime_marked_control_paths(paths):
    m = prime_marked_control(paths, "x")
    assert m.marker == "#x1" and m.marker not in paths.all_labels()
    assert m.primed_names == {"p2": "p2#x1"}
    primed = m.grammar.productions["p2#x1"]
    assert dict(primed.daughter.nodes) == {0: "#x1"}
    assert set(primed.instructions) == {Standard("a", "e", "e", 0), Standard("#x1", "e", "e", 0)}
    assert m.marked_control == parse_control("p1* . p1 . p2#x1 + p2#x1")
    assert {"#x1"} <= m.grammar.delta and {"#x1"} <= m.grammar.sigma


def test_prime_single_symbol_control(stars):
    g = with_control(stars, parse_control("q2"))
    m = prime_marked_control(g, "x")
    assert m.marked_control == Symbol("q2#x1")
    assert len(m.grammar.productions["q2#x1"].instructions) >= len(g.productions["q2"].instructions)


def test_prime_only_adds_instructions(twocolor):
    m = prime_marked_control(twocolor, "x")
    for original, primed in m.primed_names.items():
        before, after = twocolor.productions[original], m.grammar.productions[primed]
        assert set(before.instructions) <= set(after.instructions)
        changed = [n for n in before.daughter.nodes if before.daughter.label(n) != after.daughter.label(n)]
        assert len(changed) == 1
        assert after.daughter.edges == before.daughter.edges


@pytest.mark.parametrize("name", ["paths", "stars", "twocolor"])
def test_marked_control_erases_to_original(name):
    g = load_sample(name)
    m = prime_marked_control(g, "x")
    back = {v: k for k, v in m.primed_names.items()}
    marked = words_up_to(m.marked_control, 7)
    erased = {tuple(back.get(s, s) for s in w) for w in marked}
    assert erased == words_up_to(g.control, 7)
    assert len(erased) == len(marked)


def test_prime_jumping_duplicates_every_slot_choice(paths):
    prods = dict(paths.productions)
    p2 = prods["p2"]
    prods["p2"] = replace(p2, instructions=p2.instructions + (Jumping("a", "e", "a"),))
    m = prime_marked_control(replace(paths, productions=prods), "x")
    jumps = {i for i in m.grammar.productions["p2#x1"].instructions if isinstance(i, Jumping)}
    assert jumps == {
        Jumping("a", "e", "a"),
        Jumping("#x1", "e", "a"),
        Jumping("a", "e", "#x1"),
        Jumping("#x1", "e", "#x1"),
    }


def test_no_terminal_production(paths):
    m = prime_marked_control(with_control(paths, parse_control("p1")), "x")
    assert m.primed_names == {"p1": "p1#x1"}
    prods = dict(paths.productions)
    prods["pz"] = replace(prods["p2"], name="pz", daughter=single_node("A"), instructions=())
    bad = replace(paths, productions=prods, control=parse_control("pz + p2"))
    with pytest.raises(NoTerminalProduction) as info:
        prime_marked_control(bad, "x")
    assert info.value.components == ["pz"]


def test_chain_examples(paths):
    c = chain_concat_grammar(paths, paths)
    smallest = derive_word(c.start, c, ["#p01", "g1_p2#x1", "g2_p2#y1"], SMALL)
    assert key_set(smallest) == key_set([build_graph([(0, "#x1"), (1, "#y1")], [(0, 1, "#alpha1")])])
    got = enumerate_language(c, EnumLimits(max_word_len=6))
    assert len(got) > 0
    for g in got:
        counts = label_counts(g)
        assert counts["#x1"] == counts["#y1"] == 1
        x = next(n for n, lab in g.nodes.items() if lab == "#x1")
        assert ("#alpha1" in {lab for w, lab in g.neighbors(x) if g.label(w) == "#y1"})
        assert are_isomorphic(underlying(g), underlying(path_graph(len(g))))


def test_star_examples(paths):
    s = star_concat_grammar(paths)
    zero = derive_word(s.start, s, ["#p02"], SMALL)
    assert key_set(zero) == key_set([single_node("#c1")])
    for g in enumerate_language(s, EnumLimits(max_word_len=7, max_nodes=10)):
        counts = label_counts(g)
        assert counts["#c1"] == 1
        c = next(n for n, lab in g.nodes.items() if lab == "#c1")
        assert g.degree(c) == counts["#x1"]


def test_inputs_with_clashing_fresh_names(paths):
    taken = parse_grammar_file(
        serialize_grammar(paths)
        .replace("grammar PATHS", "grammar PATHS generated")
        .replace("node_labels: A, a", "node_labels: #S1, #x1, A, a")
    )
    c = chain_concat_grammar(taken, taken)
    assert validate_grammar(c) == []
    # the input's own #S1 and #x1 are nonterminals and get renamed apart
    assert {"#S1#1", "#x1#1", "#x1#2"} <= c.sigma
    clean = chain_concat_grammar(paths, paths)
    limits = EnumLimits(max_word_len=6)
    assert underlying_keys(enumerate_language(c, limits)) == underlying_keys(enumerate_language(clean, limits))
