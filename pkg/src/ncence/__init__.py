"""Node-replacement graph grammars with regular control and jumping
connection instructions, plus closure constructions over them."""

from .closure import (
    MarkedGrammar,
    chain_concat_grammar,
    disjoint_sum_grammar,
    kleene_sum_grammar,
    prime_marked_control,
    star_concat_grammar,
    union_grammar,
)
from .control import (
    ControlExpr,
    accepts,
    explicit_occurrences,
    parse_control,
    plus_free_normal_form,
    substitute_occurrence,
    words_up_to,
)
from .engine import (
    EnumLimits,
    applicable_nodes,
    apply_production,
    derive_word,
    enumerate_language,
    sample_derivation,
)
from .grammar import (
    Grammar,
    Jumping,
    Production,
    Standard,
    fresh_label,
    parse_grammar_file,
    rename_apart,
    serialize_grammar,
    validate_grammar,
)
from .graph import (
    GraphSet,
    LabeledGraph,
    are_isomorphic,
    build_graph,
    canonical_key,
    chain_join,
    disjoint_sum_graphs,
    star_join,
    to_dot,
    underlying,
)

__version__ = "0.1.0"

__all__ = [
    "ControlExpr",
    "EnumLimits",
    "Grammar",
    "GraphSet",
    "Jumping",
    "LabeledGraph",
    "MarkedGrammar",
    "Production",
    "Standard",
    "accepts",
    "applicable_nodes",
    "apply_production",
    "are_isomorphic",
    "build_graph",
    "canonical_key",
    "chain_concat_grammar",
    "chain_join",
    "derive_word",
    "disjoint_sum_grammar",
    "disjoint_sum_graphs",
    "enumerate_language",
    "explicit_occurrences",
    "fresh_label",
    "kleene_sum_grammar",
    "parse_control",
    "parse_grammar_file",
    "plus_free_normal_form",
    "prime_marked_control",
    "rename_apart",
    "sample_derivation",
    "serialize_grammar",
    "star_concat_grammar",
    "star_join",
    "substitute_occurrence",
    "to_dot",
    "underlying",
    "union_grammar",
    "validate_grammar",
    "words_up_to",
]
