import pytest
from hypothesis import given
from hypothesis import strategies as st

from htk.errors import MalformedLabel, ModifierRuleViolation, UnknownMainSymbol
from htk.grammar import (
    Mixture,
    ModifierRules,
    SimpleLabel,
    main_symbol,
    normalize_label,
    parse_label,
    render_label,
)

ALPHABET = "ABCGHMS"


def S(prefix, main, suffix=""):
    return SimpleLabel(prefix, main, suffix)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("Ah-Bv", Mixture(S("", "A", "h"), S("", "B", "v"))),
        ("A", S("", "A", "")),
        ("ilC+Go", Mixture(S("il", "C", ""), S("", "G", "o"))),
        ("rAp", S("r", "A", "p")),
        ("M°Sw", Mixture(S("", "M"), S("", "S", "w"))),
    ],
)
def test_parse_examples(text, expected):
    assert parse_label(text, ALPHABET) == expected


def test_mixture_operator_rendered_as_dash():
    assert render_label(parse_label("ilC+Go", ALPHABET)) == "ilC-Go"
    assert normalize_label("Al°Bt") == "Al-Bt"


@pytest.mark.parametrize("op", ["+", "-", "°"])
def test_operators_normalize_identically(op):
    assert parse_label(f"Ah{op}Bv") == parse_label("Ah-Bv")


def test_main_symbol():
    assert main_symbol(S("", "A", "h")) == "A"
    assert main_symbol(parse_label("Ah-Bv")) == "B"
    assert main_symbol(parse_label("Sd-Bt")) == "B"


def test_render():
    assert render_label(S("", "B", "v")) == "Bv"
    assert render_label(Mixture(S("", "A", "l"), S("", "B", "t"))) == "Al-Bt"


@pytest.mark.parametrize(
    "bad",
    ["ah", "AB", "Ahv-", "-Bv", "A1", "Ah-Bv-Cv", "Ah Bv", "Ah-Al", ""],
)
def test_malformed(bad):
    with pytest.raises(MalformedLabel):
        parse_label(bad, ALPHABET)


def test_missing_main_symbol_message():
    with pytest.raises(MalformedLabel, match="no main symbol"):
        parse_label("ah")


def test_unknown_main_symbol():
    with pytest.raises(UnknownMainSymbol):
        parse_label("Xh", ALPHABET)
    with pytest.raises(UnknownMainSymbol):
        parse_label("Ah-Xv", ALPHABET)


def test_modifier_rules_only_when_supplied():
    rules = ModifierRules.from_dict({"forbid_prefix": {"B": ["a"]}, "forbid_suffix": {"C": ["h"]}})
    assert parse_label("aB") == S("a", "B")
    with pytest.raises(ModifierRuleViolation):
        parse_label("aB", rules=rules)
    with pytest.raises(ModifierRuleViolation):
        parse_label("Ah-Ch", rules=rules)
    assert parse_label("aA", rules=rules) == S("a", "A")


lower = st.text(alphabet="abcdefghijklmnopqrstuvwxyz", max_size=3)
simple_labels = st.builds(SimpleLabel, lower, st.sampled_from(ALPHABET), lower)


@st.composite
def labels(draw):
    first = draw(simple_labels)
    if draw(st.booleans()):
        return first
    second = draw(simple_labels.filter(lambda s: s.main != first.main))
    return Mixture(first, second)


@given(labels())
def test_round_trip(h):
    assert parse_label(render_label(h), ALPHABET) == h


@given(labels())
def test_mixture_main_is_second_member(h):
    if isinstance(h, Mixture):
        assert main_symbol(h) == main_symbol(h.second)
