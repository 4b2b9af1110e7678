"""Horizon-label grammar: ``prefix? MAIN suffix?`` and two-member mixtures.

A simple label is a run of lowercase modifier letters, exactly one uppercase
main symbol and another run of lowercase letters (``Ah``, ``ilC``, ``rAp``).
A mixture joins two simple labels with one of the transition operators
``+``, ``-`` or ``°``; all of them normalize to ``-``.  The second member of
a mixture is the dominant one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .errors import MalformedLabel, ModifierRuleViolation, UnknownMainSymbol

MIXTURE_OPERATORS = ("+", "-", "°")
CANONICAL_OPERATOR = "-"


@dataclass(frozen=True, order=True)
class SimpleLabel:
    prefix: str
    main: str
    suffix: str = ""

    def __str__(self) -> str:
        return self.prefix + self.main + self.suffix


@dataclass(frozen=True, order=True)
class Mixture:
    first: SimpleLabel
    second: SimpleLabel

    def __str__(self) -> str:
        return f"{self.first}{CANONICAL_OPERATOR}{self.second}"


HorizonLabel = Union[SimpleLabel, Mixture]


@dataclass(frozen=True)
class ModifierRules:
    """Forbidden modifier letters per main symbol.

    ``forbid_prefix["B"] = {"a"}`` rejects any label whose prefix contains
    ``a`` in front of ``B`` (so ``aB`` is invalid).
    """

    forbid_prefix: Mapping[str, frozenset] = None
    forbid_suffix: Mapping[str, frozenset] = None

    @classmethod
    def from_dict(cls, data: Mapping) -> "ModifierRules":
        def conv(table):
            return {k: frozenset(v) for k, v in (table or {}).items()}

        return cls(conv(data.get("forbid_prefix")), conv(data.get("forbid_suffix")))

    def to_dict(self) -> dict:
        return {
            "forbid_prefix": {k: sorted(v) for k, v in sorted((self.forbid_prefix or {}).items())},
            "forbid_suffix": {k: sorted(v) for k, v in sorted((self.forbid_suffix or {}).items())},
        }

    def check(self, label: SimpleLabel) -> None:
        bad = set(label.prefix) & (self.forbid_prefix or {}).get(label.main, frozenset())
        if bad:
            raise ModifierRuleViolation(
                f"prefix modifier(s) {''.join(sorted(bad))!r} not allowed before {label.main!r} in {label}"
            )
        bad = set(label.suffix) & (self.forbid_suffix or {}).get(label.main, frozenset())
        if bad:
            raise ModifierRuleViolation(
                f"suffix modifier(s) {''.join(sorted(bad))!r} not allowed after {label.main!r} in {label}"
            )


def _parse_member(s: str, alphabet: Optional[frozenset], whole: str) -> SimpleLabel:
    if not s:
        raise MalformedLabel(f"empty mixture member in {whole!r}")
    upper = [i for i, c in enumerate(s) if c.isupper()]
    for c in s:
        if not (c.isascii() and c.isalpha()):
            raise MalformedLabel(f"illegal character {c!r} in {whole!r}")
    if not upper:
        raise MalformedLabel(f"no main symbol (uppercase letter) in {s!r}")
    if len(upper) > 1:
        raise MalformedLabel(f"more than one main symbol in {s!r}")
    i = upper[0]
    main = s[i]
    if alphabet is not None and main not in alphabet:
        raise UnknownMainSymbol(f"main symbol {main!r} of {whole!r} is not in the alphabet")
    return SimpleLabel(s[:i], main, s[i + 1:])


def parse_label(
    s: str,
    alphabet: Optional[Iterable[str]] = None,
    rules: Optional[ModifierRules] = None,
) -> HorizonLabel:
    """Parse a label string.

    ``alphabet=None`` accepts any ASCII uppercase letter as main symbol.
    Mixture operators are normalized to ``-``.
    """
    if not isinstance(s, str) or not s:
        raise MalformedLabel("empty label")
    if alphabet is not None and not isinstance(alphabet, frozenset):
        alphabet = frozenset(alphabet)
    ops = [i for i, c in enumerate(s) if c in MIXTURE_OPERATORS]
    if len(ops) > 1:
        raise MalformedLabel(f"more than one mixture operator in {s!r}")
    if ops:
        i = ops[0]
        first = _parse_member(s[:i], alphabet, s)
        second = _parse_member(s[i + 1:], alphabet, s)
        if first.main == second.main:
            raise MalformedLabel(f"mixture members of {s!r} share the main symbol {first.main!r}")
        label: HorizonLabel = Mixture(first, second)
        members = (first, second)
    else:
        label = _parse_member(s, alphabet, s)
        members = (label,)
    if rules is not None:
        for m in members:
            rules.check(m)
    return label


def render_label(h: HorizonLabel) -> str:
    return str(h)


def normalize_label(s: str, alphabet: Optional[Iterable[str]] = None) -> str:
    """Canonical string form of ``s`` (mixture operator rewritten to ``-``)."""
    return render_label(parse_label(s, alphabet))


def main_symbol(h: HorizonLabel) -> str:
    """Main symbol of a label; a mixture counts as its second (dominant) member."""
    if isinstance(h, Mixture):
        return h.second.main
    return h.main


def is_mixture(h: HorizonLabel) -> bool:
    return isinstance(h, Mixture)


def members(h: HorizonLabel) -> tuple:
    if isinstance(h, Mixture):
        return (h.first, h.second)
    return (h,)
