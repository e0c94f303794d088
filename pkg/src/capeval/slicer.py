"""Instantiating capabilities as keyword slices over example sets.

Matching is token-level and case-insensitive: a single-token keyword must
equal a token exactly (so "not" never matches inside "notable"), a phrase
must appear as a contiguous token run, and the special keyword "n't" matches
any token ending in "n't" (contractions survive tokenization whole because
the apostrophe stays inside tokens).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .catalog import Catalog, KeywordRule
from .corpus import Example
from .errors import ValidationError

# Word characters and in-word apostrophes; everything else separates tokens.
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")

_NT_SUFFIX = "n't"


@dataclass(frozen=True)
class Slice:
    """Membership of one capability's test suite within an example set."""

    capability_name: str
    member_ids: frozenset[str]
    coverage: float


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace/punctuation, keeping apostrophes."""
    return _TOKEN_RE.findall(text.lower())


def _keyword_matches_at(keyword: tuple[str, ...], tokens: Sequence[str], i: int) -> bool:
    if len(keyword) == 1:
        kw = keyword[0]
        if kw == _NT_SUFFIX:
            return tokens[i].endswith(_NT_SUFFIX)
        return tokens[i] == kw
    if i + len(keyword) > len(tokens):
        return False
    return all(tokens[i + j] == keyword[j] for j in range(len(keyword)))


def matches(rule: KeywordRule, tokens: Sequence[str]) -> bool:
    """True iff any keyword of the rule occurs in the token sequence."""
    for keyword in rule.keywords:
        for i in range(len(tokens) - len(keyword) + 1):
            if _keyword_matches_at(keyword, tokens, i):
                return True
    return False


def matches_text(rule: KeywordRule, text: str) -> bool:
    return matches(rule, tokenize(text))


def instantiate(catalog: Catalog, examples: Sequence[Example]) -> list[Slice]:
    """Slice the examples on every capability of the catalog, in order.

    Slices may overlap.  Coverage is member count over the total example
    count, computed exactly.
    """
    if not examples:
        raise ValidationError("cannot instantiate capabilities over an empty example set")
    token_cache = [tokenize(e.text) for e in examples]
    slices = []
    for cap in catalog.capabilities:
        members = frozenset(
            e.id
            for e, toks in zip(examples, token_cache)
            if matches(cap.instantiation, toks)
        )
        slices.append(
            Slice(
                capability_name=cap.name,
                member_ids=members,
                coverage=len(members) / len(examples),
            )
        )
    return slices
