import string

import pytest
from hypothesis import given, settings, strategies as st

from capeval.catalog import KeywordRule, default_catalog
from capeval.errors import ValidationError
from capeval.slicer import instantiate, matches, matches_text, tokenize

from conftest import make_example


# --- character-level reference implementations (independent oracles) ------

def reference_tokenize(text):
    """Char-by-char scan: letters/digits plus in-word apostrophes."""
    text = text.lower()
    tokens, current = [], ""
    for i, ch in enumerate(text):
        if ch.isalnum() and ch != "_":
            current += ch
        elif (
            ch == "'"
            and current
            and i + 1 < len(text)
            and text[i + 1].isalnum()
            and text[i + 1] != "_"
        ):
            current += ch
        else:
            if current:
                tokens.append(current)
            current = ""
    if current:
        tokens.append(current)
    return tokens


def reference_match(rule, tokens):
    """Brute-force scan over all contiguous token windows."""
    for kw in rule.keywords:
        for start in range(len(tokens)):
            window = tokens[start : start + len(kw)]
            if len(window) != len(kw):
                continue
            if len(kw) == 1 and kw[0] == "n't":
                if window[0].endswith("n't"):
                    return True
            elif tuple(window) == kw:
                return True
    return False


# --- tokenize -------------------------------------------------------------

class TestTokenize:
    def test_apostrophe_kept_inside_token(self):
        assert tokenize("I don't like it.") == ["i", "don't", "like", "it"]

    def test_empty(self):
        assert tokenize("") == []

    def test_lowercasing(self):
        assert tokenize("Would HAVE") == ["would", "have"]

    def test_punctuation_splits(self):
        assert tokenize("good,bad;ugly!") == ["good", "bad", "ugly"]

    def test_quotes_stripped(self):
        assert tokenize("'quoted' word") == ["quoted", "word"]

    @given(st.text(alphabet=string.ascii_letters + string.digits + " .,'!?-\n\"", max_size=80))
    def test_agrees_with_reference(self, text):
        assert tokenize(text) == reference_tokenize(text)


# --- matches --------------------------------------------------------------

class TestMatches:
    def test_negation_single_token(self):
        rule = KeywordRule.from_strings(["not", "n't"])
        assert matches_text(rule, "this is not good")

    def test_nt_suffix(self):
        rule = KeywordRule.from_strings(["not", "n't"])
        assert matches_text(rule, "I don't like it")
        assert matches_text(rule, "couldn't be worse")

    def test_modality_phrase(self):
        rule = KeywordRule.from_strings(["would have", "could have", "should have"])
        assert matches_text(rule, "i would have liked it")

    def test_phrase_requires_contiguity(self):
        rule = KeywordRule.from_strings(["would have"])
        assert not matches_text(rule, "would they have liked it")

    def test_token_not_substring(self):
        rule = KeywordRule.from_strings(["not"])
        assert not matches_text(rule, "notable effort")

    def test_no_match(self):
        rule = KeywordRule.from_strings(["refuse"])
        assert not matches_text(rule, "perfectly fine product")


# Random texts mixing filler words, catalog keywords, and near-misses.
_words = st.sampled_from(
    [
        "the", "a", "it", "was", "not", "notable", "n't", "don't", "would",
        "have", "could", "should", "than", "better", "worse", "stop",
        "stopped", "miss", "missed", "really", "so", "at", "all", "kind",
        "of", "but", "though", "never", "none", "very", "much", "item",
    ]
)
_texts = st.lists(_words, max_size=20).map(" ".join)


@settings(max_examples=300)
@given(text=_texts)
def test_matches_agrees_with_brute_force_on_default_catalog(text):
    tokens = tokenize(text)
    for cap in default_catalog().capabilities:
        assert matches(cap.instantiation, tokens) == reference_match(
            cap.instantiation, tokens
        ), (text, cap.name)


# --- instantiate ----------------------------------------------------------

class TestInstantiate:
    def test_negation_coverage_on_toy_set(self):
        examples = [
            make_example("e1", "this is not good"),
            make_example("e2", "i don't like it"),
            make_example("e3", "nice product"),
            make_example("e4", "works fine"),
        ]
        slices = instantiate(default_catalog(), examples)
        negation = next(s for s in slices if s.capability_name == "negation")
        assert negation.member_ids == {"e1", "e2"}
        assert negation.coverage == 0.5

    def test_slices_in_catalog_order(self):
        examples = [make_example("e1", "hello")]
        slices = instantiate(default_catalog(), examples)
        assert [s.capability_name for s in slices] == default_catalog().names()

    def test_empty_slice_has_zero_coverage(self):
        examples = [make_example("e1", "plain words only")]
        slices = instantiate(default_catalog(), examples)
        shifter = next(s for s in slices if s.capability_name == "shifter")
        assert shifter.member_ids == frozenset()
        assert shifter.coverage == 0.0

    def test_empty_example_set_rejected(self):
        with pytest.raises(ValidationError):
            instantiate(default_catalog(), [])

    def test_monotone_membership(self):
        base = [
            make_example("e1", "not great"),
            make_example("e2", "fine"),
        ]
        extended = base + [make_example("e3", "would have been better")]
        for s_before, s_after in zip(
            instantiate(default_catalog(), base),
            instantiate(default_catalog(), extended),
        ):
            assert s_before.member_ids <= s_after.member_ids

    def test_coverage_equals_mean_indicator(self):
        examples = [
            make_example(f"e{i}", text)
            for i, text in enumerate(
                ["not here", "but why", "so good", "plain", "worse than ever"]
            )
        ]
        for s in instantiate(default_catalog(), examples):
            cap = default_catalog()[s.capability_name]
            indicator = [matches_text(cap.instantiation, e.text) for e in examples]
            assert s.coverage == sum(indicator) / len(examples)
