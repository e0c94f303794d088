import pytest

from capeval.catalog import (
    Capability,
    Catalog,
    KeywordRule,
    default_catalog,
    default_catalog_path,
    parse_catalog,
    write_catalog,
)
from capeval.errors import InputError, ValidationError


def test_default_catalog_has_eight_capabilities():
    cat = default_catalog()
    assert len(cat) == 8
    assert cat.names() == [
        "negation",
        "negation_v2",
        "shifter",
        "modality",
        "comparative",
        "mixed",
        "reducer",
        "amplifier",
    ]


def test_default_catalog_negation_keywords():
    rule = default_catalog()["negation"].instantiation
    assert rule.to_strings() == ["not", "n't"]


def test_default_catalog_comparative_keywords():
    rule = default_catalog()["comparative"].instantiation
    assert rule.to_strings() == ["better", "worse", "than"]


def test_default_catalog_modality_is_phrases():
    rule = default_catalog()["modality"].instantiation
    assert rule.keywords == (
        ("would", "have"),
        ("could", "have"),
        ("should", "have"),
    )


def test_shipped_file_matches_programmatic_default():
    assert parse_catalog(default_catalog_path()) == default_catalog()


def test_round_trip(tmp_path):
    cat = default_catalog()
    path = tmp_path / "cat.yaml"
    write_catalog(cat, path)
    assert parse_catalog(path) == cat


def test_round_trip_custom(tmp_path):
    cat = Catalog(
        capabilities=(
            Capability(
                name="sarcasm",
                description="detects sarcastic praise",
                origin="error analysis",
                instantiation=KeywordRule.from_strings(["yeah right", "sure"]),
            ),
        ),
        version="2",
    )
    path = tmp_path / "cat.yaml"
    write_catalog(cat, path)
    assert parse_catalog(path) == cat


def test_empty_catalog_is_valid(tmp_path):
    path = tmp_path / "cat.yaml"
    path.write_text("version: '1'\ncapabilities: []\n")
    assert len(parse_catalog(path)) == 0


def test_duplicate_names_rejected(tmp_path):
    path = tmp_path / "cat.yaml"
    path.write_text(
        "capabilities:\n"
        "- {name: negation, keywords: ['not']}\n"
        "- {name: negation, keywords: ['never']}\n"
    )
    with pytest.raises(ValidationError, match="negation"):
        parse_catalog(path)


def test_empty_keyword_list_rejected(tmp_path):
    path = tmp_path / "cat.yaml"
    path.write_text("capabilities:\n- {name: x, keywords: []}\n")
    with pytest.raises(ValidationError, match="at least one keyword"):
        parse_catalog(path)


def test_malformed_yaml_reports_parse_error(tmp_path):
    path = tmp_path / "cat.yaml"
    path.write_text("capabilities:\n  - name: [unclosed\n")
    with pytest.raises(InputError):
        parse_catalog(path)


def test_missing_field_reports_entry_index(tmp_path):
    path = tmp_path / "cat.yaml"
    path.write_text("capabilities:\n- {name: x}\n")
    with pytest.raises(InputError, match="#0"):
        parse_catalog(path)


def test_missing_file():
    with pytest.raises(InputError, match="not found"):
        parse_catalog("/nonexistent/cat.yaml")


def test_duplicate_keywords_within_rule_rejected():
    with pytest.raises(ValidationError, match="duplicate keyword"):
        KeywordRule.from_strings(["not", "not"])


def test_blank_keyword_rejected():
    with pytest.raises(ValidationError):
        KeywordRule.from_strings(["  "])
