"""Capability catalogs: the machine-readable behavior-specification layer.

A capability names an expected model behavior (e.g. handling negation) and
carries a keyword rule used to instantiate it as a data slice.  Catalogs are
stored as human-editable YAML so they can be diffed and reviewed like any
other shared artifact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, Union

import yaml

from .errors import InputError, ValidationError

CATALOG_VERSION = "1"

_DEFAULT_CATALOG_RESOURCE = "default_catalog.yaml"


@dataclass(frozen=True)
class KeywordRule:
    """Ordered keyword list; each keyword is a lowercase token sequence.

    A single-token keyword like ``("not",)`` matches one token; a phrase like
    ``("would", "have")`` matches a contiguous token run.
    """

    keywords: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.keywords:
            raise ValidationError("keyword rule must contain at least one keyword")
        seen = set()
        for kw in self.keywords:
            if not kw or any(not tok for tok in kw):
                raise ValidationError("keywords must be non-empty after trimming")
            if any(tok != tok.lower() for tok in kw):
                raise ValidationError(f"keyword {' '.join(kw)!r} must be lowercase")
            if kw in seen:
                raise ValidationError(f"duplicate keyword {' '.join(kw)!r} in rule")
            seen.add(kw)

    @classmethod
    def from_strings(cls, keywords: Iterable[str]) -> "KeywordRule":
        """Build a rule from strings; whitespace separates phrase tokens."""
        parsed = tuple(tuple(kw.lower().split()) for kw in keywords)
        return cls(parsed)

    def to_strings(self) -> list[str]:
        return [" ".join(kw) for kw in self.keywords]


@dataclass(frozen=True)
class Capability:
    """A named behavioral specification plus its instantiation rule."""

    name: str
    description: str
    origin: str
    instantiation: KeywordRule

    def __post_init__(self):
        if not self.name.strip():
            raise ValidationError("capability name must be non-empty")


@dataclass(frozen=True)
class Catalog:
    """An immutable, validated collection of capabilities."""

    capabilities: tuple[Capability, ...]
    version: str = CATALOG_VERSION

    def __post_init__(self):
        names = [c.name for c in self.capabilities]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ValidationError(
                f"duplicate capability names: {', '.join(sorted(dupes))}"
            )

    def names(self) -> list[str]:
        return [c.name for c in self.capabilities]

    def __len__(self) -> int:
        return len(self.capabilities)

    def __getitem__(self, name: str) -> Capability:
        for cap in self.capabilities:
            if cap.name == name:
                return cap
        raise KeyError(name)


def _capability_from_mapping(entry: dict, index: int) -> Capability:
    if not isinstance(entry, dict):
        raise InputError(f"capability entry #{index} is not a mapping")
    missing = [k for k in ("name", "keywords") if k not in entry]
    if missing:
        raise InputError(
            f"capability entry #{index} missing field(s): {', '.join(missing)}"
        )
    keywords = entry["keywords"]
    if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
        raise InputError(
            f"capability entry #{index} field 'keywords' must be a list of strings"
        )
    return Capability(
        name=str(entry["name"]),
        description=str(entry.get("description", "")),
        origin=str(entry.get("origin", "")),
        instantiation=KeywordRule.from_strings(keywords),
    )


def parse_catalog(path: Union[str, Path]) -> Catalog:
    """Parse and validate a catalog file.

    Raises InputError for malformed files (with line info where YAML provides
    it) and ValidationError for invariant violations such as duplicate names.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"catalog file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise InputError(f"malformed catalog file {path}: {exc}") from exc
    return _catalog_from_raw(raw, str(path))


def _catalog_from_raw(raw, source: str) -> Catalog:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise InputError(f"{source}: top level must be a mapping")
    version = str(raw.get("version", CATALOG_VERSION))
    entries = raw.get("capabilities", [])
    if entries is None:
        entries = []
    if not isinstance(entries, list):
        raise InputError(f"{source}: 'capabilities' must be a list")
    caps = tuple(
        _capability_from_mapping(entry, i) for i, entry in enumerate(entries)
    )
    return Catalog(capabilities=caps, version=version)


def write_catalog(catalog: Catalog, path: Union[str, Path]) -> None:
    """Serialize a catalog so that parse_catalog round-trips it exactly."""
    doc = {
        "version": catalog.version,
        "capabilities": [
            {
                "name": cap.name,
                "description": cap.description,
                "origin": cap.origin,
                "keywords": cap.instantiation.to_strings(),
            }
            for cap in catalog.capabilities
        ],
    }
    Path(path).write_text(
        yaml.safe_dump(doc, sort_keys=False, allow_unicode=True), encoding="utf-8"
    )


# The eight shipped sentiment capabilities and their slicing keywords.
_DEFAULT_CAPABILITIES: Sequence[tuple[str, str, Sequence[str]]] = (
    ("negation", "handles basic negation", ["not", "n't"]),
    (
        "negation_v2",
        "handles lexical negators",
        ["no", "never", "neither", "nobody", "none", "nor", "nothing"],
    ),
    (
        "shifter",
        "handles polarity-shifting verbs",
        [
            "refuse",
            "reject",
            "deny",
            "doubt",
            "abandon",
            "miss",
            "question",
            "abort",
            "stop",
        ],
    ),
    (
        "modality",
        "handles counterfactual modal constructions",
        ["would have", "could have", "should have"],
    ),
    ("comparative", "handles comparative constructions", ["better", "worse", "than"]),
    (
        "mixed",
        "handles contrastive connectives mixing sentiment",
        [
            "but",
            "however",
            "though",
            "although",
            "despite",
            "even if",
            "rather than",
            "except that",
        ],
    ),
    (
        "reducer",
        "handles intensity-reducing modifiers",
        ["kind of", "all that", "less", "a little", "somewhat", "still"],
    ),
    (
        "amplifier",
        "handles intensity-amplifying modifiers",
        [
            "really",
            "very",
            "super",
            "so",
            "incredibly",
            "extremely",
            "at all",
            "whatsoever",
            "much",
        ],
    ),
)


def default_catalog() -> Catalog:
    """The shipped sentiment catalog: eight capabilities from prior work."""
    caps = tuple(
        Capability(
            name=name,
            description=desc,
            origin="domain knowledge (existing study)",
            instantiation=KeywordRule.from_strings(keywords),
        )
        for name, desc, keywords in _DEFAULT_CAPABILITIES
    )
    return Catalog(capabilities=caps)


def default_catalog_path() -> Path:
    """Filesystem path of the shipped default catalog file."""
    return Path(resources.files("capeval.data") / _DEFAULT_CATALOG_RESOURCE)
