"""Object-class vocabulary: canonical names, synonyms, and per-class traits.

The dataset file carries (name, synonyms) pairs; physical traits (what a class
can do in the simulator) ship with the package in ``data/class_traits.json``
so scenes and datasets stay lean.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable


@dataclass(frozen=True)
class ObjectClass:
    """A canonical object class name plus accepted surface synonyms."""

    name: str
    synonyms: tuple[str, ...] = ()


@dataclass(frozen=True)
class ClassTraits:
    """Physical capabilities of a class inside the simulator."""

    pickupable: bool = True
    receptacle: bool = False
    openable: bool = False
    toggleable: bool = False
    sliceable: bool = False
    blocks: bool = False       # occupies its cell for navigation
    cleans: bool = False       # toggling it washes contained objects
    heats: bool = False        # toggling it (closed) heats contained objects
    cools: bool = False        # containment for >=1 step chills objects
    light: bool = False        # counts as a light source for Examine
    cuts: bool = False         # held instance enables SliceObject


DEFAULT_TRAITS = ClassTraits()


def _fold(text: str) -> str:
    return text.strip().lower().replace(" ", "").replace("_", "")


class Vocabulary:
    """Lookup table over object classes with synonym canonicalization."""

    def __init__(self, classes: Iterable[ObjectClass], traits: dict[str, ClassTraits] | None = None):
        self.classes = list(classes)
        self._by_name = {c.name: c for c in self.classes}
        if len(self._by_name) != len(self.classes):
            raise ValueError("duplicate canonical class names")
        self._canonical: dict[str, str] = {}
        for cls in self.classes:
            for surface in (cls.name, *cls.synonyms):
                key = _fold(surface)
                owner = self._canonical.get(key)
                if owner is not None and owner != cls.name:
                    raise ValueError(f"synonym {surface!r} claimed by both {owner} and {cls.name}")
                self._canonical[key] = cls.name
        self._traits = dict(traits or {})

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self.classes)

    def names(self) -> list[str]:
        return sorted(self._by_name)

    def resolve(self, surface: str) -> tuple[str, bool]:
        """Canonicalize a surface string.

        Returns ``(canonical_name, True)`` on an exact or synonym match, else
        the input verbatim with ``False`` (an ungrounded name; replanning's
        problem, not the parser's).
        """
        canonical = self._canonical.get(_fold(surface))
        if canonical is None:
            return surface.strip(), False
        return canonical, True

    def traits(self, name: str) -> ClassTraits:
        return self._traits.get(name, DEFAULT_TRAITS)

    def blocking_classes(self) -> frozenset[str]:
        return frozenset(n for n in self._by_name if self.traits(n).blocks)


def load_class_traits() -> dict[str, dict]:
    """Raw class table bundled with the package (traits plus synonyms)."""
    text = resources.files("gridhouse.data").joinpath("class_traits.json").read_text("utf-8")
    return json.loads(text)


def default_vocabulary() -> Vocabulary:
    """Vocabulary built from the bundled class table."""
    table = load_class_traits()
    return vocabulary_from_table(table)


def vocabulary_from_table(table: dict[str, dict]) -> Vocabulary:
    classes = []
    traits = {}
    for name in sorted(table):
        entry = table[name]
        classes.append(ObjectClass(name=name, synonyms=tuple(entry.get("synonyms", ()))))
        trait_kwargs = {k: v for k, v in entry.items() if k != "synonyms"}
        traits[name] = ClassTraits(**trait_kwargs)
    return Vocabulary(classes, traits)


def vocabulary_from_pairs(pairs: Iterable[dict], traits: dict[str, ClassTraits] | None = None) -> Vocabulary:
    """Vocabulary from dataset-file entries ``{"name": ..., "synonyms": [...]}``.

    Traits default to the bundled class table for known names.
    """
    classes = [ObjectClass(name=p["name"], synonyms=tuple(p.get("synonyms", ()))) for p in pairs]
    if traits is None:
        table = load_class_traits()
        traits = {}
        for cls in classes:
            entry = table.get(cls.name)
            if entry is not None:
                traits[cls.name] = ClassTraits(**{k: v for k, v in entry.items() if k != "synonyms"})
    return Vocabulary(classes, traits)
