"""Subgoal-triplet plans: the (action, object, receptacle) grammar and its parser.

A plan is serialized one triplet per line, ``(Action, Object, Receptacle)``,
with the literal ``None`` for an absent receptacle. The parser is the tolerant
front-end for raw LLM output: it extracts every well-formed triplet line,
canonicalizes synonyms, and flags unknown class names as ungrounded instead of
rejecting them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum

from .actions import RECEPTACLE_OPTIONAL, HighLevelAction, resolve_verb
from .vocab import Vocabulary

MAX_PLAN_LENGTH = 20


class PlanError(Exception):
    pass


class EmptyPlan(PlanError):
    """No triplet line could be parsed from the text."""


class InvalidTriplet(PlanError):
    """A directly constructed triplet violates the grammar."""


class PlanOrigin(Enum):
    INITIAL = "Initial"
    REPLANNED = "Replanned"


@dataclass(frozen=True)
class SubgoalTriplet:
    """One subgoal: a verb, its target object class, and an optional receptacle.

    ``object_grounded`` / ``receptacle_grounded`` record whether the class name
    was found in the vocabulary at parse time.
    """

    action: HighLevelAction
    object: str
    receptacle: str | None = None
    object_grounded: bool = True
    receptacle_grounded: bool = True

    def __post_init__(self):
        if not self.object:
            raise InvalidTriplet("triplet object must not be empty")
        if self.receptacle is None and self.action not in RECEPTACLE_OPTIONAL:
            raise InvalidTriplet(f"{self.action.value} requires a receptacle")

    def slots(self) -> tuple[str, str, str | None]:
        return (self.action.value, self.object, self.receptacle)


@dataclass(frozen=True)
class Plan:
    subgoals: tuple[SubgoalTriplet, ...]
    origin: PlanOrigin = PlanOrigin.INITIAL

    def __post_init__(self):
        if not self.subgoals:
            raise EmptyPlan("a plan must contain at least one subgoal")
        if len(self.subgoals) > MAX_PLAN_LENGTH:
            raise InvalidTriplet(f"plan exceeds the {MAX_PLAN_LENGTH}-subgoal cap")

    def __len__(self) -> int:
        return len(self.subgoals)

    def ungrounded(self) -> list[tuple[int, str]]:
        """(subgoal index, slot name) pairs whose class is not in the vocabulary."""
        out = []
        for i, sg in enumerate(self.subgoals):
            if not sg.object_grounded:
                out.append((i, "object"))
            if sg.receptacle is not None and not sg.receptacle_grounded:
                out.append((i, "receptacle"))
        return out


def serialize_plan(plan: Plan) -> str:
    """Canonical text form, one ``(Action, Object, Receptacle)`` line per subgoal."""
    lines = []
    for sg in plan.subgoals:
        recep = "None" if sg.receptacle is None else sg.receptacle
        lines.append(f"({sg.action.value}, {sg.object}, {recep})")
    return "\n".join(lines)


@dataclass
class ParseResult:
    plan: Plan
    malformed_lines: int = 0


# A parenthesized, comma-separated group of 2 or 3 fields.
_TRIPLET_RE = re.compile(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*(?:,\s*([^,()]+?)\s*)?\)")
_NONE_WORDS = frozenset({"none", "null", "nothing", "-", ""})


def parse_plan(text: str, vocabulary: Vocabulary) -> ParseResult:
    """Extract a Plan from raw text.

    Lines without a parenthesized group are chatter and skipped silently.
    Triplet-shaped groups that fail to parse (unknown verb, missing required
    receptacle) are skipped and counted as malformed. Raises EmptyPlan when
    nothing parses. Subgoals beyond the plan-length cap are dropped and
    counted as malformed.
    """
    subgoals: list[SubgoalTriplet] = []
    malformed = 0
    for line in text.splitlines():
        match = _TRIPLET_RE.search(line)
        if match is None:
            continue
        verb_text, object_text, recep_text = match.groups()
        action = resolve_verb(verb_text)
        if action is None:
            malformed += 1
            continue
        object_name, object_ok = vocabulary.resolve(object_text)
        receptacle: str | None
        receptacle_ok = True
        if recep_text is None or recep_text.strip().lower() in _NONE_WORDS:
            receptacle = None
            if action not in RECEPTACLE_OPTIONAL:
                malformed += 1
                continue
        else:
            receptacle, receptacle_ok = vocabulary.resolve(recep_text)
        if len(subgoals) >= MAX_PLAN_LENGTH:
            malformed += 1
            continue
        subgoals.append(
            SubgoalTriplet(
                action=action,
                object=object_name,
                receptacle=receptacle,
                object_grounded=object_ok,
                receptacle_grounded=receptacle_ok,
            )
        )
    if not subgoals:
        raise EmptyPlan("no triplet line found in LLM output")
    return ParseResult(plan=Plan(subgoals=tuple(subgoals)), malformed_lines=malformed)


def plan_from_slots(rows: list[list], vocabulary: Vocabulary | None = None,
                    origin: PlanOrigin = PlanOrigin.INITIAL) -> Plan:
    """Build a Plan from ``[action, object, receptacle-or-null]`` rows (dataset form)."""
    subgoals = []
    for action_name, object_name, receptacle in rows:
        action = resolve_verb(action_name)
        if action is None:
            raise InvalidTriplet(f"unknown action verb {action_name!r}")
        object_ok = receptacle_ok = True
        if vocabulary is not None:
            object_name, object_ok = vocabulary.resolve(object_name)
            if receptacle is not None:
                receptacle, receptacle_ok = vocabulary.resolve(receptacle)
        subgoals.append(
            SubgoalTriplet(action=action, object=object_name, receptacle=receptacle,
                           object_grounded=object_ok, receptacle_grounded=receptacle_ok)
        )
    return Plan(subgoals=tuple(subgoals), origin=origin)


def plan_to_slots(plan: Plan) -> list[list]:
    return [[sg.action.value, sg.object, sg.receptacle] for sg in plan.subgoals]


def navigate_action_pairs(plan: Plan) -> str:
    """The expanded two-line-per-subgoal form the triplet grammar replaces.

    Each subgoal becomes ``[Navigate, <where>]`` plus ``[<Action>, <what>]``;
    used only for the serialization-economy comparison.
    """
    lines = []
    for sg in plan.subgoals:
        where = sg.receptacle if sg.receptacle is not None else sg.object
        what = sg.receptacle if sg.action is HighLevelAction.PUT else sg.object
        lines.append(f"[Navigate, {where}]")
        lines.append(f"[{sg.action.value}, {what}]")
    return "\n".join(lines)
