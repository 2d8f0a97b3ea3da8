"""Prompt assembly for the planning LLM.

The prompt is a fixed task explanation (with the allowed verbs and object
classes), followed by the retrieved in-context examples and the query task in
the same block format. Rendering is byte-stable: identical inputs always
produce identical text, which makes prompts golden-testable and lets scripted
providers key on a prompt hash.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum

from .actions import HighLevelAction
from .dataset import Episode
from .plans import Plan, serialize_plan


class PromptMode(Enum):
    GOAL_ONLY = "GoalOnly"
    GOAL_PLUS_STEPS = "GoalPlusSteps"


HEADER_TEMPLATE = (
    "You control a household robot. Convert the task into a plan, one subgoal\n"
    "per line, each formatted as (Action, Object, Receptacle). Write None for\n"
    "the receptacle when the action does not need one. Output only the plan.\n"
    "Allowed actions: {actions}.\n"
    "Allowed objects: {objects}.\n"
)


@dataclass(frozen=True)
class PromptBundle:
    header: str
    examples: tuple[str, ...]
    query: str
    rendered: str

    def sha256(self) -> str:
        return hashlib.sha256(self.rendered.encode("utf-8")).hexdigest()


def _task_block(goal: str, steps: tuple[str, ...], plan: Plan | None, mode: PromptMode) -> str:
    lines = [f"Task description: {goal}"]
    if mode is PromptMode.GOAL_PLUS_STEPS and steps:
        lines.append("Step-by-step instructions: " + " ".join(steps))
    lines.append("Next plan:")
    if plan is not None:
        lines.append(serialize_plan(plan))
    return "\n".join(lines)


def build_prompt(query: Episode, retrieved: list[Episode], object_names: list[str],
                 mode: PromptMode = PromptMode.GOAL_PLUS_STEPS) -> PromptBundle:
    """Render the full prompt for a query given its retrieved examples.

    ``retrieved`` must already be ordered by descending fused similarity; the
    query block repeats the example format with an empty plan section.
    """
    if not retrieved:
        raise ValueError("at least one in-context example is required")
    header = HEADER_TEMPLATE.format(
        actions=", ".join(a.value for a in HighLevelAction),
        objects=", ".join(sorted(object_names)),
    )
    examples = tuple(
        _task_block(ep.goal_instruction, ep.step_instructions, ep.expert_plan, mode)
        for ep in retrieved
    )
    query_block = _task_block(query.goal_instruction, query.step_instructions, None, mode)
    rendered = header + "\n" + "\n\n".join(examples) + "\n\n" + query_block + "\n"
    return PromptBundle(header=header, examples=examples, query=query_block, rendered=rendered)


def allowed_output_tokens(object_names: list[str]) -> list[str]:
    """The strings a biased completion should favor: verbs, classes, punctuation."""
    tokens = [a.value for a in HighLevelAction]
    tokens.extend(sorted(object_names))
    tokens.extend(["None", "(", ")", ","])
    return tokens
