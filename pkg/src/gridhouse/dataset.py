"""Episode and dataset model: scenes, instructions, expert demos, and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import scene as scene_mod
from .actions import HighLevelAction
from .plans import Plan, plan_from_slots, plan_to_slots
from .vocab import Vocabulary, vocabulary_from_pairs

TASK_TYPES = (
    "pick_and_place_simple",
    "pick_two_obj_and_place",
    "look_at_obj_in_light",
    "pick_clean_then_place_in_recep",
    "pick_heat_then_place_in_recep",
    "pick_cool_then_place_in_recep",
    "pick_and_place_with_movable_recep",
)

SPLITS = ("train", "valid_seen", "valid_unseen")


@dataclass(frozen=True)
class Episode:
    id: str
    scene: "scene_mod.SceneSpec"
    goal_instruction: str
    step_instructions: tuple[str, ...]
    expert_plan: Plan
    expert_path_length: int
    task_type: str
    split: str

    def instruction_text(self) -> str:
        """Goal plus step instructions, the text embedded for retrieval."""
        parts = [self.goal_instruction, *self.step_instructions]
        return "\n".join(parts)


@dataclass
class Dataset:
    episodes: list[Episode]
    vocabulary: Vocabulary

    def by_id(self, episode_id: str) -> Episode:
        for ep in self.episodes:
            if ep.id == episode_id:
                return ep
        raise KeyError(episode_id)

    def split(self, name: str) -> list[Episode]:
        return sorted((e for e in self.episodes if e.split == name), key=lambda e: e.id)

    def train(self) -> list[Episode]:
        return self.split("train")


def load_dataset(path: str | Path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return dataset_from_dict(doc)


def dataset_from_dict(doc: dict) -> Dataset:
    vocabulary = vocabulary_from_pairs(doc["vocabulary"])
    episodes = []
    for entry in doc["episodes"]:
        episodes.append(
            Episode(
                id=entry["id"],
                scene=scene_mod.scene_from_dict(entry["scene"]),
                goal_instruction=entry["goal_instruction"],
                step_instructions=tuple(entry["step_instructions"]),
                expert_plan=plan_from_slots(entry["expert_plan"], vocabulary),
                expert_path_length=int(entry["expert_path_length"]),
                task_type=entry["task_type"],
                split=entry["split"],
            )
        )
    return Dataset(episodes=episodes, vocabulary=vocabulary)


def dataset_to_dict(dataset: Dataset) -> dict:
    return {
        "vocabulary": [
            {"name": c.name, "synonyms": list(c.synonyms)} for c in dataset.vocabulary.classes
        ],
        "episodes": [
            {
                "id": ep.id,
                "scene": scene_mod.scene_to_dict(ep.scene),
                "goal_instruction": ep.goal_instruction,
                "step_instructions": list(ep.step_instructions),
                "expert_plan": plan_to_slots(ep.expert_plan),
                "expert_path_length": ep.expert_path_length,
                "task_type": ep.task_type,
                "split": ep.split,
            }
            for ep in dataset.episodes
        ],
    }


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dataset_to_dict(dataset), fh, indent=1, sort_keys=True)
        fh.write("\n")


def validate_dataset(dataset: Dataset) -> list[str]:
    """Every invariant violation in the dataset, as human-readable strings."""
    violations: list[str] = []
    seen_ids: set[str] = set()
    train_task_types: set[str] = set()
    for ep in dataset.episodes:
        if ep.id in seen_ids:
            violations.append(f"{ep.id}: duplicate episode id")
        seen_ids.add(ep.id)
        if ep.split not in SPLITS:
            violations.append(f"{ep.id}: unknown split {ep.split!r}")
        if ep.task_type not in TASK_TYPES:
            violations.append(f"{ep.id}: unknown task type {ep.task_type!r}")
        if ep.split == "train":
            train_task_types.add(ep.task_type)
        if ep.expert_path_length < len(ep.expert_plan):
            violations.append(
                f"{ep.id}: expert_path_length {ep.expert_path_length} is shorter than the "
                f"{len(ep.expert_plan)}-subgoal expert plan"
            )
        for i, sg in enumerate(ep.expert_plan.subgoals):
            if not sg.object_grounded:
                violations.append(f"{ep.id}: expert plan subgoal {i} object {sg.object!r} not in vocabulary")
            if sg.receptacle is not None and not sg.receptacle_grounded:
                violations.append(
                    f"{ep.id}: expert plan subgoal {i} receptacle {sg.receptacle!r} not in vocabulary"
                )
        violations.extend(f"{ep.id}: {v}" for v in scene_mod.validate_scene(ep.scene, dataset.vocabulary))
    for task_type in TASK_TYPES:
        if task_type not in train_task_types:
            violations.append(f"train split has no {task_type} episode")
    return violations
