"""Scene data model: grid layout, object instances, and agent start pose."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .vocab import Vocabulary

Cell = tuple[int, int]  # (x, y); x grows east, y grows south


class Heading(Enum):
    NORTH = "N"
    EAST = "E"
    SOUTH = "S"
    WEST = "W"


class Pitch(Enum):
    UP = "Up"
    LEVEL = "Level"
    DOWN = "Down"


HEADING_VECTORS: dict[Heading, Cell] = {
    Heading.NORTH: (0, -1),
    Heading.EAST: (1, 0),
    Heading.SOUTH: (0, 1),
    Heading.WEST: (-1, 0),
}

# Counter-clockwise ring, so RotateLeft steps forward in this order.
_HEADING_RING = (Heading.NORTH, Heading.WEST, Heading.SOUTH, Heading.EAST)


def rotate_left(heading: Heading) -> Heading:
    return _HEADING_RING[(_HEADING_RING.index(heading) + 1) % 4]


def rotate_right(heading: Heading) -> Heading:
    return _HEADING_RING[(_HEADING_RING.index(heading) - 1) % 4]


@dataclass(frozen=True)
class AgentPose:
    cell: Cell
    heading: Heading
    pitch: Pitch = Pitch.LEVEL


@dataclass
class ObjectState:
    """Mutable per-instance flags plus the capability booleans that gate them."""

    is_open: bool = False
    is_toggled: bool = False
    is_sliced: bool = False
    is_clean: bool = False
    is_hot: bool = False
    is_cold: bool = False
    is_pickupable: bool = False
    is_receptacle: bool = False
    is_openable: bool = False
    is_toggleable: bool = False
    is_sliceable: bool = False

    def check(self) -> list[str]:
        problems = []
        if self.is_open and not self.is_openable:
            problems.append("is_open without is_openable")
        if self.is_toggled and not self.is_toggleable:
            problems.append("is_toggled without is_toggleable")
        if self.is_sliced and not self.is_sliceable:
            problems.append("is_sliced without is_sliceable")
        return problems


STATE_FLAGS = (
    "is_open", "is_toggled", "is_sliced", "is_clean", "is_hot", "is_cold",
    "is_pickupable", "is_receptacle", "is_openable", "is_toggleable", "is_sliceable",
)


@dataclass
class ObjectInstance:
    instance_id: str
    object_class: str
    cell: Cell | None                 # None while contained or held
    states: ObjectState
    contained_in: str | None = None   # instance_id of the containing receptacle


@dataclass
class SceneSpec:
    width: int
    height: int
    walls: frozenset[Cell]
    object_instances: list[ObjectInstance]
    agent_start: AgentPose

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def classes_present(self) -> set[str]:
        return {o.object_class for o in self.object_instances}


def default_state_for(vocabulary: Vocabulary, class_name: str) -> ObjectState:
    traits = vocabulary.traits(class_name)
    return ObjectState(
        is_pickupable=traits.pickupable,
        is_receptacle=traits.receptacle,
        is_openable=traits.openable,
        is_toggleable=traits.toggleable,
        is_sliceable=traits.sliceable,
    )


def scene_from_dict(doc: dict) -> SceneSpec:
    instances = []
    for entry in doc["object_instances"]:
        states = ObjectState(**entry.get("states", {}))
        cell = entry.get("cell")
        instances.append(
            ObjectInstance(
                instance_id=entry["instance_id"],
                object_class=entry["class"],
                cell=tuple(cell) if cell is not None else None,
                states=states,
                contained_in=entry.get("contained_in"),
            )
        )
    start = doc["agent_start"]
    return SceneSpec(
        width=int(doc["width"]),
        height=int(doc["height"]),
        walls=frozenset(tuple(c) for c in doc["walls"]),
        object_instances=instances,
        agent_start=AgentPose(
            cell=tuple(start["cell"]),
            heading=Heading(start["heading"]),
            pitch=Pitch(start.get("pitch", "Level")),
        ),
    )


def scene_to_dict(scene: SceneSpec) -> dict:
    return {
        "width": scene.width,
        "height": scene.height,
        "walls": sorted(list(c) for c in scene.walls),
        "object_instances": [
            {
                "instance_id": o.instance_id,
                "class": o.object_class,
                "cell": list(o.cell) if o.cell is not None else None,
                "states": {f: getattr(o.states, f) for f in STATE_FLAGS if getattr(o.states, f)},
                "contained_in": o.contained_in,
            }
            for o in scene.object_instances
        ],
        "agent_start": {
            "cell": list(scene.agent_start.cell),
            "heading": scene.agent_start.heading.value,
            "pitch": scene.agent_start.pitch.value,
        },
    }


def validate_scene(scene: SceneSpec, vocabulary: Vocabulary) -> list[str]:
    problems = []
    if scene.agent_start.cell in scene.walls:
        problems.append("agent start is on a wall cell")
    if not scene.in_bounds(scene.agent_start.cell):
        problems.append("agent start is out of bounds")
    by_id = {}
    for obj in scene.object_instances:
        if obj.instance_id in by_id:
            problems.append(f"duplicate instance id {obj.instance_id}")
        by_id[obj.instance_id] = obj
        if obj.object_class not in vocabulary:
            problems.append(f"instance {obj.instance_id} has unknown class {obj.object_class!r}")
        if (obj.cell is None) == (obj.contained_in is None):
            problems.append(f"instance {obj.instance_id} must have exactly one of cell/contained_in")
        if obj.cell is not None and obj.cell in scene.walls:
            problems.append(f"instance {obj.instance_id} sits on a wall cell")
        if obj.cell is not None and not scene.in_bounds(obj.cell):
            problems.append(f"instance {obj.instance_id} is out of bounds")
        problems.extend(f"instance {obj.instance_id}: {p}" for p in obj.states.check())
    for obj in scene.object_instances:
        if obj.contained_in is not None:
            container = by_id.get(obj.contained_in)
            if container is None:
                problems.append(f"instance {obj.instance_id} contained in unknown {obj.contained_in}")
            elif not container.states.is_receptacle:
                problems.append(f"instance {obj.instance_id} contained in non-receptacle {obj.contained_in}")
    # Containment must be acyclic.
    for obj in scene.object_instances:
        seen = set()
        cursor = obj
        while cursor is not None and cursor.contained_in is not None:
            if cursor.instance_id in seen:
                problems.append(f"containment cycle through {obj.instance_id}")
                break
            seen.add(cursor.instance_id)
            cursor = by_id.get(cursor.contained_in)
    return problems
