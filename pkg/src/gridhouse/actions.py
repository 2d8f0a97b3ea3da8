"""Action vocabularies: primitive simulator actions and high-level plan verbs."""

from __future__ import annotations

from enum import Enum


class ActionKind(Enum):
    """The 13 primitive actions the simulator accepts."""

    MOVE_AHEAD = "MoveAhead"
    ROTATE_LEFT = "RotateLeft"
    ROTATE_RIGHT = "RotateRight"
    LOOK_UP = "LookUp"
    LOOK_DOWN = "LookDown"
    PICKUP_OBJECT = "PickupObject"
    PUT_OBJECT = "PutObject"
    OPEN_OBJECT = "OpenObject"
    CLOSE_OBJECT = "CloseObject"
    TOGGLE_OBJECT_ON = "ToggleObjectOn"
    TOGGLE_OBJECT_OFF = "ToggleObjectOff"
    SLICE_OBJECT = "SliceObject"
    STOP = "Stop"


NAVIGATION_ACTIONS = frozenset(
    {
        ActionKind.MOVE_AHEAD,
        ActionKind.ROTATE_LEFT,
        ActionKind.ROTATE_RIGHT,
        ActionKind.LOOK_UP,
        ActionKind.LOOK_DOWN,
    }
)

INTERACTION_ACTIONS = frozenset(
    {
        ActionKind.PICKUP_OBJECT,
        ActionKind.PUT_OBJECT,
        ActionKind.OPEN_OBJECT,
        ActionKind.CLOSE_OBJECT,
        ActionKind.TOGGLE_OBJECT_ON,
        ActionKind.TOGGLE_OBJECT_OFF,
        ActionKind.SLICE_OBJECT,
    }
)


class HighLevelAction(Enum):
    """Verbs usable in subgoal triplets. Each expands to primitives (see policy)."""

    PICKUP = "Pickup"
    PUT = "Put"
    OPEN = "Open"
    CLOSE = "Close"
    TOGGLE_ON = "ToggleOn"
    TOGGLE_OFF = "ToggleOff"
    SLICE = "Slice"
    CLEAN = "Clean"
    HEAT = "Heat"
    COOL = "Cool"
    EXAMINE = "Examine"


# Actions whose triplet may carry receptacle = None.
RECEPTACLE_OPTIONAL = frozenset(
    {
        HighLevelAction.TOGGLE_ON,
        HighLevelAction.TOGGLE_OFF,
        HighLevelAction.EXAMINE,
        HighLevelAction.SLICE,
        HighLevelAction.OPEN,
        HighLevelAction.CLOSE,
    }
)

# Tolerated spellings in LLM output, mapped to canonical verbs.
VERB_ALIASES = {
    "pickup": HighLevelAction.PICKUP,
    "pick": HighLevelAction.PICKUP,
    "pickupobject": HighLevelAction.PICKUP,
    "take": HighLevelAction.PICKUP,
    "grab": HighLevelAction.PICKUP,
    "put": HighLevelAction.PUT,
    "place": HighLevelAction.PUT,
    "putobject": HighLevelAction.PUT,
    "open": HighLevelAction.OPEN,
    "openobject": HighLevelAction.OPEN,
    "close": HighLevelAction.CLOSE,
    "closeobject": HighLevelAction.CLOSE,
    "toggleon": HighLevelAction.TOGGLE_ON,
    "turnon": HighLevelAction.TOGGLE_ON,
    "switchon": HighLevelAction.TOGGLE_ON,
    "toggleobjecton": HighLevelAction.TOGGLE_ON,
    "toggleoff": HighLevelAction.TOGGLE_OFF,
    "turnoff": HighLevelAction.TOGGLE_OFF,
    "switchoff": HighLevelAction.TOGGLE_OFF,
    "toggleobjectoff": HighLevelAction.TOGGLE_OFF,
    "slice": HighLevelAction.SLICE,
    "cut": HighLevelAction.SLICE,
    "sliceobject": HighLevelAction.SLICE,
    "clean": HighLevelAction.CLEAN,
    "wash": HighLevelAction.CLEAN,
    "rinse": HighLevelAction.CLEAN,
    "heat": HighLevelAction.HEAT,
    "cook": HighLevelAction.HEAT,
    "microwave": HighLevelAction.HEAT,
    "cool": HighLevelAction.COOL,
    "chill": HighLevelAction.COOL,
    "refrigerate": HighLevelAction.COOL,
    "examine": HighLevelAction.EXAMINE,
    "inspect": HighLevelAction.EXAMINE,
    "lookat": HighLevelAction.EXAMINE,
}


def resolve_verb(text: str) -> HighLevelAction | None:
    """Map a verb spelling to a HighLevelAction, or None if unrecognized."""
    return VERB_ALIASES.get(text.strip().lower().replace(" ", "").replace("_", ""))
