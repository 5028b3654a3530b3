"""Domain model: the primitive alphabet, trajectories, segments, label grids.

Time is frame-indexed throughout; frame index is the sole time coordinate.
All types are immutable values after construction and safe to share between
threads.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import UnknownPrimitive


class PrimitiveType(enum.Enum):
    """The closed 11-element alphabet of reusable kinematic primitives."""

    GRASP = "grasp"
    PLACE = "place"
    LIFT = "lift"
    MOVE = "move"
    PUSH = "push"
    PULL = "pull"
    INSERT = "insert"
    PRESS = "press"
    TWIST = "twist"
    TILT = "tilt"
    ROTATE = "rotate"

    def __str__(self) -> str:
        return self.value


#: One-line kinematic definition per primitive, shipped to external planners.
PRIMITIVE_DEFINITIONS: dict[str, str] = {
    "grasp": "Approaches, seizes target, and performs preliminary lift.",
    "place": "Descends, releases object, and retreats vertically.",
    "lift": "Vertical translation (+z) while holding an object.",
    "move": "Planar translation (xy) maintaining object grasp.",
    "push": "Slides object on surface to target without grasping.",
    "pull": "Drags or retracts object towards target position.",
    "insert": "Aligns and inserts into a constrained slot.",
    "press": "Applies downward force on an object or surface.",
    "twist": "Rotates gripper (roll) for rotary mechanisms.",
    "tilt": "Reorients effector (pitch/yaw) to alter pose.",
    "rotate": "Follows articulation trajectory (e.g., lid).",
}

_BY_NAME = {p.value: p for p in PrimitiveType}
_SUFFIXED = re.compile(r"^([a-z]+)_(\d+)$")


def parse_primitive(name: str) -> PrimitiveType:
    """Resolve a primitive name, case-insensitive, whitespace-trimmed.

    Raises UnknownPrimitive for anything outside the closed alphabet.
    """
    key = name.strip().lower()
    try:
        return _BY_NAME[key]
    except KeyError:
        raise UnknownPrimitive(name) from None


Vec3 = tuple[float, float, float]


def _as_vec3(v: Sequence[float]) -> Vec3:
    x, y, z = v
    return (float(x), float(y), float(z))


@dataclass(frozen=True)
class ProprioState:
    """7-dim proprioceptive state: position, axis-angle orientation, gripper.

    grip is a continuous opening degree in [0, 1], 1 = fully closed.
    """

    pos: Vec3
    orient: Vec3
    grip: float

    @property
    def z(self) -> float:
        return self.pos[2]


@dataclass(frozen=True)
class ActionDelta:
    """7-dim delta action: delta pose plus a binary gripper command."""

    dpos: Vec3
    dorient: Vec3
    grip_cmd: int  # 1 = close, 0 = open


@dataclass(frozen=True)
class SequenceItem:
    primitive: PrimitiveType
    role_hint: str | None = None

    @property
    def display(self) -> str:
        return self.role_hint if self.role_hint else self.primitive.value


@dataclass(frozen=True)
class PrimitiveSequence:
    """An ordered, non-empty plan over the primitive alphabet."""

    items: tuple[SequenceItem, ...]

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("primitive sequence must be non-empty")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[SequenceItem]:
        return iter(self.items)

    def __getitem__(self, i: int) -> SequenceItem:
        return self.items[i]

    @property
    def primitives(self) -> tuple[PrimitiveType, ...]:
        return tuple(it.primitive for it in self.items)

    def names(self) -> list[str]:
        return [it.display for it in self.items]

    @classmethod
    def parse(cls, names: Iterable[str]) -> "PrimitiveSequence":
        """Build a sequence from names; numeric suffixes (grasp_1) become
        role hints, the base name must be in the alphabet."""
        items = []
        for raw in names:
            token = raw.strip().lower()
            m = _SUFFIXED.match(token)
            if m and m.group(1) in _BY_NAME:
                items.append(SequenceItem(_BY_NAME[m.group(1)], token))
            else:
                items.append(SequenceItem(parse_primitive(token)))
        return cls(tuple(items))

    @classmethod
    def of(cls, *names: str) -> "PrimitiveSequence":
        return cls.parse(names)


@dataclass(frozen=True)
class CanonicalInstruction:
    """The fixed template string for a primitive with color-slot roles.

    text is always a verbatim row of the canonical table; roles record which
    object each referenced color slot stands for.
    """

    text: str
    primitive: PrimitiveType
    roles: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class LabelGrid:
    """Per-cell small-integer object-id map; 0 is background.

    The label array is locked read-only at construction.
    """

    labels: np.ndarray
    max_label: int = 255

    def __post_init__(self) -> None:
        arr = np.asarray(self.labels, dtype=np.int32)
        if arr.ndim != 2:
            raise ValueError("label grid must be 2-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    @property
    def height(self) -> int:
        return int(self.labels.shape[0])

    @property
    def width(self) -> int:
        return int(self.labels.shape[1])


Frame = tuple[ProprioState, ActionDelta]


@dataclass(frozen=True)
class Trajectory:
    """A demonstration: instruction plus time-indexed (state, action) frames.

    masks, when present, must have exactly one LabelGrid per frame.
    """

    instruction: str
    frames: tuple[Frame, ...]
    masks: tuple[LabelGrid, ...] | None = None
    source_id: str = ""

    def __len__(self) -> int:
        return len(self.frames)

    @cached_property
    def positions(self) -> np.ndarray:
        """(T, 3) array of state positions."""
        return np.array([s.pos for s, _ in self.frames], dtype=float)

    @cached_property
    def orients(self) -> np.ndarray:
        """(T, 3) array of axis-angle orientations."""
        return np.array([s.orient for s, _ in self.frames], dtype=float)

    @cached_property
    def grips(self) -> np.ndarray:
        return np.array([s.grip for s, _ in self.frames], dtype=float)

    @cached_property
    def grip_cmds(self) -> np.ndarray:
        return np.array([a.grip_cmd for _, a in self.frames], dtype=int)


@dataclass(frozen=True)
class Segment:
    """A half-open frame interval [t_start, t_end) labeled with a primitive."""

    primitive: PrimitiveType
    t_start: int
    t_end: int
    canonical: CanonicalInstruction

    def __post_init__(self) -> None:
        if not 0 <= self.t_start < self.t_end:
            raise ValueError(
                f"bad segment bounds [{self.t_start}, {self.t_end})"
            )


@dataclass(frozen=True)
class Violation:
    kind: str
    frame: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)


def _finite(*vals: float) -> bool:
    return all(math.isfinite(v) for v in vals)


def validate_trajectory(traj: Trajectory) -> ValidationReport:
    """Collect every invariant violation; an empty report means valid.

    Violations are data, not failures: malformed values never raise here.
    """
    out: list[Violation] = []
    if not traj.frames:
        out.append(Violation("empty", None, "trajectory has no frames"))
    for t, (state, action) in enumerate(traj.frames):
        if not _finite(*state.pos, *state.orient, state.grip):
            out.append(Violation("non_finite", t, "non-finite state component"))
        if not _finite(*action.dpos, *action.dorient):
            out.append(Violation("non_finite", t, "non-finite action component"))
        if not 0.0 <= state.grip <= 1.0:
            out.append(
                Violation("grip_range", t, f"grip {state.grip} outside [0, 1]")
            )
        if action.grip_cmd not in (0, 1):
            out.append(
                Violation("grip_cmd", t, f"grip_cmd {action.grip_cmd} not in {{0, 1}}")
            )
    if traj.masks is not None:
        if len(traj.masks) != len(traj.frames):
            out.append(
                Violation(
                    "mask_length",
                    None,
                    f"{len(traj.masks)} masks for {len(traj.frames)} frames",
                )
            )
        for t, grid in enumerate(traj.masks):
            top = int(grid.labels.max(initial=0))
            if top > grid.max_label:
                out.append(
                    Violation("label_bound", t, f"label {top} exceeds {grid.max_label}")
                )
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# Trajectory file format (JSON Lines)
# ---------------------------------------------------------------------------
# One record per line:
#   {"source_id": str, "instruction": str,
#    "frames": [[x,y,z,rx,ry,rz,grip, dx,dy,dz,drx,dry,drz,grip_cmd], ...],
#    "masks": [{"w": int, "h": int, "runs": [[label, count], ...]}, ...]}
# 14 numbers per frame, state first then action. Floats are serialized with
# Python's shortest round-trip repr, which preserves the exact value.
# masks is optional; each entry run-length-encodes one row-major label grid.


def encode_mask(grid: LabelGrid) -> dict:
    flat = grid.labels.ravel()
    runs: list[list[int]] = []
    for v in flat:
        v = int(v)
        if runs and runs[-1][0] == v:
            runs[-1][1] += 1
        else:
            runs.append([v, 1])
    return {"w": grid.width, "h": grid.height, "runs": runs}


def decode_mask(obj: Mapping) -> LabelGrid:
    w, h = int(obj["w"]), int(obj["h"])
    flat = np.empty(w * h, dtype=np.int32)
    pos = 0
    for label, count in obj["runs"]:
        flat[pos : pos + count] = int(label)
        pos += count
    if pos != w * h:
        raise ValueError(f"RLE covers {pos} cells, grid has {w * h}")
    return LabelGrid(flat.reshape(h, w))


def trajectory_to_record(traj: Trajectory) -> dict:
    frames = []
    for state, action in traj.frames:
        frames.append(
            [*state.pos, *state.orient, state.grip,
             *action.dpos, *action.dorient, int(action.grip_cmd)]
        )
    rec: dict = {
        "source_id": traj.source_id,
        "instruction": traj.instruction,
        "frames": frames,
    }
    if traj.masks is not None:
        rec["masks"] = [encode_mask(g) for g in traj.masks]
    return rec


def trajectory_from_record(rec: Mapping) -> Trajectory:
    frames = []
    for row in rec["frames"]:
        if len(row) != 14:
            raise ValueError(f"frame has {len(row)} numbers, expected 14")
        state = ProprioState(_as_vec3(row[0:3]), _as_vec3(row[3:6]), float(row[6]))
        action = ActionDelta(_as_vec3(row[7:10]), _as_vec3(row[10:13]), int(row[13]))
        frames.append((state, action))
    masks = None
    if rec.get("masks") is not None:
        masks = tuple(decode_mask(m) for m in rec["masks"])
    return Trajectory(
        instruction=str(rec.get("instruction", "")),
        frames=tuple(frames),
        masks=masks,
        source_id=str(rec.get("source_id", "")),
    )


def write_trajectories(fp: IO[str], trajs: Iterable[Trajectory]) -> int:
    n = 0
    for traj in trajs:
        fp.write(json.dumps(trajectory_to_record(traj), separators=(",", ":")))
        fp.write("\n")
        n += 1
    return n


def read_trajectories(fp: IO[str]) -> Iterator[Trajectory]:
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            yield trajectory_from_record(rec)
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
