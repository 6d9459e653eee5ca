"""Shared domain types: disease spaces, outcome intervals, acts, events, evidence.

Disease labels are opaque strings. Internally every label is mapped to a dense
index, and that index order fixes the vector layout used by all probability
simplexes, so serialization is stable.

All types are immutable values and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class CarnapkitError(Exception):
    """Base class for all library errors."""


class SchemaError(CarnapkitError):
    """Malformed input: unknown labels, bad JSON shapes, duplicated keys."""


class DomainError(CarnapkitError):
    """Structurally valid input that violates a precondition."""


class NumericalError(CarnapkitError):
    """A numerical routine could not produce a result."""


class TruncationError(DomainError):
    """A standard sequence escaped the outcome interval before completion.

    Carries the points elicited so far in ``points``.
    """

    def __init__(self, message: str, points: tuple[float, ...]):
        super().__init__(message)
        self.points = points


@dataclass(frozen=True)
class DiseaseSpace:
    """A finite set of mutually exclusive disease labels."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise DomainError("a disease space needs at least two diseases")
        if len(set(labels)) != len(labels):
            raise SchemaError("disease labels must be distinct")
        object.__setattr__(self, "_index", {d: i for i, d in enumerate(labels)})

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]  # type: ignore[attr-defined]
        except KeyError:
            raise SchemaError(f"unknown disease label {label!r}") from None

    def __contains__(self, label: str) -> bool:
        return label in self._index  # type: ignore[attr-defined]

    def event(self, members: Iterable[str]) -> "Event":
        return Event(self, frozenset(members))

    def full_event(self) -> "Event":
        return Event(self, frozenset(self.labels))

    def empty_event(self) -> "Event":
        return Event(self, frozenset())


@dataclass(frozen=True)
class OutcomeInterval:
    """Bounded closed interval of monetary outcomes; must contain zero."""

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not self.lo < self.hi:
            raise DomainError("outcome interval must be nondegenerate (lo < hi)")
        if not (self.lo <= 0.0 <= self.hi):
            raise DomainError("outcome interval must contain zero")

    def __contains__(self, x: float) -> bool:
        # exact comparison on purpose: endpoints are user-specified values
        return self.lo <= x <= self.hi

    def require(self, x: float, what: str = "outcome") -> float:
        x = float(x)
        if x not in self:
            raise DomainError(
                f"{what} {x!r} outside outcome interval [{self.lo}, {self.hi}]"
            )
        return x


#: Desk-scale default used when no interval is configured.
DESK_INTERVAL = OutcomeInterval(0.0, 100.0)


@dataclass(frozen=True)
class Event:
    """A subset of the disease space."""

    space: DiseaseSpace
    members: frozenset[str]

    def __post_init__(self):
        members = frozenset(self.members)
        object.__setattr__(self, "members", members)
        for d in members:
            if d not in self.space:
                raise SchemaError(f"event member {d!r} not in the disease space")

    @property
    def is_empty(self) -> bool:
        return not self.members

    @property
    def is_full(self) -> bool:
        return len(self.members) == self.space.size

    def complement(self) -> "Event":
        return Event(self.space, frozenset(self.space.labels) - self.members)

    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.space.index(d) for d in self.members))

    def sorted_members(self) -> tuple[str, ...]:
        return tuple(sorted(self.members, key=self.space.index))


@dataclass(frozen=True)
class Act:
    """A treatment: a total map from diseases to outcomes in the interval.

    Outcome values are stored as a tuple in disease index order.
    """

    space: DiseaseSpace
    interval: OutcomeInterval
    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != self.space.size:
            raise SchemaError("act must assign an outcome to every disease")
        for v in values:
            self.interval.require(v)

    @classmethod
    def from_mapping(
        cls,
        space: DiseaseSpace,
        interval: OutcomeInterval,
        outcomes: Mapping[str, float],
    ) -> "Act":
        if set(outcomes) != set(space.labels):
            missing = set(space.labels) - set(outcomes)
            extra = set(outcomes) - set(space.labels)
            raise SchemaError(
                f"act outcomes do not match the disease space "
                f"(missing={sorted(missing)}, unknown={sorted(extra)})"
            )
        return cls(space, interval, tuple(outcomes[d] for d in space.labels))

    @classmethod
    def constant(
        cls, space: DiseaseSpace, interval: OutcomeInterval, level: float
    ) -> "Act":
        return cls(space, interval, (float(level),) * space.size)

    def outcome(self, label: str) -> float:
        return self.values[self.space.index(label)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.space.labels, self.values))

    def dominates(self, other: "Act") -> bool:
        """Pointwise weak dominance: self(d) >= other(d) for every disease."""
        if other.space is not self.space and other.space != self.space:
            raise DomainError("acts over different disease spaces are incomparable")
        return all(a >= b for a, b in zip(self.values, other.values))


def splice(base: Act, event: Event, level: float) -> Act:
    """Replace the outcomes of ``base`` on ``event`` with the constant ``level``."""
    if event.space != base.space:
        raise DomainError("event and act must share a disease space")
    level = base.interval.require(level, "splice level")
    if event.is_empty:
        return base
    idx = set(event.indices())
    values = tuple(
        level if i in idx else v for i, v in enumerate(base.values)
    )
    return Act(base.space, base.interval, values)


def binary_act(
    event: Event, x: float, interval: OutcomeInterval | None = None
) -> Act:
    """The act paying ``x`` on ``event`` and 0 elsewhere."""
    interval = interval or DESK_INTERVAL
    x = interval.require(x, "binary stake")
    idx = set(event.indices())
    values = tuple(x if i in idx else 0.0 for i in range(event.space.size))
    return Act(event.space, interval, values)


@dataclass(frozen=True)
class Evidence:
    """An ordered sequence of observed diseases, one per past patient."""

    space: DiseaseSpace
    observations: tuple[str, ...]

    def __post_init__(self):
        obs = tuple(self.observations)
        object.__setattr__(self, "observations", obs)
        for d in obs:
            if d not in self.space:
                raise SchemaError(f"observation {d!r} not in the disease space")

    @classmethod
    def empty(cls, space: DiseaseSpace) -> "Evidence":
        return cls(space, ())

    @property
    def total(self) -> int:
        return len(self.observations)

    def counts(self) -> tuple[int, ...]:
        n = [0] * self.space.size
        for d in self.observations:
            n[self.space.index(d)] += 1
        return tuple(n)

    def extended(self, *extra: str) -> "Evidence":
        return Evidence(self.space, self.observations + tuple(extra))

    def prefix(self, length: int) -> "Evidence":
        return Evidence(self.space, self.observations[:length])


def counts(evidence: Evidence) -> tuple[tuple[int, ...], int]:
    """Per-disease tallies and the total number of observations.

    Invariant under permutation of the observation sequence.
    """
    n = evidence.counts()
    return n, sum(n)


@dataclass(frozen=True)
class IndifferenceRecord:
    """Two acts reported as equally preferred, possibly under evidence."""

    left: Act
    right: Act
    evidence: Evidence | None = None

    def __post_init__(self):
        if self.left.space != self.right.space:
            raise DomainError("indifferent acts must share a disease space")
        if self.left.interval != self.right.interval:
            raise DomainError("indifferent acts must share an outcome interval")
        if self.evidence is not None and self.evidence.space != self.left.space:
            raise DomainError("evidence must be over the acts' disease space")


# --- JSON wire formats -----------------------------------------------------
#
# disease space: {"diseases": ["d1", ...]}
# interval:      {"interval": {"lo": 0, "hi": 100}}
# act:           {"outcomes": {"d1": 2.0, ...}}
# evidence:      {"evidence": ["d1", "d1", "d2"]} or a bare array of labels


def space_from_json(obj) -> DiseaseSpace:
    if isinstance(obj, Mapping):
        obj = obj.get("diseases")
    if not isinstance(obj, Sequence) or isinstance(obj, str):
        raise SchemaError('expected "diseases" as an array of labels')
    return DiseaseSpace(tuple(str(d) for d in obj))


def interval_from_json(obj) -> OutcomeInterval:
    if obj is None:
        return DESK_INTERVAL
    if isinstance(obj, Mapping) and "interval" in obj:
        obj = obj["interval"]
    if not isinstance(obj, Mapping) or "lo" not in obj or "hi" not in obj:
        raise SchemaError('expected "interval" as {"lo": ..., "hi": ...}')
    try:
        return OutcomeInterval(float(obj["lo"]), float(obj["hi"]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad interval bounds: {exc}") from exc


def act_from_json(obj, space: DiseaseSpace, interval: OutcomeInterval) -> Act:
    if isinstance(obj, Mapping) and "outcomes" in obj:
        obj = obj["outcomes"]
    if not isinstance(obj, Mapping):
        raise SchemaError('expected act as {"outcomes": {label: number}}')
    try:
        outcomes = {str(d): float(v) for d, v in obj.items()}
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad act outcome: {exc}") from exc
    return Act.from_mapping(space, interval, outcomes)


def evidence_from_json(obj, space: DiseaseSpace) -> Evidence:
    if isinstance(obj, Mapping):
        obj = obj.get("evidence", ())
    if obj is None:
        return Evidence.empty(space)
    if not isinstance(obj, Sequence) or isinstance(obj, str):
        raise SchemaError('expected "evidence" as an array of labels')
    return Evidence(space, tuple(str(d) for d in obj))


def event_from_json(obj, space: DiseaseSpace) -> Event:
    if isinstance(obj, Mapping):
        obj = obj.get("event") or obj.get("members")
    if not isinstance(obj, Sequence) or isinstance(obj, str):
        raise SchemaError("expected event as an array of member labels")
    return Event(space, frozenset(str(d) for d in obj))
