"""Nonadditive decision weights: measurement, debiasing, and belief functions.

Covers four related tools. Decision weights W over events are read off
certainty equivalents of binary bets. A weighting distortion w on [0, 1]
(inverse-S shaped families) can be fitted on events with known probability
and divided out, leaving the corrected judgment phi = w^-1(W), which lives
on events, not on the unit interval. Additivity reports classify disjoint
pairs as sub/superadditive and track how the subadditivity gap grows under
refinement. Dempster-Shafer mass functions are included as the contrast
case: iterated combination drives beliefs to degenerate values, while the
corrected judgments stay interior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from .core import (
    DiseaseSpace,
    DomainError,
    Event,
    Evidence,
    SchemaError,
)
from .carnap import CarnapModel, predictive

MAX_FRAME_SIZE = 12
INVERSE_TOL = 1e-12


# --- capacities --------------------------------------------------------------


@dataclass(frozen=True)
class CapacityTable:
    """Decision weights for a listed set of events.

    Values must lie in [0, 1], with the empty event at 0 and the full event
    at 1 whenever they are listed. Monotonicity under inclusion is reported,
    not enforced: measured tables may violate it.
    """

    space: DiseaseSpace
    values: Mapping[frozenset, float]

    def __post_init__(self):
        vals: dict[frozenset, float] = {}
        for members, v in self.values.items():
            ev = Event(self.space, frozenset(members))
            v = float(v)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"capacity value {v} outside [0, 1]")
            vals[ev.members] = v
        object.__setattr__(self, "values", vals)
        empty = frozenset()
        full = frozenset(self.space.labels)
        # 1e-9 slack: measured tables carry float dust from summed stakes
        if empty in vals and abs(vals[empty]) > 1e-9:
            raise DomainError("capacity of the empty event must be 0")
        if full in vals and abs(vals[full] - 1.0) > 1e-9:
            raise DomainError("capacity of the full event must be 1")

    def value(self, event: Event | Iterable[str]) -> float:
        members = event.members if isinstance(event, Event) else frozenset(event)
        try:
            return self.values[members]
        except KeyError:
            raise DomainError(
                f"event {sorted(members)} is not listed in the capacity table"
            ) from None

    def has(self, event: Event | Iterable[str]) -> bool:
        members = event.members if isinstance(event, Event) else frozenset(event)
        return members in self.values

    def events(self) -> list[Event]:
        ordered = sorted(self.values, key=lambda m: (len(m), sorted(m)))
        return [Event(self.space, m) for m in ordered]

    def monotonicity_violations(self, tol: float = 1e-12) -> list[dict]:
        """Listed pairs A subset of B with value(A) > value(B)."""
        out = []
        items = list(self.values.items())
        for a, va in items:
            for b, vb in items:
                if a < b and va > vb + tol:
                    out.append(
                        {"subset": sorted(a), "superset": sorted(b), "gap": va - vb}
                    )
        return out

    def to_json(self) -> dict:
        return {
            "diseases": list(self.space.labels),
            "capacity": [
                {"members": sorted(m, key=self.space.index), "value": v}
                for m, v in sorted(
                    self.values.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))
                )
            ],
        }

    @classmethod
    def from_json(cls, obj, space: DiseaseSpace | None = None) -> "CapacityTable":
        if space is None:
            space = DiseaseSpace(tuple(obj["diseases"]))
        entries = obj["capacity"] if isinstance(obj, Mapping) else obj
        values: dict[frozenset, float] = {}
        for row in entries:
            if "members" not in row or "value" not in row:
                raise SchemaError('capacity rows need "members" and "value"')
            members = frozenset(str(d) for d in row["members"])
            if members in values and values[members] != float(row["value"]):
                raise DomainError(
                    f"conflicting capacity values for event {sorted(members)}"
                )
            values[members] = float(row["value"])
        return cls(space, values)


@dataclass(frozen=True)
class CERecord:
    """An observed equivalence between a binary bet and a sure outcome."""

    event: Event
    ce: float
    stake: float = 1.0

    def __post_init__(self):
        if self.stake <= 0:
            raise DomainError("stake must be positive")
        if self.ce < 0:
            raise DomainError("only nonnegative outcomes are supported here")


def measure_W(records: Sequence[CERecord], utility) -> CapacityTable:
    """Read decision weights off binary-bet certainty equivalents.

    W(A) is the utility of the certainty equivalent as a fraction of the
    utility of the stake. Utilities are re-anchored at zero, so curves that
    do not pass through the origin are handled too.
    """
    if not records:
        raise DomainError("no certainty-equivalent records given")
    space = records[0].event.space
    u0 = utility(0.0)
    values: dict[frozenset, float] = {}
    for rec in records:
        if rec.event.space != space:
            raise SchemaError("all records must share one disease space")
        denom = utility(rec.stake) - u0
        if denom <= 0:
            raise DomainError(f"degenerate stake {rec.stake}: zero utility range")
        w = (utility(rec.ce) - u0) / denom
        key = rec.event.members
        if key in values and values[key] != w:
            raise DomainError(
                f"conflicting records for event {sorted(key)}: "
                f"weights {values[key]} and {w}"
            )
        values[key] = w
    return CapacityTable(space, values)


def nonadditivity_flags(table: CapacityTable, tol: float = 1e-9) -> list[dict]:
    """Complementary event pairs whose weights fail to sum to one."""
    flags = []
    seen = set()
    for members in table.values:
        comp = frozenset(table.space.labels) - members
        if comp not in table.values:
            continue
        key = frozenset((members, comp))
        if key in seen:
            continue
        seen.add(key)
        total = table.values[members] + table.values[comp]
        if abs(total - 1.0) > tol:
            flags.append(
                {
                    "code": "NONADDITIVE",
                    "event": sorted(members, key=table.space.index),
                    "complement": sorted(comp, key=table.space.index),
                    "sum": total,
                }
            )
    return flags


def binary_value(W: CapacityTable, event: Event, x: float, utility) -> float:
    """Value of the bet paying x on the event under weights W: W(A) * U(x)."""
    if x < 0:
        raise DomainError("binary_value is defined for nonnegative stakes only")
    return W.value(event) * utility(x)


# --- weighting families -------------------------------------------------------

#: Below this curvature the single-parameter family stops being increasing.
TK_GAMMA_MIN = 0.28
TK_GAMMA_MAX = 2.0


@dataclass(frozen=True)
class WeightingFamily:
    """A parametric probability weighting function on [0, 1].

    Families: "linear" (identity), "tk" (single curvature parameter,
    inverse-S), and "prelec" (two parameters, exp(-beta * (-ln p) ** alpha)).
    """

    family: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.family == "linear":
            if self.params:
                raise DomainError("the linear family has no parameters")
        elif self.family == "tk":
            if len(self.params) != 1:
                raise DomainError("the tk family takes exactly one parameter")
            gamma = self.params[0]
            if not TK_GAMMA_MIN < gamma <= TK_GAMMA_MAX:
                raise DomainError(
                    f"tk curvature {gamma} outside admissible range "
                    f"({TK_GAMMA_MIN}, {TK_GAMMA_MAX}]"
                )
        elif self.family == "prelec":
            if len(self.params) != 2:
                raise DomainError("the prelec family takes two parameters")
            if min(self.params) <= 0:
                raise DomainError("prelec parameters must be positive")
        else:
            raise SchemaError(f"unknown weighting family {self.family!r}")

    @classmethod
    def linear(cls) -> "WeightingFamily":
        return cls("linear")

    @classmethod
    def tk(cls, gamma: float) -> "WeightingFamily":
        return cls("tk", (gamma,))

    @classmethod
    def prelec(cls, alpha: float, beta: float) -> "WeightingFamily":
        return cls("prelec", (alpha, beta))

    def __call__(self, p: float) -> float:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability {p} outside [0, 1]")
        if p == 0.0:
            return 0.0
        if p == 1.0:
            return 1.0
        if self.family == "linear":
            return p
        if self.family == "tk":
            (gamma,) = self.params
            pg = p**gamma
            return pg / (pg + (1.0 - p) ** gamma) ** (1.0 / gamma)
        alpha, beta = self.params
        return math.exp(-beta * (-math.log(p)) ** alpha)

    def inverse(self, w: float, tol: float = INVERSE_TOL) -> float:
        """Monotone bisection inverse on [0, 1]."""
        if not 0.0 <= w <= 1.0:
            raise DomainError(f"weight {w} outside [0, 1]")
        if self.family == "linear":
            return w
        if w == 0.0:
            return 0.0
        if w == 1.0:
            return 1.0
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            gap = self(mid) - w
            if abs(gap) <= tol or mid == lo or mid == hi:
                return mid
            if gap < 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def to_json(self) -> dict:
        return {"family": self.family, "params": list(self.params)}

    @classmethod
    def from_json(cls, obj) -> "WeightingFamily":
        if isinstance(obj, str):
            return cls(obj)
        if not isinstance(obj, Mapping) or "family" not in obj:
            raise SchemaError('expected weighting as {"family": ..., "params": [...]}')
        return cls(str(obj["family"]), tuple(obj.get("params", ())))


_FIT_STARTS = {
    "tk": [(g,) for g in (0.35, 0.5, 0.61, 0.8, 1.0, 1.3, 1.7, 2.0)],
    "prelec": [
        (a, b) for a in (0.4, 0.7, 1.0, 1.5) for b in (0.5, 1.0, 1.5)
    ],
}
_FIT_BOUNDS = {
    "tk": ([TK_GAMMA_MIN + 1e-9], [TK_GAMMA_MAX]),
    "prelec": ([1e-9, 1e-9], [10.0, 10.0]),
}


@dataclass(frozen=True)
class WeightingFit:
    weighting: WeightingFamily
    residual: float
    constrained: bool = False


def fit_w(
    samples: Sequence[tuple[float, float]], family: str
) -> WeightingFit:
    """Least-squares fit of a weighting family to (probability, weight) pairs.

    Deterministic: a fixed multi-start grid feeds a damped Gauss-Newton
    refinement, and the best residual wins. Solutions pinned to the edge of
    the admissible box are flagged.
    """
    pts = [(float(p), float(w)) for p, w in samples]
    for p, w in pts:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"sample probability {p} outside [0, 1]")
    if family == "linear":
        w = WeightingFamily.linear()
        residual = sum((w(p) - v) ** 2 for p, v in pts)
        return WeightingFit(w, residual)
    if family not in _FIT_STARTS:
        raise SchemaError(f"unknown weighting family {family!r}")
    n_params = len(_FIT_STARTS[family][0])
    if len(pts) < n_params:
        raise DomainError(
            f"need at least {n_params} samples to fit the {family} family"
        )
    ps = np.array([p for p, _ in pts])
    ws = np.array([v for _, v in pts])
    lo, hi = _FIT_BOUNDS[family]

    def residuals(theta):
        fam = WeightingFamily(family, tuple(theta))
        return np.array([fam(p) for p in ps]) - ws

    best = None
    for start in _FIT_STARTS[family]:
        sol = least_squares(
            residuals,
            np.clip(start, lo, hi),
            bounds=(lo, hi),
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        cost = float(np.sum(sol.fun**2))
        if best is None or cost < best[0] - 1e-18:
            best = (cost, tuple(float(t) for t in sol.x))
    cost, params = best
    at_edge = any(
        abs(t - a) <= 1e-9 or abs(t - b) <= 1e-9
        for t, a, b in zip(params, lo, hi)
    )
    return WeightingFit(WeightingFamily(family, params), cost, constrained=at_edge)


def debias(W: CapacityTable, weighting: WeightingFamily) -> CapacityTable:
    """Divide the weighting distortion out of measured decision weights.

    Returns the corrected judgment phi with phi(A) = w^-1(W(A)), still a
    table over events.
    """
    values = {
        members: weighting.inverse(v) for members, v in W.values.items()
    }
    return CapacityTable(W.space, values)


# --- additivity reports -------------------------------------------------------


def _disjoint_union(a: Event, b: Event) -> Event:
    if a.members & b.members:
        raise DomainError(
            f"events {sorted(a.members)} and {sorted(b.members)} are not disjoint"
        )
    return Event(a.space, a.members | b.members)


def additivity_report(
    table: CapacityTable,
    pairs: Sequence[tuple[Event, Event]] = (),
    chains: Sequence[Sequence[Sequence[Event]]] = (),
    tol: float = 1e-9,
) -> dict:
    """Classify disjoint pairs and follow the subadditivity gap along chains.

    For a disjoint pair the signed gap is value(A) + value(B) - value(A u B);
    positive means SUBADDITIVE, negative SUPERADDITIVE. A chain is a list of
    partitions of one base event, coarsest first; for each partition the
    report gives D(n) = sum of part values minus the value of the union, and
    whether D is nondecreasing along the chain.
    """
    pair_rows = []
    for a, b in pairs:
        union = _disjoint_union(a, b)
        gap = table.value(a) + table.value(b) - table.value(union)
        if gap > tol:
            kind = "SUBADDITIVE"
        elif gap < -tol:
            kind = "SUPERADDITIVE"
        else:
            kind = "ADDITIVE"
        pair_rows.append(
            {
                "a": sorted(a.members, key=table.space.index),
                "b": sorted(b.members, key=table.space.index),
                "gap": gap,
                "classification": kind,
            }
        )
    chain_rows = []
    for chain in chains:
        gaps = []
        sizes = []
        for partition in chain:
            parts = list(partition)
            if not parts:
                raise DomainError("empty partition in a refinement chain")
            union = parts[0]
            for ev in parts[1:]:
                union = _disjoint_union(union, ev)
            gaps.append(sum(table.value(ev) for ev in parts) - table.value(union))
            sizes.append(len(parts))
        nondecreasing = all(b >= a - tol for a, b in zip(gaps, gaps[1:]))
        chain_rows.append({"sizes": sizes, "D": gaps, "nondecreasing": nondecreasing})
    return {"pairs": pair_rows, "chains": chain_rows}


# --- belief functions ---------------------------------------------------------


@dataclass(frozen=True)
class MassFunction:
    """A Dempster-Shafer mass assignment over subsets of a small frame.

    Focal sets are stored as bitmasks over the disease index order; the frame
    is capped at 12 elements so combination stays exact and fast.
    """

    space: DiseaseSpace
    masses: Mapping[int, float]

    def __post_init__(self):
        if self.space.size > MAX_FRAME_SIZE:
            raise DomainError(
                f"mass functions support frames up to {MAX_FRAME_SIZE} elements"
            )
        cleaned: dict[int, float] = {}
        for mask, m in self.masses.items():
            m = float(m)
            if m < 0:
                raise DomainError("masses must be nonnegative")
            if not 0 <= mask < (1 << self.space.size):
                raise SchemaError(f"focal bitmask {mask} out of range for the frame")
            if m == 0.0:
                continue
            if mask == 0:
                raise DomainError("the empty set cannot carry mass")
            cleaned[mask] = cleaned.get(mask, 0.0) + m
        if abs(sum(cleaned.values()) - 1.0) > 1e-9:
            raise DomainError("masses must sum to 1 within 1e-9")
        object.__setattr__(self, "masses", cleaned)

    @classmethod
    def vacuous(cls, space: DiseaseSpace) -> "MassFunction":
        return cls(space, {(1 << space.size) - 1: 1.0})

    @classmethod
    def from_events(
        cls, space: DiseaseSpace, assignment: Mapping[frozenset, float]
    ) -> "MassFunction":
        masses: dict[int, float] = {}
        for members, m in assignment.items():
            ev = Event(space, frozenset(members))
            mask = 0
            for i in ev.indices():
                mask |= 1 << i
            masses[mask] = masses.get(mask, 0.0) + float(m)
        return cls(space, masses)

    @classmethod
    def simple_support(
        cls, space: DiseaseSpace, label: str, weight: float
    ) -> "MassFunction":
        """All mass split between one singleton and the whole frame."""
        if not 0.0 <= weight <= 1.0:
            raise DomainError("support weight must lie in [0, 1]")
        full = (1 << space.size) - 1
        mask = 1 << space.index(label)
        if weight == 1.0:
            return cls(space, {mask: 1.0})
        return cls(space, {mask: weight, full: 1.0 - weight})

    def event_mask(self, event: Event) -> int:
        mask = 0
        for i in event.indices():
            mask |= 1 << i
        return mask

    def mass_of(self, event: Event) -> float:
        return self.masses.get(self.event_mask(event), 0.0)


def bel_pl(mass: MassFunction, event: Event) -> tuple[float, float]:
    """Belief (mass fully inside the event) and plausibility (mass touching it)."""
    if event.space != mass.space:
        raise SchemaError("event and mass function must share a frame")
    target = mass.event_mask(event)
    bel = 0.0
    pl = 0.0
    for focal, m in mass.masses.items():
        if focal & ~target == 0:
            bel += m
        if focal & target:
            pl += m
    return bel, pl


def dempster_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Dempster's rule: conflict-renormalized intersection of focal sets."""
    if m1.space != m2.space:
        raise SchemaError("mass functions must share a frame")
    raw: dict[int, float] = {}
    conflict = 0.0
    for a, ma in m1.masses.items():
        for b, mb in m2.masses.items():
            inter = a & b
            product = ma * mb
            if inter == 0:
                conflict += product
            else:
                raw[inter] = raw.get(inter, 0.0) + product
    if 1.0 - conflict <= 0.0 or not raw:
        raise DomainError("total conflict: the mass functions share no focal overlap")
    # normalize by the surviving mass itself (equal to 1 - K up to rounding)
    # so iterated combination cannot drift off the simplex
    norm = sum(raw.values())
    return MassFunction(m1.space, {k: v / norm for k, v in raw.items()})


# --- degeneracy experiment ------------------------------------------------------


@dataclass(frozen=True)
class StreamSpec:
    """Observation stream: singletons drawn from q, asserted with support mu."""

    singleton_weights: tuple[float, ...]
    support: float

    def __post_init__(self):
        weights = tuple(float(w) for w in self.singleton_weights)
        object.__setattr__(self, "singleton_weights", weights)
        object.__setattr__(self, "support", float(self.support))
        if abs(sum(weights) - 1.0) > 1e-9 or min(weights) < 0:
            raise DomainError("singleton weights must form a simplex")
        if not 0.0 < self.support <= 1.0:
            raise DomainError("support must lie in (0, 1]")


@dataclass
class TrajectoryResult:
    """Per-step singleton trajectories of bel, pl, the additive posterior,
    and the corrected judgment, plus any skipped total-conflict steps."""

    space: DiseaseSpace
    rows: list[tuple[int, str, str, float]] = field(default_factory=list)
    conflicts: list[int] = field(default_factory=list)

    def final(self, measure: str) -> dict[str, float]:
        out: dict[str, float] = {}
        for step, kind, disease, value in self.rows:
            if kind == measure:
                out[disease] = value
        return out

    def series(self, measure: str, disease: str) -> list[float]:
        return [
            v for _, kind, d, v in self.rows if kind == measure and d == disease
        ]

    def write_csv(self, fh) -> None:
        fh.write("step,measure,disease,value\n")
        for step, measure, disease, value in self.rows:
            fh.write(f"{step},{measure},{disease},{value!r}\n")


MAX_EXPERIMENT_STEPS = 10_000


def degeneracy_experiment(
    space: DiseaseSpace,
    stream: StreamSpec,
    steps: int,
    seed: int,
    lam: float = 1.0,
    weighting: WeightingFamily | None = None,
) -> TrajectoryResult:
    """Iterated Dempster combination next to additive updating, same stream.

    Each step asserts one drawn singleton as a simple-support mass and folds
    it in with Dempster's rule; singleton beliefs head for 0 or 1. The same
    observation also updates a uniform-prior mixing model, whose posterior
    (and its weighting-corrected readout phi) stays interior when the stream
    does not discriminate. Step 0 records the uninformed starting point.
    """
    if len(stream.singleton_weights) != space.size:
        raise SchemaError("stream weights must match the frame size")
    if not 0 <= steps <= MAX_EXPERIMENT_STEPS:
        raise DomainError(f"steps must lie in [0, {MAX_EXPERIMENT_STEPS}]")
    weighting = weighting or WeightingFamily.tk(0.61)
    rng = np.random.default_rng(seed)
    model = CarnapModel.uniform(space.size, lam, horizon=max(3, steps))
    result = TrajectoryResult(space)
    combined = MassFunction.vacuous(space)
    observed: list[str] = []

    def record(step: int) -> None:
        posterior = predictive(
            model, Evidence(space, tuple(observed)) if observed else None
        )
        for i, label in enumerate(space.labels):
            singleton = space.event([label])
            bel, pl = bel_pl(combined, singleton)
            phi = weighting.inverse(weighting(posterior[i]))
            result.rows.append((step, "bel", label, bel))
            result.rows.append((step, "pl", label, pl))
            result.rows.append((step, "carnap", label, posterior[i]))
            result.rows.append((step, "phi", label, phi))

    record(0)
    for step in range(1, steps + 1):
        drawn = space.labels[
            int(rng.choice(space.size, p=stream.singleton_weights))
        ]
        observed.append(drawn)
        support = MassFunction.simple_support(space, drawn, stream.support)
        try:
            combined = dempster_combine(combined, support)
        except DomainError:
            result.conflicts.append(step)
        record(step)
    return result
