"""Utility elicitation from indifferences and its consistency checks.

The central device is the revealed tradeoff relation: two observed
indifferences that differ only in the outcomes placed on one nonnull event
pin down an equality of utility differences. Chaining such equalities
yields a standard sequence (outcomes equally spaced in utility), the
sequence yields a utility curve, and the curve turns binary-bet certainty
equivalents into subjective probabilities. If two elicitations pin down
incompatible utility differences, no expected-utility representation
exists; the detector below hunts for exactly that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    Act,
    DomainError,
    Event,
    Evidence,
    NumericalError,
    TruncationError,
    binary_act,
    splice,
)
from .agents import ActTemplate, indifference_point
from .utility import UtilityCurve

NULL_TOL = 1e-12
EQUIV_TOL = 1e-9
#: Outcome gap above which two elicited alphas count as contradictory.
VIOLATION_TOL = 1e-7


@dataclass(frozen=True)
class TradeoffRecord:
    """Two indifferences revealing that alpha over beta matches gamma over delta.

    The underlying observations are splice(f, A, alpha) ~ splice(g, A, beta)
    and splice(f, A, gamma) ~ splice(g, A, delta) for the nonnull event A.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    event: Event
    f: Act
    g: Act
    evidence: Evidence | None = None

    def equivalences(self) -> tuple[tuple[Act, Act], tuple[Act, Act]]:
        first = (
            splice(self.f, self.event, self.alpha),
            splice(self.g, self.event, self.beta),
        )
        second = (
            splice(self.f, self.event, self.gamma),
            splice(self.g, self.event, self.delta),
        )
        return first, second


@dataclass(frozen=True)
class TradeoffPair:
    """An entry of the revealed tradeoff relation, with provenance."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    event_members: tuple[str, ...] = ()
    evidence: tuple[str, ...] = ()


@dataclass(frozen=True)
class StandardSequence:
    """Outcomes equally spaced in utility, elicited against fixed gauges."""

    points: tuple[float, ...]
    gauges: tuple[float, float]
    event: Event

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        object.__setattr__(
            self, "gauges", (float(self.gauges[0]), float(self.gauges[1]))
        )
        if len(self.points) < 2:
            raise DomainError("a standard sequence needs at least two points")

    @property
    def steps(self) -> int:
        return len(self.points) - 1


def is_null(source, event: Event, evidence: Evidence | None = None,
            tol: float = NULL_TOL) -> bool:
    """Does splicing different levels on the event ever change anything?

    With an agent, compare the certainty equivalents of the bets paying the
    top stake versus nothing on the event. With a preference table, look for
    a strict preference between acts differing only on the event; absent a
    witness the event counts as null.
    """
    if event.is_empty:
        return True
    if hasattr(source, "certainty_equivalent"):
        interval = source.interval
        stake = interval.hi if interval.hi > 0 else interval.lo
        high = binary_act(event, stake, interval)
        low = binary_act(event, 0.0, interval)
        ce_high = source.certainty_equivalent(high, evidence)
        ce_low = source.certainty_equivalent(low, evidence)
        return abs(ce_high - ce_low) <= tol
    return not source.has_strict_witness(event)


def elicit_standard_sequence(
    agent,
    event: Event,
    gauges: tuple[float, float],
    start: float,
    steps: int,
    evidence: Evidence | None = None,
) -> StandardSequence:
    """Chain indifferences into a sequence climbing in equal utility steps.

    Each new point solves: the new level on the event with the low gauge off
    it is indifferent to the previous level with the high gauge off it. If a
    solution leaves the outcome interval the elicitation stops with a
    truncation error carrying the points found so far.
    """
    g, G = float(gauges[0]), float(gauges[1])
    interval = agent.interval
    if g > G:
        raise DomainError("gauges must satisfy g <= G")
    interval.require(g, "low gauge")
    interval.require(G, "high gauge")
    interval.require(start, "sequence start")
    if steps < 1:
        raise DomainError("need at least one elicitation step")
    if is_null(agent, event, evidence):
        raise DomainError("cannot elicit on a null event")

    template = ActTemplate(
        splice(Act.constant(agent.space, interval, g), event, start), event
    )
    points = [float(start)]
    for _ in range(steps):
        target = splice(Act.constant(agent.space, interval, G), event, points[-1])
        try:
            nxt = indifference_point(agent, template, target, evidence)
        except NumericalError:
            raise TruncationError(
                f"standard sequence left the outcome interval after "
                f"{len(points) - 1} of {steps} steps",
                tuple(points),
            ) from None
        points.append(nxt)
    return StandardSequence(tuple(points), (g, G), event)


def utility_from_sequence(seq: StandardSequence) -> UtilityCurve:
    """Interpolate a normalized utility curve through sequence knots.

    The first point gets utility 0 and the last utility 1; intermediate
    knots sit at k/m. The normalization is the interval-scale choice and
    carries no content.
    """
    points = seq.points
    if any(b <= a for a, b in zip(points, points[1:])):
        raise DomainError(
            "standard sequence is not strictly increasing; cannot build a curve"
        )
    m = len(points) - 1
    return UtilityCurve(points, tuple(k / m for k in range(m + 1)))


def tradeoff_pairs(
    records: Iterable[TradeoffRecord],
    agent=None,
    tol: float = EQUIV_TOL,
) -> list[TradeoffPair]:
    """Extract the revealed tradeoff relation from certified records.

    With an agent the two claimed indifferences of every record are
    re-verified against its values and the event's nullity is probed;
    without one the records are trusted, but structurally empty events are
    still rejected.
    """
    pairs = []
    for rec in records:
        if rec.event.is_empty:
            raise DomainError("tradeoff records need a nonnull event; got the empty event")
        if agent is not None:
            if is_null(agent, rec.event, rec.evidence):
                raise DomainError(
                    f"event {sorted(rec.event.members)} is null for this agent"
                )
            for left, right in rec.equivalences():
                gap = agent.value(left, rec.evidence) - agent.value(right, rec.evidence)
                if abs(gap) > tol:
                    raise DomainError(
                        f"record equivalence fails against the agent (gap {gap:.3e})"
                    )
        pairs.append(
            TradeoffPair(
                rec.alpha,
                rec.beta,
                rec.gamma,
                rec.delta,
                rec.event.sorted_members(),
                rec.evidence.observations if rec.evidence else (),
            )
        )
    return pairs


def detect_tradeoff_inconsistency(
    pairs: Sequence[TradeoffPair], tol: float = VIOLATION_TOL
) -> list[dict]:
    """Find pairs revealing different alphas for the same (beta, gamma, delta).

    Under expected utility the alpha in a revealed tradeoff is pinned down
    uniquely, so any two entries agreeing on (beta, gamma, delta) but not on
    alpha are contradictory. Violations come back sorted with the widest
    outcome gap first, each tagged with the direction of the discrepancy.
    """
    by_key: dict[tuple[float, float, float], list[TradeoffPair]] = {}
    for pair in pairs:
        by_key.setdefault((pair.beta, pair.gamma, pair.delta), []).append(pair)
    violations = []
    for (beta, gamma, delta), group in by_key.items():
        for i, a in enumerate(group):
            for b in group[i + 1 :]:
                gap = b.alpha - a.alpha
                if abs(gap) > tol:
                    violations.append(
                        {
                            "code": "TC-VIOLATION",
                            "alpha": a.alpha,
                            "alpha_prime": b.alpha,
                            "beta": beta,
                            "gamma": gamma,
                            "delta": delta,
                            "gap": abs(gap),
                            "direction": "above" if gap > 0 else "below",
                            "events": [list(a.event_members), list(b.event_members)],
                        }
                    )
    violations.sort(key=lambda v: -v["gap"])
    return violations


def probe_tradeoff_records(
    agent,
    events: Sequence[Event] | None = None,
    levels: int = 8,
    gauge_positions: tuple[int, ...] = (1, 6),
    evidence: Evidence | None = None,
) -> list[TradeoffRecord]:
    """Deterministic probe battery for the inconsistency detector.

    Levels form a uniform interior grid of the outcome interval. For every
    event, gauge level, and (beta, gamma, delta) combination the battery
    solves two indifferences: one fixing the off-event gauge act, one
    producing the alpha that the revealed relation ties to (beta, gamma,
    delta). Identical (beta, gamma, delta) keys across events and gauges
    then feed the detector. Probes with no solution inside the interval are
    skipped.
    """
    interval = agent.interval
    space = agent.space
    if events is None:
        events = [space.event([space.labels[0]]), space.event([space.labels[1]])]
    grid = [
        interval.lo + (interval.hi - interval.lo) * (k + 1) / (levels + 1)
        for k in range(levels)
    ]
    gauge_levels = [grid[min(i, levels - 1)] for i in gauge_positions]
    records = []
    for event in events:
        if is_null(agent, event, evidence):
            continue
        off = event.complement()
        for y_g in gauge_levels:
            g_act = Act.constant(space, interval, y_g)
            for k in range(levels - 1):
                delta, gamma = grid[k], grid[k + 1]
                # pin the off-event side of f: (gamma on A, y_f off) ~ (delta on A, y_g off)
                try:
                    y_f = indifference_point(
                        agent,
                        ActTemplate(splice(g_act, event, gamma), off),
                        splice(g_act, event, delta),
                        evidence,
                    )
                except (NumericalError, DomainError):
                    continue
                f_act = Act.constant(space, interval, y_f)
                for beta in grid:
                    # reveal alpha: (alpha on A, y_f off) ~ (beta on A, y_g off)
                    try:
                        alpha = indifference_point(
                            agent,
                            ActTemplate(f_act, event),
                            splice(g_act, event, beta),
                            evidence,
                        )
                    except (NumericalError, DomainError):
                        continue
                    records.append(
                        TradeoffRecord(
                            alpha, beta, gamma, delta, event, f_act, g_act, evidence
                        )
                    )
    return records


def probability_from_exchange(
    source,
    utility,
    event: Event,
    evidence: Evidence | None = None,
    stake: float | None = None,
) -> float:
    """Subjective probability from the utility exchange rate on a binary bet.

    From the equivalence of the bet (event: stake) with a sure outcome c,
    the probability is the ratio of utility gains (U(c) - U(0)) over
    (U(stake) - U(0)). ``source`` is either an agent, which is probed for
    c, or an observed (stake, c) pair.
    """
    if hasattr(source, "certainty_equivalent"):
        interval = source.interval
        if stake is None:
            stake = interval.hi if interval.hi > 0 else interval.lo
        ce = source.certainty_equivalent(
            binary_act(event, stake, interval), evidence
        )
    else:
        stake, ce = source
    u0 = utility(0.0)
    denom = utility(stake) - u0
    if abs(denom) < 1e-15:
        raise DomainError(f"degenerate gauge: stake {stake} has zero utility range")
    return (utility(ce) - u0) / denom


# --- preference tables and ordering axioms -------------------------------------

_RELS = ("<", "=", ">")


@dataclass
class PreferenceTable:
    """A finite table of pairwise preferences over listed acts."""

    acts: list[Act]
    relations: dict[tuple[int, int], str]

    def __post_init__(self):
        n = len(self.acts)
        for (i, j), rel in self.relations.items():
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise DomainError(f"bad act pair ({i}, {j}) in preference table")
            if rel not in _RELS:
                raise DomainError(f"unknown relation {rel!r}; use one of {_RELS}")

    def relation(self, i: int, j: int) -> str | None:
        if (i, j) in self.relations:
            return self.relations[(i, j)]
        if (j, i) in self.relations:
            return {"<": ">", ">": "<", "=": "="}[self.relations[(j, i)]]
        return None

    def weakly_prefers(self, i: int, j: int) -> bool:
        return self.relation(i, j) in (">", "=")

    def strictly_prefers(self, i: int, j: int) -> bool:
        return self.relation(i, j) == ">"

    def has_strict_witness(self, event: Event) -> bool:
        """A strict preference between acts differing only on the event."""
        off = [
            idx
            for idx in range(event.space.size)
            if event.space.labels[idx] not in event.members
        ]
        for (i, j), rel in self.relations.items():
            if rel == "=":
                continue
            a, b = self.acts[i], self.acts[j]
            if all(a.values[k] == b.values[k] for k in off):
                return True
        return False


def preference_table_from_agent(
    agent, acts: Sequence[Act], evidence: Evidence | None = None
) -> PreferenceTable:
    """Complete pairwise table induced by the agent's certainty equivalents."""
    ces = [agent.certainty_equivalent(act, evidence) for act in acts]
    relations = {}
    for i in range(len(acts)):
        for j in range(i + 1, len(acts)):
            if ces[i] > ces[j]:
                relations[(i, j)] = ">"
            elif ces[i] < ces[j]:
                relations[(i, j)] = "<"
            else:
                relations[(i, j)] = "="
    return PreferenceTable(list(acts), relations)


def check_order_axioms(table: PreferenceTable) -> dict:
    """Audit a preference table for ordering failures.

    Reports incomparable pairs (incompleteness), preference cycles through
    any triple of acts, and strict preferences that contradict pointwise
    dominance. An empty violation list certifies the probe set.
    """
    n = len(table.acts)
    violations: list[dict] = []

    for i in range(n):
        for j in range(i + 1, n):
            if table.relation(i, j) is None:
                violations.append({"code": "INCOMPLETE", "acts": [i, j]})

    seen_cycles = set()
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if len({i, j, k}) != 3:
                    continue
                if table.weakly_prefers(i, j) and table.weakly_prefers(j, k):
                    if table.strictly_prefers(k, i):
                        cycle = frozenset((i, j, k))
                        if cycle not in seen_cycles:
                            seen_cycles.add(cycle)
                            violations.append(
                                {"code": "TRANS-CYCLE", "acts": sorted(cycle)}
                            )

    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if table.acts[i].dominates(table.acts[j]) and table.strictly_prefers(j, i):
                violations.append({"code": "MONO-VIOLATION", "acts": [i, j]})

    return {
        "violations": violations,
        "complete": not any(v["code"] == "INCOMPLETE" for v in violations),
        "transitive": not any(v["code"] == "TRANS-CYCLE" for v in violations),
        "monotone": not any(v["code"] == "MONO-VIOLATION" for v in violations),
        # continuity of preference cannot be decided from a finite table
        "continuity": "untestable",
    }
