"""Simulated preference oracles answering certainty-equivalent queries.

Every agent exposes the same query surface: ``value(act, evidence)``,
``certainty_equivalent(act, evidence)``, and a ``predictive(evidence)``
simplex where one exists. Agents are immutable and queries are pure, so
batteries of probes can run concurrently without locks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import (
    Act,
    DiseaseSpace,
    DomainError,
    Event,
    Evidence,
    NumericalError,
    OutcomeInterval,
    SchemaError,
    interval_from_json,
    space_from_json,
    splice,
)
from .carnap import CarnapModel, predictive, sequence_probability
from .nonadditive import CapacityTable
from .utility import LinearUtility, utility_from_json

#: Value-gap tolerance and iteration cap for the indifference bisection.
VALUE_TOL = 1e-12
BISECT_MAX_ITER = 200


def _check_act(agent, act: Act) -> None:
    if act.space != agent.space:
        raise DomainError("act is not over the agent's disease space")
    if act.interval != agent.interval:
        raise DomainError("act is not over the agent's outcome interval")


def _expected_utility(probs: Sequence[float], utility, act: Act) -> float:
    return sum(p * utility(x) for p, x in zip(probs, act.values))


@dataclass(frozen=True)
class SEUAgent:
    """Expected-utility maximizer with fixed subjective probabilities.

    Evidence is accepted and ignored: the probabilities do not move.
    """

    space: DiseaseSpace
    interval: OutcomeInterval
    probabilities: tuple[float, ...]
    utility: object = field(default_factory=LinearUtility)

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        if len(probs) != self.space.size:
            raise SchemaError("probability vector must match the disease space")
        if min(probs) < 0:
            raise DomainError("probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > 1e-9:
            raise DomainError("probabilities must sum to 1 within 1e-9")

    def predictive(self, evidence: Evidence | None = None) -> tuple[float, ...]:
        return self.probabilities

    def value(self, act: Act, evidence: Evidence | None = None) -> float:
        _check_act(self, act)
        return _expected_utility(self.probabilities, self.utility, act)

    def certainty_equivalent(self, act: Act, evidence: Evidence | None = None) -> float:
        return self.utility.inverse(self.value(act, evidence))


@dataclass(frozen=True)
class CarnapAgent:
    """Expected-utility agent whose probabilities follow the mixing rule.

    The utility is a fixed field, so it is identical under every body of
    evidence by construction.
    """

    space: DiseaseSpace
    interval: OutcomeInterval
    model: CarnapModel
    utility: object = field(default_factory=LinearUtility)

    def __post_init__(self):
        if self.model.size != self.space.size:
            raise SchemaError("model prior must match the disease space")

    def predictive(self, evidence: Evidence | None = None) -> tuple[float, ...]:
        return predictive(self.model, evidence)

    def value(self, act: Act, evidence: Evidence | None = None) -> float:
        _check_act(self, act)
        return _expected_utility(self.predictive(evidence), self.utility, act)

    def certainty_equivalent(self, act: Act, evidence: Evidence | None = None) -> float:
        return self.utility.inverse(self.value(act, evidence))


@dataclass(frozen=True)
class ChoquetAgent:
    """Rank-dependent agent over a complete capacity; the non-EU foil.

    General acts are valued by the Choquet integral: outcomes sorted from
    best to worst, each utility increment weighted by the capacity of the
    set of diseases doing at least that well. Binary bets reduce to
    W(A) * U(x) for curves anchored at U(0) = 0. No updating rule is
    defined, so queries must be unconditional.
    """

    space: DiseaseSpace
    interval: OutcomeInterval
    capacity: CapacityTable
    utility: object = field(default_factory=LinearUtility)

    def __post_init__(self):
        if self.capacity.space != self.space:
            raise SchemaError("capacity must be over the agent's disease space")
        n = self.space.size
        if len(self.capacity.values) != 1 << n:
            raise DomainError("a Choquet agent needs the capacity of every event")
        # the table itself validates the endpoint values once they are listed
        self.capacity.value(self.space.empty_event())
        self.capacity.value(self.space.full_event())
        if self.capacity.monotonicity_violations():
            raise DomainError("a Choquet agent's capacity must be monotone")

    def _no_evidence(self, evidence: Evidence | None) -> None:
        if evidence is not None and evidence.total > 0:
            raise DomainError(
                "Choquet agents answer unconditional queries only; "
                "no updating rule is defined for them"
            )

    def value(self, act: Act, evidence: Evidence | None = None) -> float:
        _check_act(self, act)
        self._no_evidence(evidence)
        utilities = [self.utility(x) for x in act.values]
        # best outcome first; ties broken by disease index for determinism
        order = sorted(range(self.space.size), key=lambda i: (-utilities[i], i))
        total = 0.0
        prev_weight = 0.0
        members: set[str] = set()
        for i in order:
            members.add(self.space.labels[i])
            weight = self.capacity.value(Event(self.space, frozenset(members)))
            total += utilities[i] * (weight - prev_weight)
            prev_weight = weight
        return total

    def certainty_equivalent(self, act: Act, evidence: Evidence | None = None) -> float:
        return self.utility.inverse(self.value(act, evidence))


@dataclass(frozen=True)
class UrnAgent:
    """Sampling without replacement: negatively related observations.

    Tickets per disease are fixed; conditional probabilities are the
    remaining ticket fractions, so an extra observation of a disease makes
    it less likely next time.
    """

    space: DiseaseSpace
    interval: OutcomeInterval
    tickets: tuple[int, ...]
    utility: object = field(default_factory=LinearUtility)

    def __post_init__(self):
        tickets = tuple(int(k) for k in self.tickets)
        object.__setattr__(self, "tickets", tickets)
        if len(tickets) != self.space.size:
            raise SchemaError("ticket counts must match the disease space")
        if min(tickets) < 1:
            raise DomainError("every disease needs a positive ticket count")

    def predictive(self, evidence: Evidence | None = None) -> tuple[float, ...]:
        if evidence is None:
            evidence = Evidence.empty(self.space)
        n = evidence.counts()
        for k, drawn, label in zip(self.tickets, n, self.space.labels):
            if drawn > k:
                raise DomainError(
                    f"evidence draws {drawn} tickets for {label!r} but only {k} exist"
                )
        remaining = sum(self.tickets) - evidence.total
        if remaining <= 0:
            raise DomainError("the urn is exhausted; no further draw to predict")
        return tuple(
            (k - drawn) / remaining for k, drawn in zip(self.tickets, n)
        )

    def value(self, act: Act, evidence: Evidence | None = None) -> float:
        _check_act(self, act)
        return _expected_utility(self.predictive(evidence), self.utility, act)

    def certainty_equivalent(self, act: Act, evidence: Evidence | None = None) -> float:
        return self.utility.inverse(self.value(act, evidence))


@dataclass(frozen=True)
class MixtureAgent:
    """Two latent mixing models behind one predictive: a common cause.

    Component weights are reweighted by each component's chain-rule
    probability of the evidence, then the component posteriors are mixed.
    With identical components this collapses to a single mixing model.
    """

    space: DiseaseSpace
    interval: OutcomeInterval
    components: tuple[CarnapModel, CarnapModel]
    weights: tuple[float, float]
    utility: object = field(default_factory=LinearUtility)

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(self.components) != 2 or len(weights) != 2:
            raise SchemaError("a mixture agent takes exactly two components")
        for model in self.components:
            if model.size != self.space.size:
                raise SchemaError("component priors must match the disease space")
        if min(weights) < 0 or abs(sum(weights) - 1.0) > 1e-9:
            raise DomainError("mixture weights must form a 2-simplex")

    def posterior_weights(self, evidence: Evidence | None = None) -> tuple[float, float]:
        if evidence is None or evidence.total == 0:
            return self.weights
        likes = [
            w * sequence_probability(model, evidence)
            for w, model in zip(self.weights, self.components)
        ]
        total = sum(likes)
        if total <= 0:
            raise DomainError("evidence has zero probability under both components")
        return tuple(l / total for l in likes)

    def predictive(self, evidence: Evidence | None = None) -> tuple[float, ...]:
        weights = self.posterior_weights(evidence)
        posts = [predictive(model, evidence) for model in self.components]
        return tuple(
            weights[0] * a + weights[1] * b for a, b in zip(*posts)
        )

    def value(self, act: Act, evidence: Evidence | None = None) -> float:
        _check_act(self, act)
        return _expected_utility(self.predictive(evidence), self.utility, act)

    def certainty_equivalent(self, act: Act, evidence: Evidence | None = None) -> float:
        return self.utility.inverse(self.value(act, evidence))


# --- query operations --------------------------------------------------------


def seu_value(agent, act: Act) -> float:
    """Probability-weighted utility of an act under the agent's prior view."""
    return agent.value(act)


def certainty_equivalent(agent, act: Act, evidence: Evidence | None = None) -> float:
    """The sure outcome the agent finds exactly as good as the act."""
    return agent.certainty_equivalent(act, evidence)


@dataclass(frozen=True)
class ActTemplate:
    """An act with one free outcome slot covering an event."""

    base: Act
    free_event: Event

    def __post_init__(self):
        if self.free_event.space != self.base.space:
            raise DomainError("template event must be over the act's disease space")

    def fill(self, level: float) -> Act:
        return splice(self.base, self.free_event, level)


def indifference_point(
    agent,
    template: ActTemplate,
    target: Act,
    evidence: Evidence | None = None,
    value_tol: float = VALUE_TOL,
    max_iter: int = BISECT_MAX_ITER,
) -> float:
    """Free-outcome level making the template act indifferent to the target.

    Monotone bisection over the outcome interval; the agent's value must be
    increasing in the free outcome, which holds whenever the free event is
    nonnull.
    """
    interval = agent.interval
    goal = agent.value(target, evidence)

    def gap(x: float) -> float:
        return agent.value(template.fill(x), evidence) - goal

    lo, hi = interval.lo, interval.hi
    g_lo, g_hi = gap(lo), gap(hi)
    span = abs(g_hi - g_lo)
    if span <= 1e-14 * max(1.0, abs(g_lo), abs(g_hi)):
        raise DomainError(
            "degenerate template: the free slot covers only null events"
        )
    if abs(g_lo) <= value_tol:
        return lo
    if abs(g_hi) <= value_tol:
        return hi
    if (g_lo < 0) == (g_hi < 0):
        raise NumericalError(
            "no indifference point in the outcome interval; widen the gauges"
        )
    # run to float collapse rather than stopping at the tolerance: chained
    # elicitations feed each answer into the next target, so per-step error
    # must stay near one ulp
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        g_mid = gap(mid)
        if (g_mid < 0) == (g_lo < 0):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    return lo if abs(g_lo) <= abs(g_hi) else hi


# --- JSON loading --------------------------------------------------------------


def agent_from_json(obj):
    """Build an agent from its JSON spec; ``kind`` selects the family."""
    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise SchemaError('expected agent spec with a "kind" field')
    kind = str(obj["kind"]).lower()
    space = space_from_json(obj)
    interval = interval_from_json(obj.get("interval"))
    utility = (
        utility_from_json(obj["utility"], interval)
        if "utility" in obj
        else LinearUtility()
    )
    if kind == "seu":
        if "probabilities" not in obj:
            raise SchemaError('seu agent needs "probabilities"')
        return SEUAgent(space, interval, tuple(obj["probabilities"]), utility)
    if kind == "carnap":
        if "model" not in obj:
            raise SchemaError('carnap agent needs a "model" object')
        return CarnapAgent(space, interval, CarnapModel.from_json(obj["model"]), utility)
    if kind == "choquet":
        if "capacity" not in obj:
            raise SchemaError('choquet agent needs a "capacity" list')
        table = CapacityTable.from_json({"capacity": obj["capacity"]}, space)
        return ChoquetAgent(space, interval, table, utility)
    if kind == "urn":
        if "tickets" not in obj:
            raise SchemaError('urn agent needs "tickets"')
        return UrnAgent(space, interval, tuple(obj["tickets"]), utility)
    if kind == "mixture":
        if "components" not in obj or "weights" not in obj:
            raise SchemaError('mixture agent needs "components" and "weights"')
        components = tuple(CarnapModel.from_json(c) for c in obj["components"])
        return MixtureAgent(space, interval, components, tuple(obj["weights"]), utility)
    raise SchemaError(f"unknown agent kind {kind!r}")
