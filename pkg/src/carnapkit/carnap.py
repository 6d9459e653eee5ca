"""Carnap's inductive updating rule and its decision-level diagnostics.

The rule mixes an interior prior with observed relative frequencies,

    p_i = (lambda * p0_i + n_i) / (lambda + N),

where lambda acts as a hypothetical sample size behind the prior. The
module also provides the executable decision conditions (positive
relatedness, exchangeability, disjoint causality, utility stability) that
jointly single this rule out, and an identification routine that recovers
(lambda, p0) from an agent's conditional preferences alone.

Axiom checks take any agent exposing ``space``, ``interval`` and
``certainty_equivalent(act, evidence)``.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .core import (
    DiseaseSpace,
    DomainError,
    Evidence,
    SchemaError,
    binary_act,
)

#: Priors closer to zero than this are rejected, not clamped.
PRIOR_FLOOR = 1e-12
DEFAULT_HORIZON = 1000
#: Tolerance for CE comparisons in the axiom checks.
CE_TOL = 1e-9


@dataclass(frozen=True)
class CarnapModel:
    """Interior prior simplex plus its strength and an evidence horizon."""

    prior: tuple[float, ...]
    lam: float
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self):
        prior = tuple(float(p) for p in self.prior)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "lam", float(self.lam))
        if len(prior) < 2:
            raise DomainError("prior needs at least two entries")
        if abs(sum(prior) - 1.0) > 1e-9:
            raise DomainError("prior must sum to 1 within 1e-9")
        if min(prior) < PRIOR_FLOOR:
            raise DomainError(
                f"prior entries must be at least {PRIOR_FLOOR} (interior simplex)"
            )
        if self.lam <= 0:
            raise DomainError("lambda must be positive")
        if not isinstance(self.horizon, int) or self.horizon < 3:
            raise DomainError("horizon must be an integer >= 3")

    @property
    def size(self) -> int:
        return len(self.prior)

    @classmethod
    def uniform(cls, size: int, lam: float, horizon: int = DEFAULT_HORIZON) -> "CarnapModel":
        return cls((1.0 / size,) * size, lam, horizon)

    @classmethod
    def from_json(cls, obj) -> "CarnapModel":
        if not isinstance(obj, Mapping) or "prior" not in obj or "lambda" not in obj:
            raise SchemaError('expected model as {"prior": [...], "lambda": x, "horizon": n}')
        try:
            prior = tuple(float(p) for p in obj["prior"])
            lam = float(obj["lambda"])
            horizon = int(obj.get("horizon", DEFAULT_HORIZON))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad model field: {exc}") from exc
        return cls(prior, lam, horizon)

    def to_json(self) -> dict:
        return {"prior": list(self.prior), "lambda": self.lam, "horizon": self.horizon}


@dataclass(frozen=True)
class PosteriorReport:
    """Posterior simplex plus the convex-combination bookkeeping behind it."""

    posterior: tuple[float, ...]
    counts: tuple[float, ...]
    prior_weight: float
    data_weight: float

    def __post_init__(self):
        if abs(sum(self.posterior) - 1.0) > 1e-9:
            raise DomainError("posterior must sum to 1 within 1e-9")
        if min(self.posterior) <= 0:
            raise DomainError("posterior entries must be strictly positive")

    def to_json(self) -> dict:
        return {
            "posterior": list(self.posterior),
            "counts": list(self.counts),
            "weights": {"prior": self.prior_weight, "data": self.data_weight},
        }


def _counts_for(model: CarnapModel, evidence: Evidence) -> tuple[tuple[int, ...], int]:
    if evidence.space.size != model.size:
        raise SchemaError("evidence space does not match the model's prior length")
    n = evidence.counts()
    return n, evidence.total


def update(model: CarnapModel, evidence: Evidence) -> PosteriorReport:
    """Mix the prior with observed frequencies, weights lambda and N."""
    n, total = _counts_for(model, evidence)
    if total > model.horizon:
        raise DomainError(
            f"evidence length {total} exceeds the model horizon {model.horizon}"
        )
    denom = model.lam + total
    posterior = tuple((model.lam * p + k) / denom for p, k in zip(model.prior, n))
    return PosteriorReport(
        posterior=posterior,
        counts=tuple(float(k) for k in n),
        prior_weight=model.lam / denom,
        data_weight=total / denom,
    )


def predictive(model: CarnapModel, evidence: Evidence | None) -> tuple[float, ...]:
    """Posterior simplex, with empty evidence mapping to the prior."""
    if evidence is None or evidence.total == 0:
        return model.prior
    return update(model, evidence).posterior


def sequence_probability(model: CarnapModel, sequence: Evidence) -> float:
    """Chain-rule probability of an observation sequence.

    Each factor is the updated probability given the preceding prefix, so the
    result is invariant under permutation of the sequence.
    """
    if sequence.space.size != model.size:
        raise SchemaError("sequence space does not match the model's prior length")
    if sequence.total > model.horizon:
        raise DomainError(
            f"sequence length {sequence.total} exceeds the model horizon {model.horizon}"
        )
    n = [0] * model.size
    prob = 1.0
    for t, label in enumerate(sequence.observations):
        i = sequence.space.index(label)
        prob *= (model.lam * model.prior[i] + n[i]) / (model.lam + t)
        n[i] += 1
    return prob


def dirichlet_posterior_mean(
    alpha: Sequence[float], counts: Sequence[int]
) -> tuple[float, ...]:
    """Posterior mean of a Dirichlet prior after multinomial counts."""
    alpha = tuple(float(a) for a in alpha)
    if len(alpha) != len(counts):
        raise SchemaError("alpha and counts must have the same length")
    if min(alpha) <= 0:
        raise DomainError("Dirichlet parameters must be strictly positive")
    if min(counts) < 0:
        raise DomainError("counts must be nonnegative")
    denom = sum(alpha) + sum(counts)
    return tuple((a + k) / denom for a, k in zip(alpha, counts))


def combine_evidence(
    model: CarnapModel, bodies: Sequence[tuple[Evidence, float]]
) -> PosteriorReport:
    """Pool evidence bodies, each weighted by its own hypothetical sample size.

    A body's frequencies enter with weight lambda_b regardless of how many raw
    observations produced them; with lambda_b = N_b this reduces to ``update``.
    """
    effective = [0.0] * model.size
    total_weight = 0.0
    for evidence, weight in bodies:
        weight = float(weight)
        if weight < 0:
            raise DomainError("evidence body weights must be nonnegative")
        if weight == 0.0:
            continue
        n, total = _counts_for(model, evidence)
        if total == 0:
            raise DomainError("an evidence body with positive weight is empty")
        for i, k in enumerate(n):
            effective[i] += weight * (k / total)
        total_weight += weight
    denom = model.lam + total_weight
    posterior = tuple(
        (model.lam * p + e) / denom for p, e in zip(model.prior, effective)
    )
    return PosteriorReport(
        posterior=posterior,
        counts=tuple(effective),
        prior_weight=model.lam / denom,
        data_weight=total_weight / denom,
    )


# --- decision conditions ----------------------------------------------------


def _require_room(agent, evidence: Evidence, extra: int) -> None:
    model = getattr(agent, "model", None)
    horizon = getattr(model, "horizon", None)
    if horizon is not None and evidence.total + extra > horizon:
        raise DomainError(
            f"check needs {extra} more observation(s) beyond N={evidence.total}, "
            f"which exceeds the horizon {horizon}"
        )


def check_positive_relatedness(
    agent,
    evidence: Evidence,
    disease: str,
    stake: float = 1.0,
    tol: float = CE_TOL,
) -> bool:
    """Does one more observation of a disease strictly raise its bet's CE?"""
    _require_room(agent, evidence, 1)
    space: DiseaseSpace = agent.space
    bet = binary_act(space.event([disease]), stake, agent.interval)
    before = agent.certainty_equivalent(bet, evidence)
    after = agent.certainty_equivalent(bet, evidence.extended(disease))
    return after - before > tol


class ExchangeabilityResult(NamedTuple):
    y: float
    y_prime: float
    passed: bool


def check_exchangeability(
    agent,
    evidence: Evidence,
    pair: tuple[str, str],
    stake: float = 1.0,
    tol: float = CE_TOL,
) -> ExchangeabilityResult:
    """Compare the two-step bets "first i then j" and "first j then i".

    Each side chains two certainty equivalents: the value of a unit bet on the
    second disease after a hypothetical extra observation of the first, placed
    as the stake of a bet on the first disease under the evidence as it stands.
    """
    _require_room(agent, evidence, 2)
    d_i, d_j = pair
    space: DiseaseSpace = agent.space
    interval = agent.interval

    def chained(first: str, second: str) -> float:
        x = agent.certainty_equivalent(
            binary_act(space.event([second]), stake, interval),
            evidence.extended(first),
        )
        return agent.certainty_equivalent(
            binary_act(space.event([first]), x, interval), evidence
        )

    y = chained(d_i, d_j)
    y_prime = chained(d_j, d_i)
    return ExchangeabilityResult(y, y_prime, abs(y - y_prime) <= tol)


class DisjointCausalityResult(NamedTuple):
    x: float
    x_prime: float
    passed: bool


def check_disjoint_causality(
    agent,
    evidence: Evidence,
    triple: tuple[str, str, str],
    stake: float = 1.0,
    tol: float = CE_TOL,
) -> DisjointCausalityResult:
    """Is a bet on one disease worth the same after seeing either other one?"""
    space: DiseaseSpace = agent.space
    if space.size < 3:
        raise DomainError(
            "disjoint causality needs at least three diseases; "
            "with two it is vacuous"
        )
    d_i, d_j, d_k = triple
    if len({d_i, d_j, d_k}) != 3:
        raise DomainError("disjoint causality needs three distinct diseases")
    _require_room(agent, evidence, 1)
    bet = binary_act(space.event([d_i]), stake, agent.interval)
    x = agent.certainty_equivalent(bet, evidence.extended(d_j))
    x_prime = agent.certainty_equivalent(bet, evidence.extended(d_k))
    return DisjointCausalityResult(x, x_prime, abs(x - x_prime) <= tol)


def _revealed_step_spread(
    agent, points: Sequence[float], event, gauge: float, evidence: Evidence
) -> float:
    """How unevenly the other evidence spaces an elicited sequence.

    For consecutive sequence points (a, b), solve x in
    (b on A, gauge off A) ~ (a on A, x off A) under ``evidence``. A stable
    utility makes every x identical, because the sequence revealed equal
    utility differences; the spread of the x values is the instability.
    """
    from .agents import ActTemplate, indifference_point
    from .core import Act, splice

    base = Act.constant(agent.space, agent.interval, gauge)
    off_event = event.complement()
    xs = []
    for a, b in zip(points, points[1:]):
        template = ActTemplate(splice(base, event, a), off_event)
        target = splice(base, event, b)
        xs.append(indifference_point(agent, template, target, evidence))
    return max(xs) - min(xs)


def _stability_spread(
    agent, evidence_a: Evidence, evidence_b: Evidence, probe: tuple
) -> float:
    from . import tradeoff  # deferred: tradeoff builds on the agents layer

    event, gauges, start, steps = probe
    seq_a = tradeoff.elicit_standard_sequence(
        agent, event, gauges, start, steps, evidence_a
    )
    seq_b = tradeoff.elicit_standard_sequence(
        agent, event, gauges, start, steps, evidence_b
    )
    return max(
        _revealed_step_spread(agent, seq_a.points, event, gauges[0], evidence_b),
        _revealed_step_spread(agent, seq_b.points, event, gauges[0], evidence_a),
    )


def utility_stability_probe(
    agent, evidence_a: Evidence, evidence_b: Evidence, steps: int = 3
) -> tuple:
    """A numerically feasible probe for the utility-stability check.

    Picks the disease whose unit bet keeps a moderate certainty equivalent
    under both evidences, then shrinks the gauge span until the elicitation
    and its cross-evidence verification stay inside the outcome interval.
    """
    space: DiseaseSpace = agent.space
    interval = agent.interval
    stake = interval.hi if interval.hi > 0 else interval.lo
    best, best_score = None, -1.0
    for label in space.labels:
        bet = binary_act(space.event([label]), stake, interval)
        score = min(
            abs(agent.certainty_equivalent(bet, evidence_a)),
            abs(agent.certainty_equivalent(bet, evidence_b)),
        )
        if score > best_score:
            best, best_score = label, score
    event = space.event([best])
    span = (interval.hi - interval.lo) / 64
    for _ in range(8):
        probe = (event, (interval.lo, interval.lo + span), interval.lo, steps)
        try:
            _stability_spread(agent, evidence_a, evidence_b, probe)
            return probe
        except (DomainError, NumericalError):
            span /= 2
    raise DomainError(
        "no feasible utility-stability probe found; pass explicit probes"
    )


def check_utility_stability(
    agent,
    evidence_a: Evidence,
    evidence_b: Evidence,
    probes: Sequence[tuple] | None = None,
    tol: float = 1e-8,
) -> bool:
    """Does elicited utility structure survive a change of evidence?

    Each probe is (event, (g, G), start, steps). A standard sequence is
    elicited under each evidence; the equal-utility-difference claims it
    reveals are then re-verified under the other evidence, which holds
    exactly when the two conditional preference orders share one utility.
    (Raw knot positions are not compared: they shift with the event's
    conditional probability even when utility is fixed.)

    With ``probes=None`` a feasible probe is constructed automatically.
    """
    if probes is None:
        probes = [utility_stability_probe(agent, evidence_a, evidence_b)]
    for probe in probes:
        if _stability_spread(agent, evidence_a, evidence_b, probe) > tol:
            return False
    return True


# --- identification ---------------------------------------------------------


@dataclass(frozen=True)
class IdentificationResult:
    lam: float
    prior: tuple[float, ...]
    diagnostics: dict

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "prior": list(self.prior),
            "diagnostics": self.diagnostics,
        }


#: Below this one-step probability gain, lambda is not identifiable.
IDENTIFY_MIN_GAIN = 1e-10
#: Spread of per-disease lambda estimates tolerated before flagging.
IDENTIFY_SPREAD_TOL = 1e-6


def identify(
    agent, utility=None, stake: float | None = None
) -> IdentificationResult:
    """Recover (lambda, prior) from conditional certainty equivalents.

    The prior comes from utility exchange rates on unit bets under empty
    evidence. Lambda comes from the one-step gain after a single matching
    observation: lambda = (1 - p') / (p' - p0), estimated per disease and
    aggregated by median. The per-disease spread is the diagnostic for
    whether the agent updates this way at all.

    ``utility`` defaults to the agent's own curve; pass an elicited curve to
    run the identification end to end from preference data.
    """
    from . import tradeoff  # deferred: tradeoff builds on the agents layer

    space: DiseaseSpace = agent.space
    if space.size < 3:
        raise DomainError("identification needs at least three diseases")
    utility = utility if utility is not None else agent.utility
    empty = Evidence.empty(space)

    priors: list[float] = []
    lambdas: list[float] = []
    for label in space.labels:
        event = space.event([label])
        p0 = tradeoff.probability_from_exchange(
            agent, utility, event, empty, stake=stake
        )
        p1 = tradeoff.probability_from_exchange(
            agent, utility, event, empty.extended(label), stake=stake
        )
        gain = p1 - p0
        if gain <= IDENTIFY_MIN_GAIN:
            raise DomainError(
                f"not identifiable: probability of {label!r} does not strictly "
                f"rise after an extra observation (gain {gain:.3e})"
            )
        priors.append(p0)
        lambdas.append((1.0 - p1) / gain)

    lam = statistics.median(lambdas)
    spread = max(abs(l - lam) for l in lambdas)
    diagnostics = {
        "per_disease_lambda": dict(zip(space.labels, lambdas)),
        "lambda_spread": spread,
        "prior_sum": sum(priors),
        "consistent": spread <= IDENTIFY_SPREAD_TOL,
    }
    return IdentificationResult(lam, tuple(priors), diagnostics)
