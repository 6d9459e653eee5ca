"""Shared factories for randomized test instances."""

from __future__ import annotations

import numpy as np

from carnapkit import (
    CarnapAgent,
    CarnapModel,
    DiseaseSpace,
    Evidence,
    LinearUtility,
    OutcomeInterval,
    PowerUtility,
    SEUAgent,
    UtilityCurve,
)

UNIT = OutcomeInterval(0.0, 1.0)
DESK = OutcomeInterval(0.0, 100.0)


def space_of(size: int) -> DiseaseSpace:
    return DiseaseSpace(tuple(f"d{i + 1}" for i in range(size)))


def interior_simplex(rng: np.random.Generator, size: int, floor: float = 1e-4):
    while True:
        p = rng.dirichlet(np.ones(size))
        if p.min() >= floor:
            return tuple(float(x) for x in p)


def random_model(
    rng: np.random.Generator,
    size: int,
    lam_range: tuple[float, float] = (0.01, 100.0),
    horizon: int = 1000,
) -> CarnapModel:
    lam = float(rng.uniform(*lam_range))
    return CarnapModel(interior_simplex(rng, size), lam, horizon)


def random_carnap_agent(
    rng: np.random.Generator, size: int | None = None, utility=None
) -> CarnapAgent:
    size = size or int(rng.integers(3, 9))
    return CarnapAgent(
        space_of(size), UNIT, random_model(rng, size), utility or LinearUtility()
    )


def random_utility(rng: np.random.Generator, interval: OutcomeInterval):
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return LinearUtility()
    if kind == 1:
        return PowerUtility(float(rng.uniform(0.4, 1.6)))
    # random strictly increasing grid over the interval
    knots = 9
    xs = np.linspace(interval.lo, interval.hi, knots)
    increments = rng.uniform(0.1, 1.0, knots - 1)
    us = np.concatenate([[0.0], np.cumsum(increments)])
    us /= us[-1]
    return UtilityCurve(tuple(xs), tuple(us))


def random_seu_agent(
    rng: np.random.Generator, size: int | None = None, interval=DESK
) -> SEUAgent:
    size = size or int(rng.integers(2, 4))
    return SEUAgent(
        space_of(size),
        interval,
        interior_simplex(rng, size, floor=0.05),
        random_utility(rng, interval),
    )


def random_evidence(
    rng: np.random.Generator, space: DiseaseSpace, max_len: int = 6
) -> Evidence:
    length = int(rng.integers(0, max_len + 1))
    labels = [space.labels[int(i)] for i in rng.integers(0, space.size, length)]
    return Evidence(space, tuple(labels))


def sequence_probability_oracle(model: CarnapModel, evidence: Evidence) -> float:
    """Closed-form multivariate Polya marginal, independent of the chain rule.

    prod_i prod_{k<n_i} (lam p_i + k) / prod_{t<N} (lam + t)
    """
    n = evidence.counts()
    num = 1.0
    for p, ni in zip(model.prior, n):
        for k in range(ni):
            num *= model.lam * p + k
    den = 1.0
    for t in range(evidence.total):
        den *= model.lam + t
    return num / den
