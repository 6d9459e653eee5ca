"""Utility functions over outcomes: grid curves and named closed forms.

A utility object is anything with ``__call__(x)`` and ``inverse(u)``, both
strictly increasing and mutually inverse. ``UtilityCurve`` is the piecewise
linear grid representation produced by elicitation; the closed forms exist so
simulated agents can answer queries exactly.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import DomainError, OutcomeInterval, SchemaError

#: Knot count used when sampling a closed form onto a grid.
DEFAULT_GRID_KNOTS = 1025


@dataclass(frozen=True)
class UtilityCurve:
    """Piecewise linear utility through strictly increasing grid knots.

    Evaluation outside the knot range extrapolates the end segments, which
    keeps the curve strictly increasing and invertible on all of R.
    """

    xs: tuple[float, ...]
    us: tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        us = tuple(float(u) for u in self.us)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "us", us)
        if len(xs) != len(us) or len(xs) < 2:
            raise DomainError("utility grid needs at least two (outcome, utility) knots")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("utility grid outcomes must be strictly increasing")
        if any(b <= a for a, b in zip(us, us[1:])):
            raise DomainError("utility grid values must be strictly increasing")

    @classmethod
    def from_function(
        cls, fn, lo: float, hi: float, knots: int = DEFAULT_GRID_KNOTS
    ) -> "UtilityCurve":
        if knots < 2:
            raise DomainError("need at least two knots")
        step = (hi - lo) / (knots - 1)
        xs = tuple(lo + k * step for k in range(knots))
        return cls(xs, tuple(fn(x) for x in xs))

    def _interp(self, grid: tuple[float, ...], vals: tuple[float, ...], t: float) -> float:
        i = bisect_right(grid, t) - 1
        i = min(max(i, 0), len(grid) - 2)
        x0, x1 = grid[i], grid[i + 1]
        v0, v1 = vals[i], vals[i + 1]
        return v0 + (t - x0) * (v1 - v0) / (x1 - x0)

    def __call__(self, x: float) -> float:
        return self._interp(self.xs, self.us, x)

    def inverse(self, u: float) -> float:
        return self._interp(self.us, self.xs, u)

    def affine(self, scale: float, shift: float) -> "UtilityCurve":
        if scale <= 0:
            raise DomainError("affine rescaling of utility needs a positive scale")
        return UtilityCurve(self.xs, tuple(scale * u + shift for u in self.us))


@dataclass(frozen=True)
class LinearUtility:
    """Identity utility, the risk-neutral special case."""

    def __call__(self, x: float) -> float:
        return float(x)

    def inverse(self, u: float) -> float:
        return float(u)


@dataclass(frozen=True)
class PowerUtility:
    """Sign-preserving power utility u(x) = sign(x) * |x| ** exponent."""

    exponent: float

    def __post_init__(self):
        object.__setattr__(self, "exponent", float(self.exponent))
        if self.exponent <= 0:
            raise DomainError("power utility exponent must be positive")

    def __call__(self, x: float) -> float:
        x = float(x)
        return math.copysign(abs(x) ** self.exponent, x) if x else 0.0

    def inverse(self, u: float) -> float:
        u = float(u)
        return math.copysign(abs(u) ** (1.0 / self.exponent), u) if u else 0.0


def utility_from_json(obj, interval: OutcomeInterval | None = None):
    """Parse a utility spec: a named closed form or an explicit grid.

    Accepted forms: "linear", "sqrt", "power:<exponent>", or
    {"grid": [[outcome, utility], ...]}.
    """
    if isinstance(obj, str):
        name = obj.strip().lower()
        if name == "linear":
            return LinearUtility()
        if name == "sqrt":
            return PowerUtility(0.5)
        if name.startswith("power:"):
            try:
                return PowerUtility(float(name.split(":", 1)[1]))
            except (ValueError, DomainError) as exc:
                raise SchemaError(f"bad power utility spec {obj!r}: {exc}") from exc
        raise SchemaError(f"unknown utility name {obj!r}")
    if isinstance(obj, Mapping) and "grid" in obj:
        grid = obj["grid"]
        if not isinstance(grid, Sequence):
            raise SchemaError('utility "grid" must be an array of [x, u] pairs')
        try:
            xs = tuple(float(p[0]) for p in grid)
            us = tuple(float(p[1]) for p in grid)
        except (TypeError, ValueError, IndexError) as exc:
            raise SchemaError(f"bad utility grid: {exc}") from exc
        try:
            return UtilityCurve(xs, us)
        except DomainError as exc:
            raise SchemaError(str(exc)) from exc
    raise SchemaError(f"unrecognized utility specification: {obj!r}")


def utility_to_json(utility) -> object:
    if isinstance(utility, LinearUtility):
        return "linear"
    if isinstance(utility, PowerUtility):
        return f"power:{utility.exponent}"
    if isinstance(utility, UtilityCurve):
        return {"grid": [[x, u] for x, u in zip(utility.xs, utility.us)]}
    raise SchemaError(f"cannot serialize utility {utility!r}")
