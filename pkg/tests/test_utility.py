"""Utility curves and closed forms."""

import pytest
from hypothesis import given, strategies as st

from carnapkit import DomainError, LinearUtility, PowerUtility, UtilityCurve
from carnapkit.utility import utility_from_json, utility_to_json


def test_curve_requires_increasing_grid():
    with pytest.raises(DomainError):
        UtilityCurve((0.0, 1.0, 1.0), (0.0, 0.5, 1.0))
    with pytest.raises(DomainError):
        UtilityCurve((0.0, 1.0, 2.0), (0.0, 0.5, 0.5))


def test_interpolation_hits_knots_exactly():
    curve = UtilityCurve((0.0, 1.0, 4.0), (0.0, 0.3, 1.0))
    assert curve(1.0) == 0.3
    assert curve.inverse(0.3) == 1.0
    assert curve(2.5) == pytest.approx(0.65, abs=1e-15)


@given(st.floats(0.0, 4.0))
def test_curve_inversion_round_trip(x):
    curve = UtilityCurve((0.0, 1.0, 4.0), (0.0, 0.3, 1.0))
    assert abs(curve.inverse(curve(x)) - x) <= 1e-12


def test_extrapolation_stays_monotone():
    curve = UtilityCurve((1.0, 2.0), (0.0, 1.0))
    assert curve(0.0) == -1.0
    assert curve.inverse(-1.0) == 0.0


def test_power_utility_matches_sqrt():
    u = PowerUtility(0.5)
    assert u(49.0) == 7.0
    assert u.inverse(7.0) == 49.0


def test_power_utility_is_odd():
    u = PowerUtility(0.5)
    assert u(-4.0) == -2.0
    assert u.inverse(-2.0) == -4.0


def test_from_function_grid():
    curve = UtilityCurve.from_function(lambda x: x * x, 0.0, 2.0, knots=5)
    assert curve.xs == (0.0, 0.5, 1.0, 1.5, 2.0)
    assert curve.us[2] == 1.0


def test_affine_preserves_shape():
    curve = UtilityCurve((0.0, 1.0, 2.0), (0.0, 0.4, 1.0))
    shifted = curve.affine(2.0, 3.0)
    assert shifted(1.0) == 2.0 * 0.4 + 3.0


@pytest.mark.parametrize(
    "spec, x, expected",
    [
        ("linear", 3.25, 3.25),
        ("sqrt", 16.0, 4.0),
        ("power:2", 3.0, 9.0),
    ],
)
def test_named_forms(spec, x, expected):
    assert utility_from_json(spec)(x) == expected


def test_json_round_trip():
    curve = UtilityCurve((0.0, 2.0), (0.0, 1.0))
    assert utility_from_json(utility_to_json(curve)) == curve
    assert utility_to_json(PowerUtility(0.5)) == "power:0.5"
