"""Shared fixtures and comparison helpers.

The frozen table profile uses dyadic values (multiples of 1/64) so that
energy sums are exact in double precision regardless of summation order;
several identities are asserted with zero tolerance and rely on that.
"""

from __future__ import annotations

import math

import pytest

from spinchain import CouplingProfile

# Dyadic (k/64) couplings for bond indices -13 .. 13, frozen once.
TABLE_XMIN = -13
TABLE_VALUES = (
    2.953125, 1.09375, 1.75, 2.75, 2.265625, 0.6875, 1.875, 0.765625,
    0.171875, 0.453125, 1.109375, 0.125, 2.359375, 1.671875, 1.796875,
    1.5625, 0.1875, 1.03125, 2.328125, 1.5, 0.875, 0.34375, 0.703125,
    0.34375, 0.3125, 1.09375, 3.0,
)


def table_profile() -> CouplingProfile:
    return CouplingProfile.table(TABLE_XMIN, TABLE_VALUES)


def standard_profiles() -> dict[str, CouplingProfile]:
    """The four profiles the equivalence suites run over."""
    return {
        "abs": CouplingProfile.absolute(),
        "constant1": CouplingProfile.constant(1.0),
        "linear02": CouplingProfile.linear(0.0, 2.0),
        "table": table_profile(),
    }


@pytest.fixture(name="profiles")
def profiles_fixture() -> dict[str, CouplingProfile]:
    return standard_profiles()


def rel_close(a: float, b: float, tol: float = 1e-12) -> bool:
    """|a - b| <= tol * max(|a|, |b|); equal values (including 0) pass."""
    if a == b:
        return True
    if math.isinf(a) or math.isinf(b):
        return False
    return abs(a - b) <= tol * max(abs(a), abs(b))


def log_close(a: float, b: float, tol: float = 1e-12) -> bool:
    """Absolute closeness of two log-weights.

    An absolute gap of tol between logs is a relative gap of tol between
    the weights themselves, which is the right reading of 'relative' for
    log-domain quantities.
    """
    if a == b:
        return True
    return abs(a - b) <= tol
