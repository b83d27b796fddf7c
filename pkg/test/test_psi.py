# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later

import math

import numpy as np
import pytest

from dioprim import psi


@pytest.mark.parametrize(
    "f,j,expected",
    [
        (psi.power(1.0, 1.0), 4, 0.25),
        (psi.scaled(psi.power(1.0, 1.0), l=3), 4, 1 / 12),
        (psi.scaled(psi.power(1.0, 1.0), kappa=2), 4, 0.5),
        (psi.make_psi("logpow", c=2.0, s=1.0, t=1.0), 3, 2 / (3 * math.log(4))),
        (psi.make_psi("table", table=(0.4, 0.3, 0.2)), 2, 0.3),
        (psi.make_psi("table", table=(0.4, 0.3, 0.2)), 10, 0.2),
    ],
)
def test_evaluate(f, j, expected):
    assert psi.evaluate(f, j) == pytest.approx(expected, rel=1e-15)


def test_evaluate_rejects_non_positive():
    with pytest.raises(ValueError):
        psi.evaluate(psi.power(1.0, 1.0), 0)


def test_evaluate_many_matches_scalar():
    f = psi.make_psi("logpow", c=0.7, s=0.5, t=2.0, kappa=3, l=2)
    js = np.arange(1, 50)
    expected = [psi.evaluate(f, int(j)) for j in js]
    assert list(psi.evaluate_many(f, js)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("a,b", [(2, 4), (8, 2), (16, 32)])
def test_kappa_multiplicative(a, b):
    # powers of two keep the scaling exact
    f = psi.power(0.3, 1.5)
    js = np.arange(1, 200)
    assert np.array_equal(
        psi.evaluate_many(psi.scaled(f, kappa=a * b), js),
        a * psi.evaluate_many(psi.scaled(f, kappa=b), js),
    )


def test_scaled_composes():
    f = psi.scaled(psi.scaled(psi.power(1.0, 1.0), 2, 3), 5, 7)
    assert (f.kappa, f.l) == (10, 21)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "exp"},
        {"kind": "power", "c": 0.0},
        {"kind": "power", "c": 1.0, "s": -1.0},
        {"kind": "power", "kappa": 0},
        {"kind": "power", "l": 1.5},
        {"kind": "table"},
        {"kind": "table", "table": (0.1, -0.1)},
    ],
)
def test_make_psi_rejects(kwargs):
    with pytest.raises(ValueError):
        psi.make_psi(**kwargs)


@pytest.mark.parametrize(
    "f,m,n,expected",
    [
        (psi.power(1.0, 1.0), 1, 1, True),
        (psi.power(1.0, 1.0), 3, 1, False),
        (psi.power(1.0, 2.0), 3, 1, True),
    ],
)
def test_check_decay_hypothesis(f, m, n, expected):
    assert psi.check_decay_hypothesis(f, m, n, 10**4) is expected


def test_check_decay_hypothesis_needs_two_terms():
    with pytest.raises(ValueError):
        psi.check_decay_hypothesis(psi.power(1.0, 1.0), 1, 1, 1)


def test_series_partial_sum():
    assert psi.series_partial_sum(psi.power(1.0, 1.0), 1, 1, 4) == pytest.approx(25 / 12)
    assert psi.series_partial_sum(psi.power(1.0, 2.0), 1, 1, 1) == 1.0
    assert psi.series_partial_sum(psi.power(1.0, 1.0), 1, 1, 10**6) == pytest.approx(
        math.log(10**6) + 0.5772156649, abs=1e-6
    )


def test_series_partial_sums_increase():
    sums = psi.series_partial_sums(psi.power(0.5, 0.5), 1, 2, [10, 100, 1000])
    assert sums[0] < sums[1] < sums[2]


def test_scaled_series_identity():
    f = psi.power(1.0, 1.0)
    lower, scaled = psi.scaled_series_lower_bound(f, 1, 1, 1, 100)
    assert lower == scaled == psi.series_partial_sum(f, 1, 1, 100)


def test_scaled_series_lower_bound():
    lower, scaled = psi.scaled_series_lower_bound(psi.power(1.0, 1.0), 1, 1, 2, 100)
    assert lower == pytest.approx(0.5 * sum(1 / j for j in range(2, 101)))
    assert lower == pytest.approx(2.0936, abs=1e-4)
    assert scaled == pytest.approx(2.2497, abs=1e-4)
    assert scaled >= lower


@pytest.mark.parametrize(
    "f,m,n,l,Q",
    [
        (psi.power(1.0, 2.0), 1, 1, 3, 30),
        (psi.power(0.4, 1.0), 2, 2, 5, 200),
        (psi.make_psi("logpow", c=1.0, s=1.0, t=1.0), 1, 1, 4, 500),
    ],
)
def test_scaled_series_inequality(f, m, n, l, Q):  # noqa: E741
    lower, scaled = psi.scaled_series_lower_bound(f, m, n, l, Q)
    assert scaled >= lower * (1 - 1e-12)


def test_doubling_ratio():
    assert psi.doubling_ratio(psi.power(1.0, 1.0), 100) == pytest.approx(0.5)
    assert psi.doubling_ratio(psi.constant(0.2), 100) == pytest.approx(1.0)


def test_cassels_ratio():
    result = psi.cassels_ratio(psi.power(1.0, 1.0), 100)
    assert result.max_ratio == pytest.approx(1.0)
    assert result.decreasing


@pytest.mark.parametrize(
    "text",
    [
        "power:c=1.0,s=1.5",
        "power:c=0.4,s=0.0,kappa=3",
        "logpow:c=1.0,s=1.0,t=2.0,l=2",
        "table:0.4,0.3,0.2",
        "table:0.4,0.3;kappa=2,l=3",
    ],
)
def test_psi_text_round_trip(text):
    f = psi.parse_psi(text)
    assert psi.format_psi(f) == text
    assert psi.parse_psi(psi.format_psi(f)) == f


def test_parse_psi_table_file(tmp_path):
    path = tmp_path / "psi.csv"
    path.write_text("0.5\n0.25\n0.125\n")
    f = psi.parse_psi(f"table:@{path}")
    assert f.table == (0.5, 0.25, 0.125)
    assert psi.evaluate(f, 3) == 0.125
    assert psi.format_psi(f) == f"table:@{path}"


@pytest.mark.parametrize(
    "text",
    [
        "power",
        "power:c=1,t=2",
        "power:c=1,x=2",
        "logpow:c=one",
        "cubic:c=1",
        "power:c=1,s=1,kappa=1.5",
        "power:c=1,s=1,l=2.5",
        "table:0.4,0.3;kappa=1.5",
    ],
)
def test_parse_psi_malformed(text):
    with pytest.raises(ValueError):
        psi.parse_psi(text)


def test_parse_psi_integral_scalings():
    f = psi.parse_psi("power:c=1,s=1,kappa=2.0,l=3")
    assert (f.kappa, f.l) == (2, 3)
    assert psi.evaluate(f, 1) == pytest.approx(2 / 3)
