# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later

import numpy as np
import pytest

from dioprim import arith
from dioprim.partitions import (
    count_admissible_p,
    corollary_lower_bound,
    format_partition,
    is_in_p_pi,
    meets_ergodicity_bound,
    normalize,
    paired_partition,
    parse_partition,
    primitive_mask,
    renumber,
    trivial_partition,
    validate,
)


@pytest.mark.parametrize(
    "m,n,components",
    [(1, 1, [{1, 2}]), (3, 1, [{1, 2}, {3, 4}]), (2, 2, [{1, 4}, {2, 3}])],
)
def test_validate(m, n, components):
    p = validate(m, n, components)
    assert p.d == m + n
    assert p.k == len(components)


@pytest.mark.parametrize(
    "m,n,components",
    [
        (1, 1, [{1}, {2}]),
        (1, 1, [{1, 2, 3}]),
        (2, 1, [{1, 2}]),
        (2, 2, [{1, 2}, {2, 3, 4}]),
        (1, 1, []),
        (0, 2, [{1, 2}]),
    ],
)
def test_validate_rejects(m, n, components):
    with pytest.raises(ValueError):
        validate(m, n, components)


def test_paired_partition():
    p = paired_partition(2)
    assert (p.m, p.n) == (3, 1)
    assert p.components == ((1, 2), (3, 4))


@pytest.mark.parametrize(
    "text",
    ["m=1 n=1 pi={1,2}", "m=3 n=1 pi={1,2}/{3,4}", "m=2 n=3 pi={1,3,5}/{2,4}"],
)
def test_partition_text_round_trip(text):
    p = parse_partition(text)
    assert format_partition(p) == text
    assert parse_partition(format_partition(p)) == p


@pytest.mark.parametrize("text", ["pi={1,2}", "m=1 n=1 pi=1,2", "m=1 n=1 pi={1,x}"])
def test_parse_partition_malformed(text):
    with pytest.raises(ValueError):
        parse_partition(text)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("m=1 n=1 pi={1,2}", True),
        ("m=2 n=2 pi={1,2}/{3,4}", False),
        ("m=3 n=1 pi={1,2}/{3,4}", True),
    ],
)
def test_meets_ergodicity_bound(text, expected):
    assert meets_ergodicity_bound(parse_partition(text)) is expected


@pytest.mark.parametrize(
    "v,text,expected",
    [
        ((2, -1), "m=1 n=1 pi={1,2}", True),
        ((2, 4, 3, 9), "m=3 n=1 pi={1,2}/{3,4}", False),
        ((1, 1, 1), "m=1 n=2 pi={1,2,3}", True),
        ((1, 1, 1), "m=2 n=1 pi={1,2,3}", True),
        ((0, 0), "m=1 n=1 pi={1,2}", False),
    ],
)
def test_is_in_p_pi(v, text, expected):
    assert is_in_p_pi(v, parse_partition(text)) is expected


def test_is_in_p_pi_length_mismatch():
    with pytest.raises(ValueError):
        is_in_p_pi((1, 2, 3), trivial_partition(1, 1))


def test_primitive_mask_matches_scalar(rng):
    p = parse_partition("m=2 n=3 pi={1,3,5}/{2,4}")
    V = rng.integers(-12, 13, size=(500, 5))
    mask = primitive_mask(V, p)
    assert list(mask) == [is_in_p_pi(v, p) for v in V]


@pytest.mark.parametrize(
    "text,a,b",
    [
        ("m=2 n=2 pi={1,3}/{2,4}", 2, 2),
        ("m=3 n=1 pi={1,2}/{3,4}", 1, 1),
        ("m=2 n=2 pi={1,2}/{3,4}", 0, 1),
        ("m=1 n=2 pi={1,2,3}", 1, 1),
    ],
)
def test_normalize(text, a, b):
    p = parse_partition(text)
    normalized = normalize(p)
    assert (normalized.a, normalized.b, normalized.partition.k) == (a, b, p.k)
    new = normalized.partition
    for j, c in enumerate(new.components[:a], start=1):
        assert j in c and p.m + j in c
    for c in new.components[a:b]:
        assert all(i > p.m for i in c)
    for c in new.components[b:]:
        assert all(i <= p.m for i in c)


def test_normalize_moves_mixed_component_first():
    normalized = normalize(parse_partition("m=3 n=1 pi={1,2}/{3,4}"))
    assert normalized.partition.components[0] == (1, 4)
    assert normalized.permutation == (2, 3, 1, 4)


def test_renumber_preserves_membership(rng):
    p = parse_partition("m=3 n=2 pi={1,5}/{2,3,4}")
    normalized = normalize(p)
    for v in rng.integers(-6, 7, size=(200, 5)):
        assert is_in_p_pi(renumber(v, normalized), normalized.partition) == is_in_p_pi(v, p)


@pytest.mark.parametrize(
    "q,text,expected",
    [
        ((6,), "m=1 n=1 pi={1,2}", 2),
        ((1,), "m=1 n=1 pi={1,2}", 1),
        ((4,), "m=1 n=2 pi={1,2,3}", 12),
    ],
)
def test_count_admissible_p(q, text, expected):
    assert count_admissible_p(q, 1.0, normalize(parse_partition(text))) == expected


def test_count_admissible_p_inclusive_box():
    # beta |q| = 3 exactly, so p = 3 is counted
    normalized = normalize(trivial_partition(1, 1))
    assert count_admissible_p((6,), 0.5, normalized) == 1
    assert count_admissible_p((7,), 3 / 7, normalized) == 3


def test_count_admissible_p_single_row():
    # n = 1: the whole count is one slab in the first p coordinate
    normalized = normalize(parse_partition("m=3 n=1 pi={1,2}/{3,4}"))
    assert count_admissible_p((5, 2, 3), 1.0, normalized) == 4
    assert count_admissible_p((1,), 0.5, normalize(trivial_partition(1, 1))) == 0



def test_count_admissible_p_rejects():
    normalized = normalize(parse_partition("m=2 n=2 pi={1,2}/{3,4}"))
    with pytest.raises(ValueError, match="q not admissible"):
        count_admissible_p((2, 4), 1.0, normalized)
    with pytest.raises(ValueError, match="q not admissible"):
        count_admissible_p((0, 1), 1.0, normalized)


def test_count_admissible_p_lower_bound():
    normalized = normalize(parse_partition("m=1 n=3 pi={1,2}/{3,4}"))
    q = (30,)
    count = count_admissible_p(q, 1.0, normalized)
    assert count == arith.euler_phi(30) * arith.count_primitive_in_box(2, 30)
    assert count >= corollary_lower_bound(q, 1.0, normalized, 0.1)


@pytest.mark.parametrize("q", [(210,), (97,), (64,)])
def test_count_admissible_p_trivial_partition_bound(q):
    normalized = normalize(trivial_partition(1, 2))
    count = count_admissible_p(q, 1.0, normalized)
    brute = sum(
        1
        for p1 in range(1, q[0] + 1)
        for p2 in range(1, q[0] + 1)
        if np.gcd.reduce([q[0], p1, p2]) == 1
    )
    assert count == brute
    assert count >= corollary_lower_bound(q, 1.0, normalized, 0.05)


def test_count_admissible_p_two_mixed_components():
    normalized = normalize(parse_partition("m=2 n=2 pi={1,3}/{2,4}"))
    assert (normalized.a, normalized.b) == (2, 2)
    qs = []
    for i in range(50):
        q1 = 100 + (97 * i) % 301
        qs.append((q1, 1 + (61 * i + 7) % q1))
    counts = [count_admissible_p(q, 1 / 6, normalized) for q in qs]
    main_terms = [corollary_lower_bound(q, 1 / 6, normalized, 0.0) for q in qs]
    # rounding of |q|/6 and the sieve remainder still matter at |q| ~ 100
    assert sum(c >= 0.9 * b for c, b in zip(counts, main_terms)) >= 48
    assert all(c >= 0.8 * b for c, b in zip(counts, main_terms))
