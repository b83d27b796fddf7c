# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later

import itertools

import numpy as np
import pytest

from dioprim import group, psi
from dioprim.partitions import is_in_p_pi, parse_partition, trivial_partition


@pytest.mark.parametrize(
    "text,count",
    [("m=1 n=1 pi={1,2}", 4), ("m=2 n=1 pi={1,2,3}", 12), ("m=2 n=2 pi={1,3}/{2,4}", 8)],
)
def test_generators(text, count):
    p = parse_partition(text)
    gens = group.generators(p)
    assert len(gens) == count
    for g in gens:
        assert round(np.linalg.det(g.matrix)) == 1
        assert np.array_equal(group.word_matrix(g.word, p.d), g.matrix)


def test_orbit_ball_unit_bound():
    ball = group.orbit_ball(trivial_partition(1, 1), 1, 10**4)
    assert ball.complete
    assert len(ball.vectors) == 8
    assert set(ball.vectors) == {v for v in itertools.product((-1, 0, 1), repeat=2) if any(v)}


def test_orbit_ball_budget():
    ball = group.orbit_ball(trivial_partition(1, 1), 5, 3)
    assert not ball.complete
    assert ball.expansions == 3
    with pytest.raises(ValueError):
        group.orbit_ball(trivial_partition(1, 1), 0, 10)


@pytest.mark.parametrize(
    "text,bound",
    [("m=1 n=1 pi={1,2}", 5), ("m=2 n=1 pi={1,2,3}", 4), ("m=2 n=2 pi={1,3}/{2,4}", 2)],
)
def test_orbit_ball_is_p_pi(text, bound):
    p = parse_partition(text)
    ball = group.orbit_ball(p, bound, 10**6)
    assert ball.complete
    box = {
        v
        for v in itertools.product(range(-bound, bound + 1), repeat=p.d)
        if is_in_p_pi(v, p)
    }
    assert set(ball.vectors) == box


def test_reduce_to_base_examples():
    p = trivial_partition(1, 1)
    assert group.apply_word(((1, 2, 1),), (1, 1)) == (2, 1)
    assert group.reduce_to_base((2, 1), p) == ((1, 2, 1),)
    assert group.reduce_to_base((1, 1), p) == ()


@pytest.mark.parametrize("p", [trivial_partition(1, 1), trivial_partition(2, 1)])
def test_reduce_to_base_exhaustive(p):
    base = (1,) * p.d
    for v in itertools.product(range(-10, 11), repeat=p.d):
        if not is_in_p_pi(v, p):
            continue
        word = group.reduce_to_base(v, p)
        assert group.apply_word(word, base) == v
        assert tuple(group.word_matrix(word, p.d) @ np.ones(p.d, dtype=np.int64)) == v


def test_reduce_to_base_with_two_components():
    p = parse_partition("m=2 n=2 pi={1,3}/{2,4}")
    for v in [(3, 5, 7, -2), (-1, 0, 1, 1), (1, -4, 0, 9)]:
        word = group.reduce_to_base(v, p)
        assert group.apply_word(word, (1, 1, 1, 1)) == v
        # letters never mix components
        assert all({r, s} <= {1, 3} or {r, s} <= {2, 4} for r, s, _ in word)


def test_reduce_to_base_rejects():
    with pytest.raises(ValueError):
        group.reduce_to_base((2, 4), trivial_partition(1, 1))


def test_word_text_round_trip(rng):
    p = parse_partition("m=2 n=1 pi={1,2,3}")
    for length in (0, 1, 5):
        word = group.random_word(p, length, rng)
        assert group.parse_word(group.format_word(word)) == word
    assert group.format_word(((1, 2, 1), (2, 1, -1))) == "E1,2 E2,1^-1"
    assert group.format_word(()) == "e"


@pytest.mark.parametrize("text", ["F1,2", "E1,1", "E1,2^2", "E1", "Ea,b"])
def test_parse_word_malformed(text):
    with pytest.raises(ValueError):
        group.parse_word(text)


def test_word_matrix_matches_application(rng):
    p = parse_partition("m=2 n=2 pi={1,3}/{2,4}")
    for _ in range(50):
        word = group.random_word(p, 6, rng)
        v = tuple(int(x) for x in rng.integers(-5, 6, size=4))
        assert group.apply_word(word, v) == tuple(group.word_matrix(word, 4) @ np.array(v))


def test_inverse(rng):
    p = trivial_partition(2, 1)
    identity = np.eye(3, dtype=np.int64)
    for _ in range(20):
        g = group.element(group.random_word(p, 5, rng), 3)
        assert np.array_equal(group.compose(g, group.inverse(g)).matrix, identity)
        bare = group.GroupElement(g.matrix)
        assert np.array_equal(group.inverse(bare).matrix, group.inverse(g).matrix)


def test_overflow():
    g = group.GroupElement(np.array([[1, 2**40], [0, 1]], dtype=np.int64))
    with pytest.raises(OverflowError):
        group.compose(g, g)
    with pytest.raises(OverflowError):
        group.apply_word(((1, 2, 1),), (2**62, 1))


def test_act_right_shape():
    g = group.element(((1, 2, 1),), 2)
    with pytest.raises(ValueError):
        group.act_right(np.zeros((1, 3)), g)
    assert np.array_equal(group.act_right([[0.5, 1.0]], g, inverse_action=True), [[0.5, 0.5]])


def test_transport_identity(rng):
    f = psi.constant(0.4)
    for _ in range(100):
        m, n = (1, 1) if rng.random() < 0.5 else (2, 1)
        p = trivial_partition(m, n)
        X = np.hstack([rng.uniform(-0.5, 0.5, size=(n, m)), [[float(rng.uniform(0.5, 2.0))]]])
        v = tuple(int(x) for x in rng.integers(-20, 21, size=m + n))
        if not any(v[:m]):
            continue
        y = X @ np.array(v, dtype=np.float64)
        g = group.element(group.random_word(p, 4, rng), m + n)
        record = group.transport_solution(X, y, v, g, f)
        assert record.identity_ok
        assert record.norm_ok
        assert record.v == tuple(int(x) for x in g.matrix @ np.array(v))


def test_transport_above_threshold():
    g = group.element(((1, 2, 1),), 2)
    record = group.transport_solution([[0.5, 1.0]], [0.0], (2, -1), g, psi.constant(0.4))
    assert record.v == (1, -1)
    assert record.a == 3
    assert record.threshold == 0.0
    assert record.status == "transported"
    assert record.chain_ok and record.psi_ok


def test_transport_below_threshold():
    g = group.element(((1, 2, 1),), 2)
    record = group.transport_solution([[0.1, 0.5]], [0.3], (1, 0), g, psi.constant(0.4))
    assert record.threshold == pytest.approx(1.25)
    assert record.status == "below largeness threshold"
    assert record.chain_ok is None


def test_transport_rejects():
    g = group.element(((1, 2, 1),), 2)
    with pytest.raises(ValueError):
        group.transport_solution([[0.5, 1.0]], [0.3], (2, -1), g, psi.constant(0.1))
    with pytest.raises(ValueError, match="not invertible"):
        group.transport_solution([[0.5, 0.0]], [0.0], (2, -1), g, psi.constant(0.4))
    with pytest.raises(ValueError):
        group.transport_solution([[0.5, 1.0]], [0.0], (0, 1), g, psi.constant(0.4))
