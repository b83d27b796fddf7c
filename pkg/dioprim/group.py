# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""The group Gamma_pi, the product over components of SL(pi_j, Z).

Words are sequences of letters (r, s, sign), 1-based, each standing for
the transvection I + sign * e_rs with r != s in one component. A word
(g1, ..., gk) denotes the product g1 g2 ... gk, so applying it to a
vector applies gk first.

The orbit of (1, ..., 1) under Gamma_pi is exactly P(pi); ``orbit_ball``
explores it forwards and ``reduce_to_base`` inverts it by a gcd descent.
"""

from __future__ import annotations

import collections
import logging
import math
import typing

import numpy as np
import numpy.typing as npt

from dioprim.partitions import Partition, is_in_p_pi
from dioprim.psi import PsiFunction, evaluate, scaled
from dioprim.solver import check_phi

logger = logging.getLogger("dioprim")

ENTRY_LIMIT = 2**62

Letter = tuple[int, int, int]
Word = tuple[Letter, ...]


class GroupElement(typing.NamedTuple):
    """An integer matrix of determinant 1, optionally with a word producing it."""

    matrix: npt.NDArray[np.int64]
    word: Word | None = None


def _check_entries(values: typing.Iterable[int], what: str) -> None:
    if any(abs(int(x)) > ENTRY_LIMIT for x in values):
        raise OverflowError(f"{what} has entries beyond 2^62")


def generator_letters(p: Partition) -> list[Letter]:
    """The letters E_rs^(+1) and E_rs^(-1) for r != s in each component."""
    return [
        (r, s, sign)
        for c in p.components
        for r in c
        for s in c
        if r != s
        for sign in (1, -1)
    ]


def letter_matrix(letter: Letter, d: int) -> npt.NDArray[np.int64]:
    """Matrix of a single transvection."""
    r, s, sign = letter
    g = np.eye(d, dtype=np.int64)
    g[r - 1, s - 1] = sign
    return g


def generators(p: Partition) -> list[GroupElement]:
    """Generators of Gamma_pi with their inverses, component by component."""
    return [GroupElement(letter_matrix(x, p.d), (x,)) for x in generator_letters(p)]


def apply_word(word: typing.Sequence[Letter], v: typing.Sequence[int]) -> tuple[int, ...]:
    """The vector word * v in exact integer arithmetic."""
    w = [int(x) for x in v]
    for r, s, sign in reversed(word):
        w[r - 1] += sign * w[s - 1]
        if abs(w[r - 1]) > ENTRY_LIMIT:
            raise OverflowError("Word application leaves the 2^62 entry range")
    return tuple(w)


def word_matrix(word: typing.Sequence[Letter], d: int) -> npt.NDArray[np.int64]:
    """The product of the letters of ``word`` as a d x d matrix."""
    g = [[int(i == j) for j in range(d)] for i in range(d)]
    # right-multiply by each letter: column s gets sign * column r added
    for r, s, sign in word:
        for row in g:
            row[s - 1] += sign * row[r - 1]
        _check_entries((x for row in g for x in row), "Word matrix")
    return np.array(g, dtype=np.int64)


def invert_word(word: typing.Sequence[Letter]) -> Word:
    """The word of the inverse element."""
    return tuple((r, s, -sign) for r, s, sign in reversed(word))


def element(word: typing.Sequence[Letter], d: int) -> GroupElement:
    """``GroupElement`` for a word."""
    return GroupElement(word_matrix(word, d), tuple(word))


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """The product g h."""
    d = g.matrix.shape[0]
    if int(np.abs(g.matrix).max()) * int(np.abs(h.matrix).max()) * d > ENTRY_LIMIT:
        raise OverflowError("Product may leave the 2^62 entry range")
    word = None if g.word is None or h.word is None else g.word + h.word
    return GroupElement(g.matrix @ h.matrix, word)


def inverse(g: GroupElement) -> GroupElement:
    """Exact inverse of ``g``.

    Uses the word when present; otherwise rounds the floating inverse and
    checks g g^-1 = I in integers.
    """
    d = g.matrix.shape[0]
    if g.word is not None:
        word = invert_word(g.word)
        return GroupElement(word_matrix(word, d), word)
    g_inv = np.rint(np.linalg.inv(g.matrix)).astype(np.int64)
    if not np.array_equal(g.matrix @ g_inv, np.eye(d, dtype=np.int64)):
        raise RuntimeError("Could not invert the group element exactly")
    return GroupElement(g_inv)


def format_word(word: typing.Sequence[Letter]) -> str:
    """``E1,2 E2,1^-1``; the empty word is ``e``."""
    if len(word) == 0:
        return "e"
    return " ".join(f"E{r},{s}" + ("" if sign == 1 else "^-1") for r, s, sign in word)


def parse_word(text: str) -> Word:
    """Inverse of ``format_word``."""
    text = text.strip()
    if text in ("", "e"):
        return ()
    letters = []
    for token in text.split():
        body, _, power = token.partition("^")
        if not body.startswith("E") or power not in ("", "-1"):
            raise ValueError(f"Malformed letter {token!r}")
        try:
            r, s = (int(x) for x in body[1:].split(","))
        except ValueError as e:
            raise ValueError(f"Malformed letter {token!r}") from e
        if r == s:
            raise ValueError(f"Letter {token!r} is not a transvection")
        letters.append((r, s, -1 if power else 1))
    return tuple(letters)


def random_word(p: Partition, length: int, rng: np.random.Generator) -> Word:
    """A uniformly random word of ``length`` generator letters."""
    letters = generator_letters(p)
    return tuple(letters[i] for i in rng.integers(0, len(letters), size=length))


class OrbitBall(typing.NamedTuple):
    """Orbit points of (1, ..., 1) inside a sup-norm ball."""

    vectors: tuple[tuple[int, ...], ...]
    complete: bool
    expansions: int


def orbit_ball(p: Partition, norm_bound: int, word_budget: int) -> OrbitBall:
    """Breadth-first closure of (1, ..., 1) under the generators, pruned to |v| <= norm_bound.

    Stops after ``word_budget`` vertex expansions; ``complete`` is False
    when the budget ran out first.

    Raises:
        RuntimeError: if a reached vector is not in P(pi).
    """
    if norm_bound < 1:
        raise ValueError(f"norm_bound must be at least 1, got {norm_bound}")
    letters = generator_letters(p)
    base = (1,) * p.d
    seen = {base}
    queue = collections.deque([base])
    expansions = 0
    while queue and expansions < word_budget:
        v = queue.popleft()
        expansions += 1
        for r, s, sign in letters:
            w = list(v)
            w[r - 1] += sign * w[s - 1]
            if abs(w[r - 1]) > norm_bound:
                continue
            t = tuple(w)
            if t not in seen:
                seen.add(t)
                queue.append(t)
    complete = not queue
    if not complete:
        logger.warning(f"Orbit exploration stopped after {expansions} expansions")
    bad = [v for v in seen if not is_in_p_pi(v, p)]
    if bad:
        raise RuntimeError(f"Orbit points outside P(pi): {bad[:5]}")
    return OrbitBall(tuple(sorted(seen)), complete, expansions)


def _descend(cur: list[int], idx: list[int]) -> list[Letter]:
    """Letters driving the component ``cur`` to all ones, applied in order."""
    ops: list[Letter] = []

    def apply(r: int, s: int, sign: int) -> None:
        cur[r] += sign * cur[s]
        ops.append((idx[r], idx[s], sign))

    while max(abs(x) for x in cur) > 1:
        r = max(range(len(cur)), key=lambda i: (abs(cur[i]), -i))
        partners = [i for i in range(len(cur)) if i != r and cur[i] != 0]
        s = min(partners, key=lambda i: (abs(cur[i]), i))
        sign = -1 if (cur[r] > 0) == (cur[s] > 0) else 1
        for _ in range(abs(cur[r]) // abs(cur[s])):
            apply(r, s, sign)
            if abs(cur[r]) <= 1:
                break

    pivot = next(i for i, x in enumerate(cur) if x != 0)
    for j in range(len(cur)):
        if cur[j] == 0:
            apply(j, pivot, 1)
    if all(x == -1 for x in cur):
        apply(0, 1, -1)
        apply(0, 1, -1)
    plus = cur.index(1)
    for j in range(len(cur)):
        if cur[j] == -1:
            apply(j, plus, 1)
            apply(j, plus, 1)
    return ops


def reduce_to_base(v: typing.Sequence[int], p: Partition) -> Word:
    """A word w with w * (1, ..., 1) = v.

    Within each component the coordinate of largest magnitude is reduced
    against the smallest nonzero partner (ties to the lowest index) until
    all entries lie in {-1, 0, 1}; the entries are then brought to 1. The
    word inverts those steps and is checked by multiplying it out.

    Raises:
        ValueError: if v is not in P(pi).
        RuntimeError: if the word does not reproduce v.
    """
    if not is_in_p_pi(v, p):
        raise ValueError(f"{tuple(v)} is not in P(pi)")
    ops: list[Letter] = []
    for c in p.components:
        cur = [int(v[i - 1]) for i in c]
        ops.extend(_descend(cur, list(c)))
    word = tuple((r, s, -sign) for r, s, sign in ops)
    if apply_word(word, (1,) * p.d) != tuple(int(x) for x in v):
        raise RuntimeError(f"Word for {tuple(v)} does not verify")
    return word


def act_right(
    X: npt.ArrayLike, g: GroupElement, inverse_action: bool = False
) -> npt.NDArray[np.float64]:
    """X g, or X g^-1 with the inverse computed exactly."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != g.matrix.shape[0]:
        d = g.matrix.shape[0]
        raise ValueError(f"X has {X.shape[1]} columns, g is {d}x{d}")
    h = inverse(g) if inverse_action else g
    _check_entries(h.matrix.ravel(), "Group element")
    return X @ h.matrix.astype(np.float64)


def sup_norm(a: npt.ArrayLike) -> float:
    """Largest absolute entry."""
    return float(np.abs(np.asarray(a)).max())


def _split(X: npt.NDArray[np.float64]) -> tuple[int, int, npt.NDArray, npt.NDArray]:
    n = X.shape[0]
    m = X.shape[1] - n
    if m < 1:
        raise ValueError(f"X must be n x (m+n) with m >= 1, got {X.shape}")
    return m, n, X[:, :m], X[:, m:]


def _c_eff(m: int, n: int, theta: npt.NDArray, phi_inv: npt.NDArray) -> float:
    return max(1.0, 2 * m * n * sup_norm(phi_inv) * sup_norm(theta))


def largeness_threshold(X: npt.ArrayLike, y: npt.ArrayLike, psi_value: float) -> float:
    """|q| beyond which every solution with residual <= psi_value has |p| <= c |q|.

    Here c = max(1, 2 m n |Phi^-1| |Theta|) and X = (Theta, Phi).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    m, n, theta, phi = _split(X)
    phi_inv = np.linalg.inv(phi)
    c = _c_eff(m, n, theta, phi_inv)
    slope = m * n * sup_norm(phi_inv) * sup_norm(theta)
    return n * sup_norm(phi_inv) * (sup_norm(y) + psi_value) / (c - slope)


def transport_constant(X: npt.ArrayLike, g: GroupElement) -> int:
    """Smallest integer a > (m+n) |g| max(1, 2 m n |Phi^-1| |Theta|)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    m, n, theta, phi = _split(X)
    c = _c_eff(m, n, theta, np.linalg.inv(phi))
    return math.floor((m + n) * sup_norm(g.matrix) * c) + 1


class TransportRecord(typing.NamedTuple):
    """A solution moved by g together with the checks made on it."""

    v: tuple[int, ...]
    X: npt.NDArray[np.float64]
    residual: float
    transported_residual: float
    identity_ok: bool
    norm_ok: bool
    a: int
    threshold: float
    status: str
    chain_ok: bool | None
    psi_ok: bool | None


def transport_solution(
    X: npt.ArrayLike,
    y: npt.ArrayLike,
    v: typing.Sequence[int],
    g: GroupElement,
    psi: PsiFunction,
    l: int = 1,  # noqa: E741
    a: int | None = None,
) -> TransportRecord:
    """Move a solution of |Theta q + Phi p - y| <= psi(a l |q|) by g.

    Returns v' = g v and X' = X g^-1. The residual is unchanged since
    X' v' = X v; beyond the largeness threshold |q'| <= a |q| and the
    residual is at most psi_l(|q'|).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    m, n, theta, phi = _split(X)
    if len(v) != m + n:
        raise ValueError(f"v has length {len(v)}, expected m+n = {m + n}")
    check_phi(phi)
    q = tuple(int(x) for x in v[:m])
    q_norm = max(abs(x) for x in q)
    if q_norm == 0:
        raise ValueError("q must be nonzero")
    if a is None:
        a = transport_constant(X, g)

    v_arr = np.asarray(v, dtype=np.int64)
    residual = float(np.abs(X @ v_arr - y).max())
    if residual > evaluate(psi, a * l * q_norm):
        raise ValueError(f"v does not satisfy the inequality at a l |q| = {a * l * q_norm}")

    v_new = tuple(int(x) for x in g.matrix @ v_arr)
    _check_entries(v_new, "Transported vector")
    X_new = act_right(X, g, inverse_action=True)
    transported = float(np.abs(X_new @ np.asarray(v_new, dtype=np.float64) - y).max())
    scale = max(1.0, float((np.abs(X_new) @ np.abs(np.asarray(v_new, dtype=np.float64))).max()))
    identity_ok = abs(transported - residual) <= 1e-12 * scale
    norm_ok = max(abs(x) for x in v_new) <= (m + n) * sup_norm(g.matrix) * int(np.abs(v_arr).max())

    threshold = largeness_threshold(X, y, residual)
    chain_ok = psi_ok = None
    if q_norm < threshold:
        status = "below largeness threshold"
    else:
        q_new = max(abs(x) for x in v_new[:m])
        chain_ok = q_new <= a * q_norm
        psi_ok = q_new > 0 and transported <= evaluate(scaled(psi, 1, l), q_new)
        status = "transported" if chain_ok and psi_ok else "check failed"
    logger.debug(f"Transport of {tuple(v)} to {v_new}: {status}")
    return TransportRecord(
        v_new,
        X_new,
        residual,
        transported,
        identity_ok,
        norm_ok,
        a,
        threshold,
        status,
        chain_ok,
        psi_ok,
    )
