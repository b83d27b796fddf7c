# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Partitions of {1, ..., m+n} and the primitivity predicate P(pi).

Indices are 1-based throughout, matching the plain-text form
``m=3 n=1 pi={1,2}/{3,4}``. A vector v lies in P(pi) when, for every
component, the coordinates indexed by that component are coprime.
"""

from __future__ import annotations

import itertools
import logging
import math
import re
import typing

import numpy as np
import numpy.typing as npt

from dioprim.arith import DEFAULT_BUDGET, check_budget, euler_phi, zeta

logger = logging.getLogger("dioprim")


class Partition(typing.NamedTuple):
    """A partition of {1, ..., m+n} into components of size >= 2."""

    m: int
    n: int
    components: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        """Number of components."""
        return len(self.components)

    @property
    def d(self) -> int:
        """Size of the partitioned index set."""
        return self.m + self.n


class NormalizedPartition(typing.NamedTuple):
    """Canonical renumbering of a partition.

    ``permutation[i - 1]`` is the new index of old index ``i``. In
    ``partition`` the first ``a`` components contain {j, m+j}, components
    a+1..b lie in {m+1, ..., m+n} and the rest in {1, ..., m}.
    """

    base: Partition
    permutation: tuple[int, ...]
    a: int
    b: int
    partition: Partition


def validate(m: int, n: int, components: typing.Iterable[typing.Iterable[int]]) -> Partition:
    """Check and build a ``Partition``.

    Raises:
        ValueError: on overlapping components, missing or out of range
            indices, or a component with fewer than two elements.
    """
    if m < 1 or n < 1:
        raise ValueError(f"m and n must be positive, got m={m}, n={n}")
    comps = [tuple(sorted(int(i) for i in c)) for c in components]
    if len(comps) == 0:
        raise ValueError("Partition needs at least one component")
    seen: set[int] = set()
    for c in comps:
        if len(c) < 2:
            raise ValueError(f"Component {set(c)} has fewer than two elements")
        if len(set(c)) != len(c):
            raise ValueError(f"Component {c} repeats an index")
        overlap = seen.intersection(c)
        if overlap:
            raise ValueError(f"Indices {sorted(overlap)} appear in more than one component")
        seen.update(c)
    expected = set(range(1, m + n + 1))
    if seen - expected:
        raise ValueError(f"Indices {sorted(seen - expected)} are outside 1..{m + n}")
    if expected - seen:
        raise ValueError(f"Indices {sorted(expected - seen)} are not covered")
    return Partition(m, n, tuple(sorted(comps)))


def trivial_partition(m: int, n: int) -> Partition:
    """The one-component partition of {1, ..., m+n}."""
    return validate(m, n, [range(1, m + n + 1)])


def paired_partition(k: int) -> Partition:
    """{1,2}/{3,4}/.../{2k-1,2k} with m = 2k-1 and n = 1."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return validate(2 * k - 1, 1, [(2 * j - 1, 2 * j) for j in range(1, k + 1)])


_PARTITION_RE = re.compile(r"^\s*m\s*=\s*(\d+)\s+n\s*=\s*(\d+)\s+pi\s*=\s*(.+?)\s*$")


def parse_partition(text: str) -> Partition:
    """Parse ``m=3 n=1 pi={1,2}/{3,4}``."""
    match = _PARTITION_RE.match(text)
    if match is None:
        raise ValueError(f"Malformed partition {text!r}")
    m, n, body = int(match[1]), int(match[2]), match[3]
    components = []
    for block in body.split("/"):
        block = block.strip()
        if not (block.startswith("{") and block.endswith("}")):
            raise ValueError(f"Malformed component {block!r} in {text!r}")
        try:
            components.append([int(i) for i in block[1:-1].split(",")])
        except ValueError as e:
            raise ValueError(f"Malformed component {block!r} in {text!r}") from e
    return validate(m, n, components)


def format_partition(p: Partition) -> str:
    """Plain-text form understood by ``parse_partition``."""
    body = "/".join("{" + ",".join(str(i) for i in c) + "}" for c in p.components)
    return f"m={p.m} n={p.n} pi={body}"


def meets_ergodicity_bound(p: Partition) -> bool:
    """True iff every component has at least n+1 elements."""
    return all(len(c) >= p.n + 1 for c in p.components)


def is_in_p_pi(v: typing.Sequence[int], p: Partition) -> bool:
    """True iff v restricted to every component of ``p`` is primitive."""
    if len(v) != p.d:
        raise ValueError(f"Vector of length {len(v)} does not match m+n = {p.d}")
    return all(math.gcd(*(int(v[i - 1]) for i in c)) == 1 for c in p.components)


def primitive_mask(V: npt.NDArray[np.int64], p: Partition) -> npt.NDArray[np.bool_]:
    """Row-wise P(pi) test for an array of shape (N, m+n)."""
    if V.shape[-1] != p.d:
        raise ValueError(f"Vectors of length {V.shape[-1]} do not match m+n = {p.d}")
    mask = np.ones(V.shape[:-1], dtype=bool)
    for c in p.components:
        cols = [i - 1 for i in c]
        mask &= np.gcd.reduce(V[..., cols], axis=-1) == 1
    return mask


def normalize(p: Partition) -> NormalizedPartition:
    """Renumber ``p`` into the canonical (a, b, k) form.

    Mixed components are ordered by their smallest q-side index; within
    the j-th mixed component the smallest q-side index becomes j and the
    smallest p-side index becomes m+j. Remaining indices keep their
    relative order inside {1..m} and {m+1..m+n}.
    """
    m = p.m

    def is_q(i: int) -> bool:
        return i <= m

    mixed = [c for c in p.components if any(map(is_q, c)) and not all(map(is_q, c))]
    pure_p = [c for c in p.components if not any(map(is_q, c))]
    pure_q = [c for c in p.components if all(map(is_q, c))]
    mixed.sort(key=lambda c: min(i for i in c if is_q(i)))

    perm: dict[int, int] = {}
    for j, c in enumerate(mixed, start=1):
        perm[min(i for i in c if is_q(i))] = j
        perm[min(i for i in c if not is_q(i))] = m + j
    a = len(mixed)
    rest_q = [i for i in range(1, m + 1) if i not in perm]
    rest_p = [i for i in range(m + 1, p.d + 1) if i not in perm]
    perm.update(zip(rest_q, range(a + 1, m + 1)))
    perm.update(zip(rest_p, range(m + a + 1, p.d + 1)))

    def renumbered(cs: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
        return sorted((tuple(sorted(perm[i] for i in c)) for c in cs), key=min)

    ordered = renumbered(mixed) + renumbered(pure_p) + renumbered(pure_q)
    new = Partition(p.m, p.n, tuple(ordered))
    permutation = tuple(perm[i] for i in range(1, p.d + 1))
    logger.debug(f"Normalized {format_partition(p)} to {format_partition(new)}")
    return NormalizedPartition(p, permutation, a, a + len(pure_p), new)


def renumber(v: typing.Sequence[int], normalized: NormalizedPartition) -> tuple[int, ...]:
    """Move coordinate i of ``v`` to position permutation[i]."""
    if len(v) != len(normalized.permutation):
        raise ValueError("Vector length does not match the partition")
    w = [0] * len(v)
    for i, j in enumerate(normalized.permutation):
        w[j - 1] = int(v[i])
    return tuple(w)


def _check_admissible_q(q: typing.Sequence[int], normalized: NormalizedPartition) -> None:
    p = normalized.partition
    if len(q) != p.m:
        raise ValueError(f"q has length {len(q)}, expected m = {p.m}")
    if any(int(x) < 1 for x in q):
        raise ValueError("q not admissible: entries must be positive")
    for c in p.components[normalized.b :]:
        if math.gcd(*(int(q[i - 1]) for i in c)) != 1:
            raise ValueError(f"q not admissible: not primitive on component {c}")


def count_admissible_p(
    q: typing.Sequence[int],
    beta: float,
    normalized: NormalizedPartition,
    budget: int = DEFAULT_BUDGET,
) -> int:
    """Count p in N^n with (q, p) in P(pi) and |p| <= beta |q|.

    ``q`` and the counted ``p`` are in the canonical numbering of
    ``normalized``. The box bound is inclusive.
    """
    _check_admissible_q(q, normalized)
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    p = normalized.partition
    upper = math.floor(np.nextafter(beta * max(int(x) for x in q), np.inf))
    if upper < 1:
        return 0
    check_budget("admissible p enumeration", upper**p.n, budget)

    q_arr = np.asarray(q, dtype=np.int64)
    total = 0
    # one slab per value of the first p coordinate keeps memory at upper^(n-1)
    rest = np.array(list(itertools.product(range(1, upper + 1), repeat=p.n - 1)), dtype=np.int64)
    rest = rest.reshape(upper ** (p.n - 1), p.n - 1)
    for p1 in range(1, upper + 1):
        V = np.empty((rest.shape[0], p.d), dtype=np.int64)
        V[:, : p.m] = q_arr
        V[:, p.m] = p1
        V[:, p.m + 1 :] = rest
        total += int(np.count_nonzero(primitive_mask(V, p)))
    return total


def corollary_lower_bound(
    q: typing.Sequence[int], beta: float, normalized: NormalizedPartition, eps: float
) -> float:
    """(1-eps) beta^n |q|^n prod zeta(d_j)^-1 prod_{j<=a} phi(q_j)/q_j."""
    p = normalized.partition
    qn = max(int(x) for x in q)
    bound = (1 - eps) * (beta * qn) ** p.n
    for c in p.components[normalized.a : normalized.b]:
        bound /= zeta(len(c), 1e-12)
    for j in range(normalized.a):
        bound *= euler_phi(int(q[j])) / int(q[j])
    return bound
