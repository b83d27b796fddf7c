# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Exact elementary number theory.

Greatest common divisors, Euler's totient, the Möbius function, divisor
lists, certified values of ζ(d), the Legendre-Eratosthenes sieve count
and enumeration of primitive points in a box.

All integer work stays inside signed 64-bit range; inputs whose
intermediate products could leave that range are refused with an
``OverflowError`` instead of wrapping.
"""

from __future__ import annotations

import functools
import logging
import math
import typing
from fractions import Fraction

import numpy as np
import numpy.typing as npt

logger = logging.getLogger("dioprim")

INT64_MAX = 2**63 - 1
FACTORIZATION_LIMIT = 10**12
DEFAULT_BUDGET = 10**8


class BudgetExceededError(RuntimeError):
    """An enumeration or sampling request exceeds the configured budget."""

    def __init__(self, what: str, size: int | float, budget: int):
        """Initialise."""
        super().__init__(f"{what}: requested size {size} exceeds budget {budget}")
        self.size = size
        self.budget = budget


def check_budget(what: str, size: int | float, budget: int) -> None:
    """Raise ``BudgetExceededError`` when ``size`` exceeds ``budget``."""
    if size > budget:
        raise BudgetExceededError(what, size, budget)


def _check_int64(value: int, what: str) -> int:
    if abs(value) > INT64_MAX:
        raise OverflowError(f"{what} = {value} leaves the signed 64-bit range")
    return value


class SieveCountQuery(typing.NamedTuple):
    """Count 1 <= n <= beta * Q with gcd(n, q) = 1."""

    beta: Fraction
    Q: int
    q: int


def sieve_query(beta: Fraction | int | str, Q: int, q: int) -> SieveCountQuery:
    """Build a validated ``SieveCountQuery``.

    Args:
        beta: Box-scale factor, converted to an exact rational.
        Q: Range bound.
        q: Coprimality modulus.
    """
    try:
        beta = Fraction(beta)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Malformed beta {beta!r}") from e
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if Q < 1:
        raise ValueError(f"Q must be at least 1, got {Q}")
    if q < 1:
        raise ValueError(f"q must be at least 1, got {q}")
    return SieveCountQuery(beta, Q, q)


def gcd_many(values: typing.Sequence[int]) -> int:
    """Return the non-negative gcd of ``values``; gcd of all zeros is 0."""
    if len(values) == 0:
        raise ValueError("empty gcd")
    return math.gcd(*(int(v) for v in values))


@functools.lru_cache(maxsize=4096)
def factorize(n: int) -> dict[int, int]:
    """Factorize ``n`` by trial division up to sqrt(n).

    Returns:
        Mapping prime -> exponent (empty for n = 1).
    """
    if n < 1:
        raise ValueError(f"Can only factorize positive integers, got {n}")
    if n > FACTORIZATION_LIMIT:
        raise ValueError(f"{n} exceeds the trial-division limit {FACTORIZATION_LIMIT}")
    factors: dict[int, int] = {}
    x = n
    p = 2
    while p * p <= x:
        while x % p == 0:
            factors[p] = factors.get(p, 0) + 1
            x //= p
        p = 3 if p == 2 else p + 2
    if x > 1:
        factors[x] = factors.get(x, 0) + 1
    return factors


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of ``n``."""
    ds = [1]
    for p, e in factorize(n).items():
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def moebius(n: int) -> int:
    """Möbius function mu(n)."""
    if n < 1:
        raise ValueError(f"moebius is defined for n >= 1, got {n}")
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int) -> int:
    """Euler's totient phi(n)."""
    if n < 1:
        raise ValueError(f"euler_phi is defined for n >= 1, got {n}")
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def totients(N: int) -> npt.NDArray[np.int64]:
    """Table of phi(j) for 0 <= j <= N (entry 0 is 0)."""
    phi = np.arange(N + 1, dtype=np.int64)
    for p in range(2, N + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def moebius_table(N: int) -> npt.NDArray[np.int64]:
    """Table of mu(j) for 0 <= j <= N (entry 0 is 0)."""
    mu = np.ones(N + 1, dtype=np.int64)
    mu[0] = 0
    is_prime = np.ones(N + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, N + 1):
        if not is_prime[p]:
            continue
        is_prime[2 * p :: p] = False
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def legendre_sieve_count(query: SieveCountQuery) -> int:
    """Count integers 1 <= n <= beta*Q coprime to q.

    Uses the exact identity N = sum_{d | q} mu(d) floor(beta Q / d), with
    beta kept rational so the floors are exact.
    """
    beta, Q, q = query
    num, den = beta.numerator, beta.denominator
    _check_int64(num * Q, "numerator(beta) * Q")
    _check_int64(den * q, "denominator(beta) * q")
    total = 0
    for d in divisors(q):
        mu = moebius(d)
        if mu:
            total += mu * ((num * Q) // (den * d))
    return total


def brute_force_sieve_count(query: SieveCountQuery) -> int:
    """Direct count of 1 <= n <= beta*Q with gcd(n, q) = 1."""
    upper = (query.beta.numerator * query.Q) // query.beta.denominator
    if upper < 1:
        return 0
    n = np.arange(1, upper + 1, dtype=np.int64)
    return int(np.count_nonzero(np.gcd(n, query.q) == 1))


def sieve_error_bound(q: int) -> int:
    """Bound on |N - beta Q phi(q)/q|: the number of squarefree divisors of q."""
    return 2 ** len(factorize(q))


def sieve_lower_bound(query: SieveCountQuery, eps: float) -> float:
    """The uniform lower bound (1 - eps) beta Q phi(q)/q."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    beta, Q, q = query
    return (1 - eps) * float(beta) * Q * euler_phi(q) / q


def mertens_average(ell: int) -> float:
    """Average of phi(j)/j over 1 <= j <= ell."""
    if ell < 1:
        raise ValueError(f"ell must be at least 1, got {ell}")
    j = np.arange(1, ell + 1, dtype=np.float64)
    return math.fsum(totients(ell)[1:] / j) / ell


class ZetaValue(typing.NamedTuple):
    """Certified value of zeta(d)."""

    value: float
    error: float
    terms: int


def zeta_certified(d: int, tolerance: float) -> ZetaValue:
    """Evaluate zeta(d) with a certified absolute error.

    The partial sum up to N - 1 is completed by the midpoint of the tail
    bracket [N^(1-d), (N-1)^(1-d)] / (d - 1), whose half-width is the
    certificate. N is doubled until the certificate is below
    ``tolerance``.
    """
    if d <= 1:
        raise ValueError("divergent series")
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    N = 16
    while True:
        lower_tail = N ** (1 - d) / (d - 1)
        upper_tail = (N - 1) ** (1 - d) / (d - 1)
        error = 0.5 * (upper_tail - lower_tail)
        if error <= tolerance:
            break
        N *= 2
    j = np.arange(N - 1, 0, -1, dtype=np.float64)
    value = math.fsum(j ** (-d)) + 0.5 * (upper_tail + lower_tail)
    logger.debug(f"zeta({d}) with {N - 1} terms, error {error:.3e}")
    return ZetaValue(value, error, N - 1)


def zeta(d: int, tolerance: float = 1e-12) -> float:
    """zeta(d) to within ``tolerance``."""
    return zeta_certified(d, tolerance).value


def count_primitive_in_box(d: int, Q: int, budget: int = DEFAULT_BUDGET) -> int:
    """Count q in N^d with |q| <= Q and gcd(q) = 1.

    Enumerates all Q^d tuples coordinate by coordinate, keeping only the
    histogram of prefix gcds, so every tuple is visited exactly once in
    compressed form.
    """
    if d < 2:
        raise ValueError(f"d must be at least 2, got {d}")
    if Q < 1:
        raise ValueError(f"Q must be at least 1, got {Q}")
    check_budget("primitive box enumeration", Q**d, budget)
    _check_int64(Q**d, "Q^d")

    x = np.arange(1, Q + 1, dtype=np.int64)
    # counts[g] = number of prefixes with gcd g
    counts = np.zeros(Q + 1, dtype=np.int64)
    counts[1:] = 1
    for _ in range(d - 1):
        new_counts = np.zeros(Q + 1, dtype=np.int64)
        for g in np.flatnonzero(counts):
            new_counts += counts[g] * np.bincount(np.gcd(x, g), minlength=Q + 1)
        counts = new_counts
    return int(counts[1])


def count_primitive_moebius(d: int, Q: int) -> int:
    """Sum_k mu(k) floor(Q/k)^d, the Möbius form of the primitive box count."""
    if d < 2:
        raise ValueError(f"d must be at least 2, got {d}")
    _check_int64(Q**d, "Q^d")
    mu = moebius_table(Q)
    return sum(int(mu[k]) * (Q // k) ** d for k in range(1, Q + 1) if mu[k])
