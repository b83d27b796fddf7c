# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Enumeration of integer solutions of |Theta q + Phi p - y| <= psi(|q|).

Solutions are produced shell by shell in the sup-norm of q, lexicographic
in q within a shell and lexicographic in p for a fixed q. Work is split
into fixed blocks of the sorted q grid, processed by a thread pool and
merged in block order, so the output never depends on the thread count.

All comparisons against psi are raw IEEE ``<=``. Candidate p intervals
are widened by one ulp before rounding and every candidate is re-checked
against the inequality, so boundary integers are never lost.
"""

from __future__ import annotations

import concurrent.futures
import itertools
import logging
import typing

import numpy as np
import numpy.typing as npt

from dioprim.arith import DEFAULT_BUDGET, check_budget
from dioprim.partitions import Partition, primitive_mask, trivial_partition
from dioprim.psi import PsiFunction, evaluate_many, series_partial_sum

logger = logging.getLogger("dioprim")

BLOCK_SIZE = 2**14
PHI_COND_MAX = 1e12
PHI_INVERSE_MAX = 10.0


class ProblemInstance(typing.NamedTuple):
    """Everything defining one inequality system.

    ``phi is None`` means the normalized system with Phi the identity.
    """

    m: int
    n: int
    theta: npt.NDArray[np.float64]
    y: npt.NDArray[np.float64]
    psi: PsiFunction
    partition: Partition
    phi: npt.NDArray[np.float64] | None = None


class SolutionRecord(typing.NamedTuple):
    """A solution v = (q, p) with its shell, residual and primitivity per component."""

    q: tuple[int, ...]
    p: tuple[int, ...]
    shell: int
    residual: float
    primitive: tuple[bool, ...]


class GrowthPoint(typing.NamedTuple):
    """Solution count N(Q) and series partial sum S(Q) at one truncation."""

    Q: int
    N: int
    S: float


class GrowthCurve(typing.NamedTuple):
    """Growth points for an increasing schedule of truncations."""

    points: tuple[GrowthPoint, ...]


def check_phi(phi: npt.NDArray[np.float64], cond_max: float = PHI_COND_MAX) -> None:
    """Refuse a near-singular Phi."""
    cond = np.linalg.cond(phi)
    if not np.isfinite(cond) or cond > cond_max:
        raise ValueError(f"Φ not invertible (condition number {cond:.3e})")


def make_instance(
    theta: npt.ArrayLike,
    y: npt.ArrayLike,
    psi: PsiFunction,
    partition: Partition | None = None,
    phi: npt.ArrayLike | None = None,
    cond_max: float = PHI_COND_MAX,
) -> ProblemInstance:
    """Build a validated ``ProblemInstance``.

    Args:
        theta: n x m matrix.
        y: target of length n.
        psi: approximating function.
        partition: partition of {1, ..., m+n}; trivial when omitted.
        phi: optional n x n matrix.
        cond_max: largest accepted condition number of ``phi``.
    """
    theta = np.atleast_2d(np.asarray(theta, dtype=np.float64))
    n, m = theta.shape
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape != (n,):
        raise ValueError(f"y has length {y.size}, expected n = {n}")
    if partition is None:
        partition = trivial_partition(m, n)
    elif (partition.m, partition.n) != (m, n):
        raise ValueError(
            f"Partition is over m={partition.m}, n={partition.n}, instance has m={m}, n={n}"
        )
    if phi is not None:
        phi = np.atleast_2d(np.asarray(phi, dtype=np.float64))
        if phi.shape != (n, n):
            raise ValueError(f"Φ has shape {phi.shape}, expected ({n}, {n})")
        check_phi(phi, cond_max)
    return ProblemInstance(m, n, theta, y, psi, partition, phi)


def sample_theta(m: int, n: int, rng: np.random.Generator) -> npt.NDArray[np.float64]:
    """Theta with independent entries uniform on [-1/2, 1/2]."""
    return rng.uniform(-0.5, 0.5, size=(n, m))


def sample_y(n: int, rng: np.random.Generator) -> npt.NDArray[np.float64]:
    """y uniform on [-1/2, 1/2]^n."""
    return rng.uniform(-0.5, 0.5, size=n)


def sample_phi(
    n: int, rng: np.random.Generator, cond_max: float = PHI_COND_MAX, attempts: int = 1000
) -> npt.NDArray[np.float64]:
    """Phi with entries uniform on [-1, 1], redrawn until well conditioned.

    Accepts a draw once cond(Phi) <= cond_max and |Phi^-1| <= 10.
    """
    if not cond_max >= 1:
        raise ValueError(f"cond_max must be at least 1, got {cond_max!r}")
    for _ in range(attempts):
        phi = rng.uniform(-1.0, 1.0, size=(n, n))
        if np.linalg.cond(phi) > cond_max:
            continue
        if np.abs(np.linalg.inv(phi)).max() <= PHI_INVERSE_MAX:
            return phi
    raise RuntimeError(f"No acceptable Φ found in {attempts} draws")


def matrix_times(A: npt.NDArray[np.float64], V: npt.NDArray[np.int64]) -> npt.NDArray[np.float64]:
    """Rows of V mapped by A, accumulated column by column.

    A fixed accumulation order keeps every residual bit-identical between
    the block enumerators and the naive oracle.
    """
    out = np.zeros(V.shape[:-1] + (A.shape[0],), dtype=np.float64)
    for j in range(A.shape[1]):
        out += V[..., j, None] * A[:, j]
    return out


def residuals(
    inst: ProblemInstance, Q_: npt.NDArray[np.int64], P: npt.NDArray[np.int64]
) -> npt.NDArray[np.float64]:
    """|Theta q + Phi p - y| (sup norm) row by row."""
    lhs = matrix_times(inst.theta, Q_)
    lhs = lhs + (P if inst.phi is None else matrix_times(inst.phi, P))
    return np.max(np.abs(lhs - inst.y), axis=-1)


def q_grid(m: int, Q: int, budget: int = DEFAULT_BUDGET) -> npt.NDArray[np.int64]:
    """All nonzero q with |q| <= Q, ordered by shell then lexicographically."""
    if Q < 1:
        raise ValueError(f"Q must be at least 1, got {Q}")
    check_budget("q enumeration", (2 * Q + 1) ** m, budget)
    axis = np.arange(-Q, Q + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * m), indexing="ij"), axis=-1).reshape(-1, m)
    shells = np.abs(grid).max(axis=1)
    order = np.argsort(shells, kind="stable")
    grid, shells = grid[order], shells[order]
    return grid[shells > 0]


def _candidate_boxes(
    centers: npt.NDArray[np.float64], half_widths: npt.NDArray[np.float64]
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Integer bounds of the boxes around ``centers``, widened by one ulp each side."""
    lo = np.ceil(np.nextafter(centers - half_widths[:, None], -np.inf)).astype(np.int64)
    hi = np.floor(np.nextafter(centers + half_widths[:, None], np.inf)).astype(np.int64)
    return lo, hi


def candidate_count(lo: npt.NDArray[np.int64], hi: npt.NDArray[np.int64]) -> float:
    """Number of integer points in the boxes [lo, hi], summed over rows."""
    counts = np.maximum(hi - lo + 1, 0).astype(np.float64)
    return float(np.prod(counts, axis=1).sum())


def _candidates(
    lo: npt.NDArray[np.int64], hi: npt.NDArray[np.int64]
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Every integer point of the boxes [lo, hi].

    One offset from ``lo`` is tried at a time over the rows wide enough
    for it, so memory stays proportional to the number of rows.

    Returns:
        (row index, p) for every candidate, lexicographic in p per row.
    """
    n = lo.shape[1]
    counts = np.maximum(hi - lo + 1, 0)
    row_width = np.where((counts > 0).all(axis=1), counts.max(axis=1), 0)
    order = np.argsort(-row_width, kind="stable")
    sorted_width = row_width[order]
    width = int(sorted_width[0]) if sorted_width.size else 0

    rows, keys, points = [], [], []
    for key, offset in enumerate(itertools.product(range(width), repeat=n)):
        # rows are sorted by width, so the active ones form a prefix
        active = order[: np.count_nonzero(sorted_width > max(offset))]
        P = lo[active] + np.asarray(offset, dtype=np.int64)
        ok = np.all(P <= hi[active], axis=-1)
        rows.append(active[ok])
        keys.append(np.full(np.count_nonzero(ok), key, dtype=np.int64))
        points.append(P[ok])
    if not rows:
        return np.empty(0, dtype=np.int64), np.empty((0, n), dtype=np.int64)
    row_index, key_index, P = np.concatenate(rows), np.concatenate(keys), np.concatenate(points)
    order = np.lexsort((key_index, row_index))
    return row_index[order], P[order]


def _block_boxes(
    inst: ProblemInstance, block: npt.NDArray[np.int64]
) -> tuple[
    npt.NDArray[np.int64], npt.NDArray[np.float64], npt.NDArray[np.int64], npt.NDArray[np.int64]
]:
    """Shells, psi values and candidate p boxes for a block of q vectors."""
    shells = np.abs(block).max(axis=1)
    psi_vals = evaluate_many(inst.psi, shells)
    targets = inst.y - matrix_times(inst.theta, block)
    if inst.phi is None:
        centers, half = targets, psi_vals
    else:
        phi_inv = np.linalg.inv(inst.phi)
        centers = targets @ phi_inv.T
        half = inst.n * np.abs(phi_inv).max() * psi_vals
    lo, hi = _candidate_boxes(centers, half)
    return shells, psi_vals, lo, hi


def _solve_block(
    inst: ProblemInstance, block: npt.NDArray[np.int64], constrained: bool
) -> list[SolutionRecord]:
    shells, psi_vals, lo, hi = _block_boxes(inst, block)
    rows, P = _candidates(lo, hi)
    Qs = block[rows]
    res = residuals(inst, Qs, P)
    accept = res <= psi_vals[rows]
    V = np.concatenate([Qs, P], axis=1)
    components = [
        np.gcd.reduce(V[:, [i - 1 for i in c]], axis=1) == 1 for c in inst.partition.components
    ]
    certificate = np.stack(components, axis=1)
    if constrained:
        accept &= certificate.all(axis=1)
    return [
        SolutionRecord(
            tuple(int(x) for x in Qs[i]),
            tuple(int(x) for x in P[i]),
            int(shells[rows[i]]),
            float(res[i]),
            tuple(bool(b) for b in certificate[i]),
        )
        for i in np.flatnonzero(accept)
    ]


def _enumerate(
    inst: ProblemInstance, Q: int, constrained: bool, threads: int, budget: int
) -> list[SolutionRecord]:
    grid = q_grid(inst.m, Q, budget)
    blocks = [grid[i : i + BLOCK_SIZE] for i in range(0, len(grid), BLOCK_SIZE)]
    total = sum(candidate_count(*_block_boxes(inst, b)[2:]) for b in blocks)
    check_budget("p candidates", total, budget)
    logger.debug(f"Enumerating {len(grid)} q vectors in {len(blocks)} blocks")
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        results = executor.map(lambda b: _solve_block(inst, b, constrained), blocks)
        return [r for block in results for r in block]


def enumerate_solutions(
    inst: ProblemInstance,
    Q: int,
    constrained: bool = True,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> list[SolutionRecord]:
    """All solutions of the normalized system with 1 <= |q| <= Q.

    Args:
        inst: instance without Phi.
        Q: largest shell.
        constrained: keep only (q, p) in P(pi).
        threads: worker threads.
        budget: cap on (2Q+1)^m and on the number of p candidates.
    """
    if inst.phi is not None:
        raise ValueError("enumerate_solutions needs the normalized system; use enumerate_affine")
    return _enumerate(inst, Q, constrained, threads, budget)


def enumerate_affine(
    inst: ProblemInstance,
    Q: int,
    constrained: bool = True,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> list[SolutionRecord]:
    """All solutions of |Theta q + Phi p - y| <= psi(|q|) with 1 <= |q| <= Q.

    Candidates for p lie in the box centred at Phi^-1 (y - Theta q) with
    half-width n |Phi^-1| psi(|q|) per coordinate.
    """
    if inst.phi is None:
        return enumerate_solutions(inst, Q, constrained, threads, budget)
    check_phi(inst.phi)
    return _enumerate(inst, Q, constrained, threads, budget)


def enumerate_any(
    inst: ProblemInstance,
    Q: int,
    constrained: bool = True,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> list[SolutionRecord]:
    """Dispatch on whether ``inst`` carries a Phi."""
    if inst.phi is None:
        return enumerate_solutions(inst, Q, constrained, threads, budget)
    return enumerate_affine(inst, Q, constrained, threads, budget)


def naive_enumerate(
    inst: ProblemInstance, Q: int, constrained: bool = True
) -> list[SolutionRecord]:
    """Double loop over the full box of (q, p); the reference for the enumerators.

    p ranges over |p| <= |y| + m |Theta| Q + max psi + 1, scaled by
    n |Phi^-1| when Phi is present.
    """
    psi_max = float(evaluate_many(inst.psi, np.arange(1, Q + 1)).max())
    reach = np.abs(inst.y).max() + inst.m * np.abs(inst.theta).max() * Q + psi_max
    if inst.phi is not None:
        reach *= inst.n * np.abs(np.linalg.inv(inst.phi)).max()
    B = int(np.floor(reach)) + 1
    axis = np.arange(-B, B + 1, dtype=np.int64)
    P = np.stack(np.meshgrid(*([axis] * inst.n), indexing="ij"), axis=-1).reshape(-1, inst.n)

    records = []
    for q in itertools.product(range(-Q, Q + 1), repeat=inst.m):
        shell = max(abs(x) for x in q)
        if shell == 0:
            continue
        Qs = np.tile(np.array(q, dtype=np.int64), (len(P), 1))
        res = residuals(inst, Qs, P)
        bound = float(evaluate_many(inst.psi, [shell])[0])
        for i in np.flatnonzero(res <= bound):
            v = q + tuple(int(x) for x in P[i])
            certificate = tuple(
                np.gcd.reduce([v[j - 1] for j in c]) == 1 for c in inst.partition.components
            )
            if constrained and not all(certificate):
                continue
            records.append(
                SolutionRecord(
                    q,
                    tuple(int(x) for x in P[i]),
                    shell,
                    float(res[i]),
                    tuple(map(bool, certificate)),
                )
            )
    records.sort(key=lambda r: r.shell)
    return records


def growth_curve(
    inst: ProblemInstance,
    Qs: typing.Sequence[int],
    constrained: bool = True,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> GrowthCurve:
    """Cumulative solution counts N(Q) and partial sums S(Q) along ``Qs``.

    The solutions are enumerated once at the largest Q and counted by
    shell, so the counts are consistent across the schedule.
    """
    if len(Qs) == 0:
        raise ValueError("Q schedule is empty")
    if any(b <= a for a, b in itertools.pairwise(Qs)) or Qs[0] < 1:
        raise ValueError(f"Q schedule {list(Qs)} is not strictly increasing from 1")
    records = enumerate_any(inst, Qs[-1], constrained, threads, budget)
    shells = np.array([r.shell for r in records], dtype=np.int64)
    points = []
    for Q in Qs:
        S = series_partial_sum(inst.psi, inst.m, inst.n, Q)
        points.append(GrowthPoint(int(Q), int(np.count_nonzero(shells <= Q)), S))
    return GrowthCurve(tuple(points))


def fiber_hypercube(
    theta_rest: npt.ArrayLike,
    phi: npt.ArrayLike,
    y: npt.ArrayLike,
    v: typing.Sequence[int],
    psi_value: float,
) -> list[tuple[float, float]]:
    """The set of first columns xi of Theta for which v solves the system.

    With Theta = (xi, theta_rest), v = (q1, q', p) and psi = psi(|q|)
    this is the product over i of the closed intervals with centre
    (y_i - phi_i . p - theta_i . q') / q1 and half-width psi / |q1|.

    Args:
        theta_rest: n x (m-1) matrix; may have zero columns when m = 1.
        phi: n x n matrix.
        y: target.
        v: integer vector (q, p) with q1 != 0.
        psi_value: psi(|q|) >= 0.
    """
    phi = np.atleast_2d(np.asarray(phi, dtype=np.float64))
    n = phi.shape[0]
    y = np.asarray(y, dtype=np.float64).reshape(n)
    theta_rest = np.asarray(theta_rest, dtype=np.float64).reshape(n, -1)
    m = theta_rest.shape[1] + 1
    if len(v) != m + n:
        raise ValueError(f"v has length {len(v)}, expected m+n = {m + n}")
    q1 = int(v[0])
    if q1 == 0:
        raise ValueError("Fiber hypercube needs q1 != 0")
    if psi_value < 0:
        raise ValueError(f"psi_value must be non-negative, got {psi_value}")
    q_rest = np.asarray(v[1:m], dtype=np.float64)
    p = np.asarray(v[m:], dtype=np.float64)
    centers = (y - phi @ p - theta_rest @ q_rest) / q1
    half = psi_value / abs(q1)
    return [(float(c - half), float(c + half)) for c in centers]


def fiber_p_bound(
    theta_rest: npt.ArrayLike,
    phi: npt.ArrayLike,
    y: npt.ArrayLike,
    psi_value: float,
    xi_bound: float,
) -> float:
    """Constant c with |p| <= c kappa |q| whenever a fiber hypercube meets |xi| <= xi_bound.

    Valid for every kappa >= 1 and every q != 0 when ``psi_value`` bounds
    psi on all shells.
    """
    phi = np.atleast_2d(np.asarray(phi, dtype=np.float64))
    n = phi.shape[0]
    theta_rest = np.asarray(theta_rest, dtype=np.float64).reshape(n, -1)
    m = theta_rest.shape[1] + 1
    rest = np.abs(theta_rest).max() if theta_rest.size else 0.0
    y_norm = float(np.abs(np.asarray(y, dtype=np.float64)).max())
    phi_inv = np.abs(np.linalg.inv(phi)).max()
    return float(n * phi_inv * (xi_bound + (m - 1) * rest + y_norm + psi_value))
