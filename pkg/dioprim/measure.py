# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Monte Carlo measures of strip sets in the box of matrices |Theta| <= 1/2.

For a nonzero q in Z^m, a target y and a value psi = psi(|q|):

- R_v is the set of Theta with |Theta q + p - y| <= psi for v = (q, p),
- E_q is the union of R_v over p with (q, p) in P(pi),
- F_q is the union of R_v over all p, i.e. ||Theta q - y|| <= psi.

Sampling is split into fixed chunks of ``SAMPLE_CHUNK`` matrices. Chunk i
of stream s draws from ``SeedSequence(seed, spawn_key=(s, i))``, so any
number of worker threads gives bit-identical results.
"""

from __future__ import annotations

import concurrent.futures
import itertools
import logging
import math
import typing
import warnings

import numpy as np
import numpy.typing as npt

from dioprim.arith import DEFAULT_BUDGET, check_budget, totients
from dioprim.partitions import Partition
from dioprim.psi import (
    PsiFunction,
    check_decay_hypothesis,
    evaluate,
    evaluate_many,
    series_partial_sum,
)
from dioprim.solver import q_grid

logger = logging.getLogger("dioprim")

SAMPLE_CHUNK = 2**14
MIN_SAMPLES = 1000
CHI2_BAND = 2.576
VARIANTS = ("F", "E", "R")

STREAM_STRIP = 0
STREAM_PAIR = 1
STREAM_MOMENTS = 2
STREAM_PUSHFORWARD = 3


class MeasureEstimate(typing.NamedTuple):
    """Fraction of sampled matrices in a set, with its binomial standard error."""

    estimate: float
    stderr: float
    samples: int
    seed: int
    warning: str = ""


class StripQuery(typing.NamedTuple):
    """One strip set: R_v (explicit p), E_q or F_q."""

    q: tuple[int, ...]
    y: tuple[float, ...]
    psi_value: float
    variant: str
    p: tuple[int, ...] | None = None


def strip_query(
    q: typing.Sequence[int],
    y: typing.Sequence[float],
    psi_value: float,
    variant: str = "F",
    p: typing.Sequence[int] | None = None,
) -> StripQuery:
    """Build a validated ``StripQuery``."""
    if variant not in VARIANTS:
        raise ValueError(f"Unknown strip variant {variant!r}, expected one of {VARIANTS}")
    q = tuple(int(x) for x in q)
    if len(q) == 0 or not any(q):
        raise ValueError("q must be a nonzero vector")
    if not psi_value > 0:
        raise ValueError(f"psi_value must be positive, got {psi_value}")
    y = tuple(float(x) for x in y)
    if variant == "R":
        if p is None or len(p) != len(y):
            raise ValueError("Variant R needs p of length n")
        p = tuple(int(x) for x in p)
    else:
        p = None
    return StripQuery(q, y, float(psi_value), variant, p)


def _rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, chunk)))


def _chunks(samples: int) -> list[tuple[int, int]]:
    """(index, size) of every sampling chunk."""
    return [
        (i, min(SAMPLE_CHUNK, samples - start))
        for i, start in enumerate(range(0, samples, SAMPLE_CHUNK))
    ]


def sample_box(
    m: int, n: int, size: int, seed: int, stream: int, chunk: int
) -> npt.NDArray[np.float64]:
    """``size`` matrices with entries uniform on [-1/2, 1/2], shape (size, n, m)."""
    return _rng(seed, stream, chunk).uniform(-0.5, 0.5, size=(size, n, m))


def theta_times(thetas: npt.NDArray[np.float64], Q_: npt.NDArray[np.int64]) -> npt.NDArray:
    """Theta q for every sample and every q; shape (samples, len(Q_), n).

    Columns are accumulated in a fixed order.
    """
    out = np.zeros((thetas.shape[0], Q_.shape[0], thetas.shape[1]), dtype=np.float64)
    for j in range(thetas.shape[2]):
        out += thetas[:, None, :, j] * Q_[None, :, j, None]
    return out


def nearest_integer_distance(z: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Sup-norm distance ||z|| to the nearest integer point, over the last axis."""
    return np.max(np.abs(z - np.rint(z)), axis=-1)


def _primitive(
    Qb: npt.NDArray[np.int64], P: npt.NDArray[np.int64], partition: Partition
) -> npt.NDArray[np.bool_]:
    """P(pi) test for v = (q, p) with q broadcast against p."""
    m = partition.m
    ok = np.ones(np.broadcast_shapes(Qb.shape[:-1], P.shape[:-1]), dtype=bool)
    for c in partition.components:
        cols = [Qb[..., i - 1] if i <= m else P[..., i - m - 1] for i in c]
        ok &= _gcd_columns(cols) == 1
    return ok


def _gcd_columns(cols: list[npt.NDArray[np.int64]]) -> npt.NDArray[np.int64]:
    g = np.abs(cols[0])
    for c in cols[1:]:
        g = np.gcd(g, c)
    return g


def strip_hits(
    z: npt.NDArray[np.float64],
    psi_vals: npt.NDArray[np.float64],
    variant: str,
    Q_: npt.NDArray[np.int64],
    partition: Partition | None = None,
    p: npt.NDArray[np.int64] | None = None,
) -> npt.NDArray[np.bool_]:
    """Membership of Theta in the strip of q, given z = Theta q - y.

    Args:
        z: shape (..., n).
        psi_vals: psi(|q|), broadcastable to z[..., 0].
        variant: ``F``, ``E`` or ``R``.
        Q_: q vectors, broadcastable to z[..., :m] (only used by ``E``).
        partition: required for ``E``.
        p: required for ``R``.
    """
    psi_vals = np.asarray(psi_vals, dtype=np.float64)
    if variant == "F":
        return nearest_integer_distance(z) <= psi_vals
    if variant == "R":
        if p is None:
            raise ValueError("Variant R needs p")
        return np.max(np.abs(z + p), axis=-1) <= psi_vals
    if partition is None:
        raise ValueError("Variant E needs a partition")
    half = psi_vals[..., None]
    lo = np.ceil(np.nextafter(-z - half, -np.inf)).astype(np.int64)
    hi = np.floor(np.nextafter(-z + half, np.inf)).astype(np.int64)
    width = int(np.max(hi - lo + 1, initial=0))
    hits = np.zeros(z.shape[:-1], dtype=bool)
    for offset in itertools.product(range(width), repeat=z.shape[-1]):
        P = lo + np.asarray(offset, dtype=np.int64)
        ok = np.all(P <= hi, axis=-1)
        ok &= np.max(np.abs(z + P), axis=-1) <= psi_vals
        ok &= _primitive(Q_, P, partition)
        hits |= ok
    return hits


def membership(
    theta: npt.ArrayLike, query: StripQuery, partition: Partition | None = None
) -> bool:
    """Exact membership of one n x m matrix in the strip set of ``query``."""
    theta = np.atleast_2d(np.asarray(theta, dtype=np.float64))
    q = np.array([query.q], dtype=np.int64)
    if theta.shape != (len(query.y), q.shape[1]):
        raise ValueError(f"Theta has shape {theta.shape}, expected ({len(query.y)}, {q.shape[1]})")
    z = theta_times(theta[None], q)[0, 0] - np.asarray(query.y)
    p = None if query.p is None else np.asarray(query.p, dtype=np.int64)
    return bool(strip_hits(z, np.float64(query.psi_value), query.variant, q[0], partition, p))


def _estimate(hits: int, samples: int, seed: int, warning: str = "") -> MeasureEstimate:
    p = hits / samples
    return MeasureEstimate(p, math.sqrt(p * (1 - p) / samples), samples, seed, warning)


def _check_samples(samples: int, budget: int) -> None:
    if samples < MIN_SAMPLES:
        raise ValueError(f"At least {MIN_SAMPLES} samples are needed, got {samples}")
    check_budget("Monte Carlo samples", samples, budget)


def _map_chunks(
    fn: typing.Callable[[int, int], typing.Any], samples: int, threads: int
) -> list[typing.Any]:
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        return list(executor.map(lambda c: fn(*c), _chunks(samples)))


def mc_measure(
    query: StripQuery,
    partition: Partition | None = None,
    samples: int = 10**5,
    seed: int = 0,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> MeasureEstimate:
    """Estimate the measure of the strip set of ``query`` inside the unit box.

    The E_q estimate carries a warning when psi >= 1/2, where its strips
    may overlap.
    """
    _check_samples(samples, budget)
    warning = ""
    if query.variant == "E" and query.psi_value >= 0.5:
        warning = "overlapping strips: psi >= 1/2"
        warnings.warn(f"E_q strips for q={query.q} may overlap (psi={query.psi_value})")
    m, n = len(query.q), len(query.y)
    q = np.array([query.q], dtype=np.int64)
    y = np.asarray(query.y, dtype=np.float64)
    p = None if query.p is None else np.asarray(query.p, dtype=np.int64)

    def chunk(index: int, size: int) -> int:
        thetas = sample_box(m, n, size, seed, STREAM_STRIP, index)
        z = theta_times(thetas, q)[:, 0, :] - y
        hits = strip_hits(z, np.float64(query.psi_value), query.variant, q[0], partition, p)
        return int(np.count_nonzero(hits))

    hits = sum(_map_chunks(chunk, samples, threads))
    return _estimate(hits, samples, seed, warning)


class PairClassification(typing.NamedTuple):
    """How two nonzero vectors q, q' relate.

    For proportional pairs q = s a and q' = s' a with gcd(s, s') = 1; the
    pair is ordered so that |s| >= |s'| and ``swapped`` records whether the
    inputs were exchanged.
    """

    kind: str
    a: tuple[int, ...] | None = None
    s: int = 0
    s2: int = 0
    swapped: bool = False


def classify_pair(
    q: typing.Sequence[int],
    q2: typing.Sequence[int],
    direction: typing.Sequence[int] | None = None,
) -> PairClassification:
    """Classify (q, q') as independent or proportional with coprime factors.

    Without ``direction`` the common vector a is the gcd of the pair, which
    always gives coprime factors. With ``direction`` both vectors must be
    integer multiples of it with coprime factors.
    """
    u = np.asarray(q, dtype=np.int64)
    w = np.asarray(q2, dtype=np.int64)
    if u.shape != w.shape:
        raise ValueError("q and q' must have the same length")
    if not u.any() or not w.any():
        raise ValueError("q and q' must be nonzero")
    # 2x2 minors vanish iff the pair is dependent
    minors = np.outer(u, w) - np.outer(w, u)
    if minors.any():
        return PairClassification("independent")
    pivot = int(np.flatnonzero(u)[0])
    if direction is None:
        # a = gcd(q, q') times the primitive direction of q
        a0 = u // math.gcd(*(int(x) for x in u))
        if a0[pivot] < 0:
            a0 = -a0
        a = math.gcd(*(int(x) for x in np.concatenate([u, w]))) * a0
    else:
        a = np.asarray(direction, dtype=np.int64)
        if a.shape != u.shape or not a.any():
            raise ValueError("direction must be a nonzero vector of the same length")
    if a[pivot] == 0 or u[pivot] % a[pivot] or w[pivot] % a[pivot]:
        raise ValueError(f"{tuple(u)} and {tuple(w)} are not integer multiples of {tuple(a)}")
    s, s2 = int(u[pivot] // a[pivot]), int(w[pivot] // a[pivot])
    if np.any(s * a != u) or np.any(s2 * a != w):
        raise ValueError(f"{tuple(u)} and {tuple(w)} are not integer multiples of {tuple(a)}")
    if math.gcd(s, s2) != 1:
        raise ValueError(f"Proportional pair with factors {s}, {s2} that are not coprime")
    swapped = abs(s2) > abs(s)
    if swapped:
        s, s2 = s2, s
    return PairClassification("proportional", tuple(int(x) for x in a), s, s2, swapped)


def pair_upper_bound(
    q: typing.Sequence[int],
    q2: typing.Sequence[int],
    psi: PsiFunction,
    n: int,
    classification: PairClassification | None = None,
) -> float:
    """Upper bound for the measure of E_q and E_q' together inside the box.

    4^n psi(|q|)^n psi(|q'|)^n for independent pairs, and
    12^n psi(|q|)^n max(psi(|q'|)^n, |s|^-n) for proportional ones, where
    q is the vector with the larger factor s.
    """
    if classification is None:
        classification = classify_pair(q, q2)
    if classification.swapped:
        q, q2 = q2, q
    psi_q = evaluate(psi, max(abs(int(x)) for x in q))
    psi_q2 = evaluate(psi, max(abs(int(x)) for x in q2))
    if classification.kind == "independent":
        return 4**n * psi_q**n * psi_q2**n
    return 12**n * psi_q**n * max(psi_q2**n, abs(classification.s) ** -n)


class PairMeasure(typing.NamedTuple):
    """Monte Carlo measure of a pair of strips with its classification and bound."""

    classification: PairClassification
    estimate: MeasureEstimate
    bound: float


def mc_pair_measure(
    q: typing.Sequence[int],
    q2: typing.Sequence[int],
    y: typing.Sequence[float],
    psi: PsiFunction,
    variant: str = "F",
    partition: Partition | None = None,
    samples: int = 10**5,
    seed: int = 0,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
    direction: typing.Sequence[int] | None = None,
) -> PairMeasure:
    """Estimate the measure of the intersection of two strips in the box."""
    if variant not in ("F", "E"):
        raise ValueError(f"Pair measures support variants F and E, got {variant!r}")
    classification = classify_pair(q, q2, direction)
    _check_samples(samples, budget)
    qs = np.array([q, q2], dtype=np.int64)
    m, n = qs.shape[1], len(y)
    y_arr = np.asarray(y, dtype=np.float64)
    psi_vals = evaluate_many(psi, np.abs(qs).max(axis=1))

    def chunk(index: int, size: int) -> int:
        thetas = sample_box(m, n, size, seed, STREAM_PAIR, index)
        z = theta_times(thetas, qs) - y_arr
        hits = strip_hits(z, psi_vals, variant, qs, partition)
        return int(np.count_nonzero(hits.all(axis=1)))

    hits = sum(_map_chunks(chunk, samples, threads))
    bound = pair_upper_bound(q, q2, psi, n, classification)
    return PairMeasure(classification, _estimate(hits, samples, seed), bound)


def strip_volume_lower_bound(
    q: typing.Sequence[int],
    p: typing.Sequence[int],
    y: typing.Sequence[float],
    psi_value: float,
    m: int,
    n: int,
) -> float:
    """Lower bound (psi / (2^(m-2) (m-1)! |q|_2))^n for the measure of R_v in the box.

    Requires |p| <= |q|_2 / 6, max |(y_i - p_i) / |q|_2| <= 1/5 and
    psi <= |q|_2 / 20, which together keep each slab inside the inscribed
    ball of the box.
    """
    if len(q) != m or len(p) != n or len(y) != n:
        raise ValueError("Dimensions of q, p, y do not match m, n")
    q2 = math.sqrt(sum(int(x) ** 2 for x in q))
    if q2 == 0:
        raise ValueError("q must be nonzero")
    v = max(abs(float(yi) - int(pi)) / q2 for yi, pi in zip(y, p))
    if max(abs(int(x)) for x in p) > q2 / 6 or v > 0.2 or psi_value > q2 / 20:
        raise ValueError(
            "hypothesis of the strip volume bound not met: need |p| <= |q|_2/6, "
            f"max|v_i| <= 1/5 and psi <= |q|_2/20 (|q|_2={q2:.4g}, max|v_i|={v:.4g})"
        )
    return (psi_value / (2.0 ** (m - 2) * math.factorial(m - 1) * q2)) ** n


class ShellMoments(typing.NamedTuple):
    """First and second moments of N(Theta) = #{q : 1 <= |q| <= Q, Theta in E_q}.

    ``first`` estimates the sum of the strip measures and ``second`` the
    double sum of pairwise intersections.
    """

    Q: int
    first: float
    first_stderr: float
    second: float
    samples: int
    seed: int


def shell_counts(
    m: int,
    n: int,
    y: typing.Sequence[float],
    psi: PsiFunction,
    partition: Partition,
    Q: int,
    samples: int,
    seed: int = 0,
    variant: str = "E",
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> npt.NDArray[np.int64]:
    """Per-sample counts of strips containing Theta, split by shell.

    Returns:
        Array of shape (samples, Q) whose entry [i, l-1] counts the q with
        |q| = l whose strip contains the i-th sampled matrix.
    """
    _check_samples(samples, budget)
    grid = q_grid(m, Q, budget)
    shells = np.abs(grid).max(axis=1)
    psi_vals = evaluate_many(psi, shells)
    y_arr = np.asarray(y, dtype=np.float64)
    block = max(1, 2**22 // (SAMPLE_CHUNK * n))

    def chunk(index: int, size: int) -> npt.NDArray[np.int64]:
        thetas = sample_box(m, n, size, seed, STREAM_MOMENTS, index)
        counts = np.zeros((size, Q), dtype=np.int64)
        for start in range(0, len(grid), block):
            sl = slice(start, start + block)
            z = theta_times(thetas, grid[sl]) - y_arr
            hits = strip_hits(z, psi_vals[sl], variant, grid[sl], partition)
            for shell in np.unique(shells[sl]):
                mask = shells[sl] == shell
                counts[:, shell - 1] += hits[:, mask].sum(axis=1)
        return counts

    return np.concatenate(_map_chunks(chunk, samples, threads), axis=0)


def shell_count_moments(
    m: int,
    n: int,
    y: typing.Sequence[float],
    psi: PsiFunction,
    partition: Partition,
    Qs: typing.Sequence[int],
    samples: int,
    seed: int = 0,
    variant: str = "E",
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> list[ShellMoments]:
    """Moments of N(Theta) at every truncation in ``Qs`` from one set of samples."""
    counts = shell_counts(
        m, n, y, psi, partition, max(Qs), samples, seed, variant, threads, budget
    )
    cumulative = np.cumsum(counts, axis=1)
    moments = []
    for Q in Qs:
        N = cumulative[:, Q - 1]
        first = float(N.sum()) / samples
        second = float((N * N).sum()) / samples
        stderr = float(N.std(ddof=1)) / math.sqrt(samples) if samples > 1 else 0.0
        moments.append(ShellMoments(int(Q), first, stderr, second, samples, seed))
    return moments


def _check_lower_bound_hypotheses(m: int, n: int, psi: PsiFunction, Q: int) -> None:
    if (m, n) == (1, 1):
        raise ValueError("The averaged lower bound needs m + n >= 3")
    if float(evaluate_many(psi, np.arange(1, Q + 1)).max()) >= 0.5:
        raise ValueError("The averaged lower bound needs psi < 1/2")
    if Q >= 2 and not check_decay_hypothesis(psi, m, n, Q):
        raise ValueError("The averaged lower bound needs x^(m-1) psi(x)^n non-increasing")


class AveragedBound(typing.NamedTuple):
    """Sum of strip measures over shells <= Q against the series partial sum."""

    Q: int
    lhs: float
    lhs_stderr: float
    rhs: float
    ratio: float


def averaged_lower_bound(
    m: int,
    n: int,
    y: typing.Sequence[float],
    psi: PsiFunction,
    partition: Partition,
    Qs: typing.Sequence[int],
    samples: int,
    seed: int = 0,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> list[AveragedBound]:
    """Estimate sum_{1 <= |q| <= Q} lambda(E_q) and compare with sum l^(m-1) psi(l)^n.

    The ratio lhs/rhs is an empirical estimate of the constant in the
    averaged lower bound; it is reported, never asserted.
    """
    _check_lower_bound_hypotheses(m, n, psi, max(Qs))
    moments = shell_count_moments(
        m, n, y, psi, partition, Qs, samples, seed, "E", threads, budget
    )
    out = []
    for mom in moments:
        rhs = series_partial_sum(psi, m, n, mom.Q)
        out.append(AveragedBound(mom.Q, mom.first, mom.first_stderr, rhs, mom.first / rhs))
    return out


class BorelCantelliPoint(typing.NamedTuple):
    """(sum of measures)^2 / (double sum of pairwise measures) at truncation Q."""

    Q: int
    numerator: float
    denominator: float
    ratio: float
    analytic_denominator: float


def denominator_upper_bound(psi: PsiFunction, m: int, n: int, Q: int) -> float:
    """Analytic majorant of the pairwise double sum.

    12^n 16^m S^2 + 12^n 4^(m+1) (sum_{q <= Q} phi(q) / q^(m+n)) S with
    S = sum_{l <= Q} l^(m-1) psi(l)^n.
    """
    S = series_partial_sum(psi, m, n, Q)
    q = np.arange(1, Q + 1, dtype=np.float64)
    tail = math.fsum(totients(Q)[1:] / q ** (m + n))
    return 12.0**n * 16.0**m * S * S + 12.0**n * 4.0 ** (m + 1) * tail * S


def limsup_floor(c: float, m: int, n: int) -> float:
    """The measure floor 12^-n 16^-m c^2 implied by an averaged constant c."""
    return c * c / (12.0**n * 16.0**m)


def borel_cantelli_ratio(
    m: int,
    n: int,
    y: typing.Sequence[float],
    psi: PsiFunction,
    partition: Partition,
    Qs: typing.Sequence[int],
    samples: int,
    seed: int = 0,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> list[BorelCantelliPoint]:
    """The second-moment ratio (E N)^2 / E[N^2] at each truncation.

    E[N] is the sum of the strip measures and E[N^2] the double sum of
    their pairwise intersections. A zero numerator gives ratio 0.
    """
    _check_lower_bound_hypotheses(m, n, psi, max(Qs))
    moments = shell_count_moments(
        m, n, y, psi, partition, Qs, samples, seed, "E", threads, budget
    )
    out = []
    for mom in moments:
        numerator = mom.first**2
        ratio = numerator / mom.second if numerator > 0 else 0.0
        out.append(
            BorelCantelliPoint(
                mom.Q, numerator, mom.second, ratio, denominator_upper_bound(psi, m, n, mom.Q)
            )
        )
    return out


class PushforwardResult(typing.NamedTuple):
    """Chi-square uniformity test of Theta q reduced mod 1."""

    statistic: float
    dof: int
    z: float
    in_band: bool
    samples: int
    seed: int


def pushforward_check(
    q: typing.Sequence[int],
    n: int = 1,
    samples: int = 10**5,
    bins: int = 16,
    seed: int = 0,
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> PushforwardResult:
    """Test that Theta -> Theta q mod 1 pushes the box measure to the uniform torus measure.

    The statistic is Pearson's chi-square over a regular grid of bins^n
    cells; with the normal approximation z = (chi2 - dof) / sqrt(2 dof)
    the result is in band when |z| <= 2.576.
    """
    q_arr = np.array([q], dtype=np.int64)
    if not q_arr.any():
        raise ValueError("q must be nonzero")
    _check_samples(samples, budget)
    cells = bins**n
    if cells < 16:
        raise ValueError(f"Need at least 16 histogram cells, got {cells}")
    if cells > samples / 10 or samples / cells < 50:
        raise ValueError(f"under-sampled histogram: {samples} samples for {cells} cells")
    m = q_arr.shape[1]

    def chunk(index: int, size: int) -> npt.NDArray[np.int64]:
        thetas = sample_box(m, n, size, seed, STREAM_PUSHFORWARD, index)
        z = theta_times(thetas, q_arr)[:, 0, :]
        cell = np.minimum(np.floor((z - np.floor(z)) * bins).astype(np.int64), bins - 1)
        flat = np.ravel_multi_index(tuple(cell.T), (bins,) * n)
        return np.bincount(flat, minlength=cells)

    observed = np.sum(_map_chunks(chunk, samples, threads), axis=0)
    expected = samples / cells
    statistic = float(np.sum((observed - expected) ** 2) / expected)
    dof = cells - 1
    z = (statistic - dof) / math.sqrt(2 * dof)
    return PushforwardResult(statistic, dof, z, abs(z) <= CHI2_BAND, samples, seed)


def torus_ball_membership(
    z: npt.ArrayLike, q: int, y: npt.ArrayLike, r: float
) -> npt.NDArray[np.bool_] | bool:
    """z in B_q(y, r), i.e. ||q z - y|| <= r on the torus."""
    if q == 0:
        raise ValueError("q must be nonzero")
    z = np.asarray(z, dtype=np.float64)
    result = nearest_integer_distance(q * z - np.asarray(y, dtype=np.float64)) <= r
    return bool(result) if result.ndim == 0 else result


def strip_membership_via_torus(
    theta: npt.ArrayLike, q: typing.Sequence[int], y: npt.ArrayLike, r: float
) -> bool:
    """T_q(Theta) in B_1(y, r); agrees with F_q membership."""
    theta = np.atleast_2d(np.asarray(theta, dtype=np.float64))
    image = theta_times(theta[None], np.array([q], dtype=np.int64))[0, 0]
    return bool(torus_ball_membership(image - np.floor(image), 1, y, r))
