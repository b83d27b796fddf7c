# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Experiment runners.

Each command of the command-line interface is a runner here that takes
resolved options and returns an ``ExperimentResult``: the tables to
write, any extra files and the number of oracle mismatches found while
running. Runners work in stages:

1. Setup

   - Input:  resolved options
   - Output: instances, partitions, approximating functions

   Option strings are parsed and validated; missing random inputs are
   drawn from streams derived from the ``seed`` option.

2. Computation

   - Input:  instances
   - Output: result rows

   The enumeration, counting or Monte Carlo work proper.

3. Oracle checks

   - Input:  result rows
   - Output: mismatch count

   Results are compared with an independent computation where one is
   affordable (brute-force sieve counts, Möbius counts, the full-box
   enumeration, exhaustive P(pi) scans).

Nothing is written to disk here; see ``dioprim.formatting``.
"""

from __future__ import annotations

import itertools
import logging
import typing
from time import time

import numpy as np
import numpy.typing as npt

import dioprim
from dioprim import arith, group, measure, naming, partitions, psi, solver
from dioprim.formatting import Cell, Table, format_plot_script
from dioprim.options import OptionValue, parse_matrix, parse_vector

logger = logging.getLogger("dioprim")

# largest full-box size for which enumerate cross-checks against the naive loop
NAIVE_CHECK_LIMIT = 10**6


class ExperimentResult(typing.NamedTuple):
    """Tables, extra files and oracle mismatches of one run."""

    tables: list[Table]
    mismatches: int = 0
    extra_files: dict[str, str] | None = None


def _print_timing(stage: int, timing: float) -> None:
    logger.info(f"Experiment stage {stage} finished in {timing:.4f} seconds.")


def _partition(text: str, m: int, n: int) -> partitions.Partition:
    """Partition from an option string; ``{1,2}/{3,4}`` is read over the given m, n."""
    text = text.strip()
    if not text:
        return partitions.trivial_partition(m, n)
    if not text.startswith("m"):
        text = f"m={m} n={n} pi={text}"
    return partitions.parse_partition(text)


def _psi(text: str) -> psi.PsiFunction:
    """Approximating function from an option string; a bare number is a constant."""
    text = text.strip()
    if not text:
        raise ValueError("This command needs a psi option")
    try:
        value = float(text)
    except ValueError:
        return psi.parse_psi(text)
    return psi.constant(value)


def _int_vector(text: str, name: str) -> tuple[int, ...]:
    if not text.strip():
        raise ValueError(f"This command needs a {name} option")
    return tuple(int(x) for x in parse_vector(text, int))


def _schedule(text: str) -> list[int]:
    Qs = list(_int_vector(text, "q_schedule"))
    if Qs[0] < 1 or any(b <= a for a, b in itertools.pairwise(Qs)):
        raise ValueError(f"Q schedule {Qs} is not strictly increasing from 1")
    return Qs


def _target(text: str, n: int) -> npt.NDArray[np.float64]:
    if not text.strip():
        return np.zeros(n)
    y = parse_vector(text)
    if y.shape != (n,):
        raise ValueError(f"y has length {y.size}, expected n = {n}")
    return y


def run_sieve(options: dict[str, OptionValue]) -> ExperimentResult:
    """Sieve counts against brute force for 1 <= q <= range_bound."""
    cpu_time = time()
    Q = int(options["q_max"])
    queries = [
        arith.sieve_query(str(options["beta"]), Q, q)
        for q in range(1, int(options["range_bound"]) + 1)
    ]
    _print_timing(1, time() - cpu_time)

    cpu_time = time()
    rows: list[tuple[Cell, ...]] = []
    mismatches = 0
    for query in queries:
        count = arith.legendre_sieve_count(query)
        brute = arith.brute_force_sieve_count(query)
        main_term = query.beta * query.Q * arith.euler_phi(query.q) / query.q
        remainder_ok = abs(count - main_term) <= arith.sieve_error_bound(query.q)
        match = count == brute
        mismatches += (not match) + (not remainder_ok)
        rows.append((query.q, query.Q, str(query.beta), count, brute, match, remainder_ok))
    _print_timing(2, time() - cpu_time)

    header = ("q", "Q", "beta", "sieve_count", "brute_force_count", "match", "remainder_ok")
    return ExperimentResult([Table("sieve.csv", header, rows)], mismatches)


def run_density(options: dict[str, OptionValue]) -> ExperimentResult:
    """Primitive points in [1, Q]^d against the Möbius count and 1/zeta(d)."""
    d = int(options["d"])
    budget = int(options["budget"])
    inverse_zeta = 1.0 / arith.zeta(d)
    rows: list[tuple[Cell, ...]] = []
    mismatches = 0
    for Q in _schedule(str(options["q_schedule"])):
        cpu_time = time()
        count = arith.count_primitive_in_box(d, Q, budget)
        moebius_count = arith.count_primitive_moebius(d, Q)
        density = count / Q**d
        match = count == moebius_count
        mismatches += not match
        rows.append(
            (d, Q, count, moebius_count, density, inverse_zeta, density / inverse_zeta - 1, match)
        )
        logger.info(f"Q={Q}: density {density:.6f}, 1/zeta({d}) = {inverse_zeta:.6f}")
        _print_timing(2, time() - cpu_time)

    header = (
        "d",
        "Q",
        "count",
        "moebius_count",
        "density",
        "inverse_zeta",
        "relative_error",
        "match",
    )
    return ExperimentResult([Table("density.csv", header, rows)], mismatches)


def _solution_rows(records: list[solver.SolutionRecord]) -> list[tuple[Cell, ...]]:
    return [(*r.q, *r.p, r.shell, r.residual) for r in records]


def solutions_header(m: int, n: int) -> tuple[str, ...]:
    """Columns of a solutions table."""
    return (
        *(f"qx{i}" for i in range(1, m + 1)),
        *(f"p{i}" for i in range(1, n + 1)),
        "shell",
        "residual",
    )


def run_enumerate(options: dict[str, OptionValue]) -> ExperimentResult:
    """Solutions with 1 <= |q| <= q_max of one instance.

    An empty ``theta`` is sampled from the seed, an empty ``y`` is zero and
    an empty ``phi`` selects the normalized system.
    """
    cpu_time = time()
    m, n = int(options["m"]), int(options["n"])
    seed = int(options["seed"])
    if str(options["theta"]).strip():
        theta = parse_matrix(str(options["theta"]), n, m)
    else:
        theta = solver.sample_theta(m, n, naming.task_rng(seed, "theta"))
    phi = parse_matrix(str(options["phi"]), n, n) if str(options["phi"]).strip() else None
    inst = solver.make_instance(
        theta,
        _target(str(options["y"]), n),
        _psi(str(options["psi"])),
        _partition(str(options["partition"]), m, n),
        phi,
        float(options["cond_max"]),
    )
    Q = int(options["q_max"])
    constrained = not options["unconstrained"]
    _print_timing(1, time() - cpu_time)

    cpu_time = time()
    records = solver.enumerate_any(
        inst, Q, constrained, int(options["threads"]), int(options["budget"])
    )
    logger.info(f"{len(records)} solutions with |q| <= {Q}")
    _print_timing(2, time() - cpu_time)

    cpu_time = time()
    mismatches = 0
    reach = np.abs(inst.y).max() + m * np.abs(theta).max() * Q + 2
    if inst.phi is not None:
        reach *= n * np.abs(np.linalg.inv(inst.phi)).max()
    box = (2 * Q + 1) ** m * (2 * reach + 1) ** n
    if box <= NAIVE_CHECK_LIMIT:
        naive = {(r.q, r.p) for r in solver.naive_enumerate(inst, Q, constrained)}
        found = {(r.q, r.p) for r in records}
        mismatches = len(naive ^ found)
        if mismatches:
            logger.error(f"Enumerator and full-box loop differ on {mismatches} solutions")
    else:
        logger.info(f"Full-box check skipped, box of {box:.3g} points")
    _print_timing(3, time() - cpu_time)

    table = Table("solutions.csv", solutions_header(m, n), _solution_rows(records))
    return ExperimentResult([table], mismatches)


def _default_psi(preset: str, regime: str, n: int, k: int) -> psi.PsiFunction:
    if preset == "primitive-simultaneous":
        return psi.power(1.0, 1 / n) if regime == "divergent" else psi.power(0.4, 2 / n)
    if preset == "paired-linear-form":
        return psi.power(1.0, 2 * k - 1) if regime == "divergent" else psi.power(0.4, 2 * k)
    raise ValueError("This command needs a psi option unless a preset is chosen")


def _dichotomy_setup(
    options: dict[str, OptionValue],
) -> tuple[int, int, partitions.Partition, psi.PsiFunction]:
    preset, regime = str(options["preset"]), str(options["regime"])
    if preset == "primitive-simultaneous":
        m, n = 1, int(options["n"])
        p = partitions.trivial_partition(m, n)
    elif preset == "paired-linear-form":
        k = int(options["k"])
        p = partitions.paired_partition(k)
        m, n = p.m, p.n
    else:
        m, n = int(options["m"]), int(options["n"])
        p = _partition(str(options["partition"]), m, n)
    if str(options["psi"]).strip():
        f = _psi(str(options["psi"]))
    else:
        f = _default_psi(preset, regime, n, int(options["k"]))
    return m, n, p, f


def run_dichotomy(options: dict[str, OptionValue]) -> ExperimentResult:
    """Growth of N(Q) against S(Q) over random instances.

    With the ``paired-linear-form`` preset every instance also draws a
    random Phi.
    """
    cpu_time = time()
    m, n, p, f = _dichotomy_setup(options)
    Qs = _schedule(str(options["q_schedule"]))
    seed, instances = int(options["seed"]), int(options["instances"])
    if instances < 1:
        raise ValueError(f"instances must be positive, got {instances}")
    if not partitions.meets_ergodicity_bound(p):
        logger.warning(f"{partitions.format_partition(p)} has a component of size <= n")
    if not psi.check_decay_hypothesis(f, m, n, max(2, min(Qs[-1], 10**6))):
        logger.warning(f"x^(m-1) psi(x)^n is not non-increasing for {psi.format_psi(f)}")
    sums = psi.series_partial_sums(f, m, n, Qs)
    logger.info(f"Declared regime {options['regime']}, partial sums {sums}")
    _print_timing(1, time() - cpu_time)

    cpu_time = time()
    constrained = not options["unconstrained"]
    growth_rows: list[tuple[Cell, ...]] = []
    counts = np.zeros((instances, len(Qs)), dtype=np.int64)
    for i in range(instances):
        rng = naming.task_rng(seed, "dichotomy", i)
        theta = solver.sample_theta(m, n, rng)
        if str(options["y"]).strip():
            y = _target(str(options["y"]), n)
        else:
            y = solver.sample_y(n, rng)
        phi = None
        if options["preset"] == "paired-linear-form":
            phi = solver.sample_phi(n, rng, float(options["cond_max"]))
        elif str(options["phi"]).strip():
            phi = parse_matrix(str(options["phi"]), n, n)
        inst = solver.make_instance(theta, y, f, p, phi, float(options["cond_max"]))
        curve = solver.growth_curve(
            inst, Qs, constrained, int(options["threads"]), int(options["budget"])
        )
        for j, point in enumerate(curve.points):
            counts[i, j] = point.N
            growth_rows.append((i, point.Q, point.N, point.S))
    _print_timing(2, time() - cpu_time)

    summary_rows: list[tuple[Cell, ...]] = []
    for j, Q in enumerate(Qs):
        p10, p50, p90 = (float(x) for x in np.percentile(counts[:, j], [10, 50, 90]))
        if j == 0:
            increasing: Cell = ""
            unchanged: Cell = ""
        else:
            increasing = float(np.mean(counts[:, j] > counts[:, j - 1]))
            unchanged = float(np.mean(counts[:, j] == counts[:, j - 1]))
            logger.info(f"Q={Q}: {increasing:.0%} of instances gained solutions")
        summary_rows.append((Q, p10, p50, p90, increasing, unchanged))

    tables = [
        Table("growth.csv", ("instance", "Q", "N", "S"), growth_rows),
        Table(
            "summary.csv",
            ("Q", "p10", "p50", "p90", "fraction_increasing", "fraction_unchanged"),
            summary_rows,
        ),
    ]
    plot = format_plot_script("growth.csv", dioprim.__version__)
    return ExperimentResult(tables, 0, {"plot_growth.py": plot})


MEASURE_HEADER = ("quantity", "estimate", "stderr", "samples", "seed")


def _measure_strip(options: dict[str, OptionValue]) -> ExperimentResult:
    q = _int_vector(str(options["q"]), "q")
    n = int(options["n"])
    y = _target(str(options["y"]), n)
    variant = str(options["variant"])
    p = _int_vector(str(options["p"]), "p") if variant == "R" else None
    query = measure.strip_query(q, y, float(options["psi_value"]), variant, p)
    est = measure.mc_measure(
        query,
        _partition(str(options["partition"]), len(q), n),
        int(options["samples"]),
        int(options["seed"]),
        int(options["threads"]),
        int(options["budget"]),
    )
    if est.warning:
        logger.warning(est.warning)
    bound = (2 * query.psi_value) ** n
    rows: list[tuple[Cell, ...]] = [
        (f"strip_{variant}", est.estimate, est.stderr, est.samples, est.seed),
        ("strip_upper_bound", bound, 0.0, 0, est.seed),
    ]
    return ExperimentResult([Table("measure.csv", MEASURE_HEADER, rows)])


def _measure_pair(options: dict[str, OptionValue]) -> ExperimentResult:
    q = _int_vector(str(options["q"]), "q")
    q2 = _int_vector(str(options["q2"]), "q2")
    n = int(options["n"])
    if str(options["psi"]).strip():
        f = _psi(str(options["psi"]))
    else:
        f = psi.constant(float(options["psi_value"]))
    result = measure.mc_pair_measure(
        q,
        q2,
        tuple(_target(str(options["y"]), n)),
        f,
        str(options["variant"]),
        _partition(str(options["partition"]), len(q), n),
        int(options["samples"]),
        int(options["seed"]),
        int(options["threads"]),
        int(options["budget"]),
    )
    est = result.estimate
    rows: list[tuple[Cell, ...]] = [
        (f"pair_{result.classification.kind}", est.estimate, est.stderr, est.samples, est.seed),
        ("pair_upper_bound", result.bound, 0.0, 0, est.seed),
    ]
    return ExperimentResult([Table("measure.csv", MEASURE_HEADER, rows)])


def _measure_strip_bound(options: dict[str, OptionValue]) -> ExperimentResult:
    q = _int_vector(str(options["q"]), "q")
    p = _int_vector(str(options["p"]), "p")
    n = len(p)
    y = _target(str(options["y"]), n)
    psi_value = float(options["psi_value"])
    bound = measure.strip_volume_lower_bound(q, p, tuple(y), psi_value, len(q), n)
    est = measure.mc_measure(
        measure.strip_query(q, y, psi_value, "R", p),
        None,
        int(options["samples"]),
        int(options["seed"]),
        int(options["threads"]),
        int(options["budget"]),
    )
    mismatches = int(est.estimate + 3 * est.stderr < bound)
    if mismatches:
        logger.error(f"Estimate {est.estimate} is below the strip volume bound {bound}")
    rows: list[tuple[Cell, ...]] = [
        ("strip_R", est.estimate, est.stderr, est.samples, est.seed),
        ("strip_volume_lower_bound", bound, 0.0, 0, est.seed),
    ]
    return ExperimentResult([Table("measure.csv", MEASURE_HEADER, rows)], mismatches)


def _moment_inputs(
    options: dict[str, OptionValue],
) -> tuple[int, int, npt.NDArray[np.float64], psi.PsiFunction, partitions.Partition, list[int]]:
    m, n = int(options["m"]), int(options["n"])
    return (
        m,
        n,
        _target(str(options["y"]), n),
        _psi(str(options["psi"])),
        _partition(str(options["partition"]), m, n),
        _schedule(str(options["q_schedule"])),
    )


def _measure_averaged(options: dict[str, OptionValue]) -> ExperimentResult:
    m, n, y, f, p, Qs = _moment_inputs(options)
    samples, seed = int(options["samples"]), int(options["seed"])
    bounds = measure.averaged_lower_bound(
        m, n, tuple(y), f, p, Qs, samples, seed, int(options["threads"]), int(options["budget"])
    )
    rows: list[tuple[Cell, ...]] = [
        (b.Q, b.lhs, b.lhs_stderr, b.rhs, b.ratio, samples, seed) for b in bounds
    ]
    header = ("Q", "lhs", "lhs_stderr", "rhs", "ratio", "samples", "seed")
    return ExperimentResult([Table("averaged.csv", header, rows)])


def _measure_borel_cantelli(options: dict[str, OptionValue]) -> ExperimentResult:
    m, n, y, f, p, Qs = _moment_inputs(options)
    samples, seed = int(options["samples"]), int(options["seed"])
    points = measure.borel_cantelli_ratio(
        m, n, tuple(y), f, p, Qs, samples, seed, int(options["threads"]), int(options["budget"])
    )
    rows: list[tuple[Cell, ...]] = [
        (b.Q, b.numerator, b.denominator, b.ratio, b.analytic_denominator, samples, seed)
        for b in points
    ]
    header = ("Q", "numerator", "denominator", "ratio", "analytic_denominator", "samples", "seed")
    return ExperimentResult([Table("borel_cantelli.csv", header, rows)])


def _measure_pushforward(options: dict[str, OptionValue]) -> ExperimentResult:
    result = measure.pushforward_check(
        _int_vector(str(options["q"]), "q"),
        int(options["n"]),
        int(options["samples"]),
        int(options["bins"]),
        int(options["seed"]),
        int(options["threads"]),
        int(options["budget"]),
    )
    if not result.in_band:
        logger.warning(f"Chi-square statistic out of band, z = {result.z:.3f}")
    header = ("statistic", "dof", "z", "in_band", "samples", "seed")
    row = (result.statistic, result.dof, result.z, result.in_band, result.samples, result.seed)
    return ExperimentResult([Table("pushforward.csv", header, [row])])


_MEASURE_MODES: dict[str, typing.Callable[[dict[str, OptionValue]], ExperimentResult]] = {
    "strip": _measure_strip,
    "pair": _measure_pair,
    "strip-bound": _measure_strip_bound,
    "averaged": _measure_averaged,
    "borel-cantelli": _measure_borel_cantelli,
    "pushforward": _measure_pushforward,
}


def run_measure(options: dict[str, OptionValue]) -> ExperimentResult:
    """Monte Carlo measure experiment selected by the ``mode`` option."""
    cpu_time = time()
    result = _MEASURE_MODES[str(options["mode"])](options)
    _print_timing(2, time() - cpu_time)
    return result


def run_orbit(options: dict[str, OptionValue]) -> ExperimentResult:
    """Orbit of (1, ..., 1) in a sup-norm ball, each point with a verified word."""
    cpu_time = time()
    p = _partition(str(options["partition"]), int(options["m"]), int(options["n"]))
    bound = int(options["bound"])
    ball = group.orbit_ball(p, bound, int(options["word_budget"]))
    rows: list[tuple[Cell, ...]] = [
        (*v, group.format_word(group.reduce_to_base(v, p))) for v in ball.vectors
    ]
    logger.info(f"{len(rows)} orbit points after {ball.expansions} expansions")
    _print_timing(2, time() - cpu_time)

    cpu_time = time()
    mismatches = 0
    if ball.complete and (2 * bound + 1) ** p.d <= int(options["budget"]):
        box = itertools.product(range(-bound, bound + 1), repeat=p.d)
        expected = {v for v in box if any(v) and partitions.is_in_p_pi(v, p)}
        mismatches = len(expected ^ set(ball.vectors))
        if mismatches:
            logger.error(f"Orbit and P(pi) differ on {mismatches} vectors")
    _print_timing(3, time() - cpu_time)

    header = (*(f"v{i}" for i in range(1, p.d + 1)), "word")
    return ExperimentResult([Table("orbit.csv", header, rows)], mismatches)


def run_fiber(options: dict[str, OptionValue]) -> ExperimentResult:
    """The hypercube of first columns of Theta for which (q, p) is a solution.

    The first column of ``theta`` is the free coordinate and is ignored.
    """
    m, n = int(options["m"]), int(options["n"])
    if str(options["theta"]).strip():
        theta = parse_matrix(str(options["theta"]), n, m)
    else:
        theta = solver.sample_theta(m, n, naming.task_rng(int(options["seed"]), "theta"))
    phi = parse_matrix(str(options["phi"]), n, n) if str(options["phi"]).strip() else np.eye(n)
    y = _target(str(options["y"]), n)
    q = _int_vector(str(options["q"]), "q")
    p = _int_vector(str(options["p"]), "p")
    psi_value = float(options["psi_value"])
    intervals = solver.fiber_hypercube(theta[:, 1:], phi, y, q + p, psi_value)
    rows: list[tuple[Cell, ...]] = [
        (i, lo, hi, (lo + hi) / 2, (hi - lo) / 2) for i, (lo, hi) in enumerate(intervals, 1)
    ]

    # hypercubes meeting the unit box have |p| <= c |q|
    mismatches = 0
    if all(lo <= 0.5 and hi >= -0.5 for lo, hi in intervals):
        c = solver.fiber_p_bound(theta[:, 1:], phi, y, psi_value, 0.5)
        if max(abs(x) for x in p) > c * max(abs(x) for x in q):
            mismatches = 1
            logger.error(f"|p| exceeds {c} |q| for a hypercube meeting the unit box")

    header = ("coordinate", "lower", "upper", "center", "half_width")
    return ExperimentResult([Table("fiber.csv", header, rows)], mismatches)


RUNNERS: dict[str, typing.Callable[[dict[str, OptionValue]], ExperimentResult]] = {
    "sieve": run_sieve,
    "density": run_density,
    "enumerate": run_enumerate,
    "dichotomy": run_dichotomy,
    "measure": run_measure,
    "orbit": run_orbit,
    "fiber": run_fiber,
}


def run_experiment(command: str, options: dict[str, OptionValue]) -> ExperimentResult:
    """Run ``command`` with resolved ``options``.

    Raises:
        KeyError: for an unknown command.
    """
    try:
        runner = RUNNERS[command]
    except KeyError:
        raise KeyError(f"Unknown command {command!r}, expected one of {sorted(RUNNERS)}") from None
    logger.info(79 * "*")
    logger.info(f"Running {command} ({naming.compute_signature(options, command)[:12]})")
    logger.info(79 * "*")
    result = runner(options)
    if result.mismatches:
        logger.error(f"{command}: {result.mismatches} oracle mismatches")
    return result

