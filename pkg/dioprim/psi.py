# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Approximating functions psi: N -> (0, inf).

Three kinds are supported:

- ``power``:  psi(x) = c x^-s
- ``logpow``: psi(x) = c / (x^s log(x + 1)^t)
- ``table``:  explicit values psi(1), ..., psi(J), extended by the last value

Every function carries an integer multiplier kappa and an integer dilation
l, and evaluates to kappa * psi(l * j).
"""

from __future__ import annotations

import logging
import math
import typing
from pathlib import Path

import numpy as np
import numpy.typing as npt

logger = logging.getLogger("dioprim")

KINDS = ("power", "logpow", "table")
DECAY_RTOL = 1e-12


class PsiFunction(typing.NamedTuple):
    """An approximating function with its scalings."""

    kind: str
    c: float = 1.0
    s: float = 0.0
    t: float = 0.0
    table: tuple[float, ...] = ()
    kappa: int = 1
    l: int = 1  # noqa: E741
    source: str = ""


def make_psi(
    kind: str,
    c: float = 1.0,
    s: float = 0.0,
    t: float = 0.0,
    table: typing.Sequence[float] = (),
    kappa: int = 1,
    l: int = 1,  # noqa: E741
    source: str = "",
) -> PsiFunction:
    """Build a validated ``PsiFunction``."""
    if kind not in KINDS:
        raise ValueError(f"Unknown psi kind {kind!r}, expected one of {KINDS}")
    if kind == "table":
        if len(table) == 0:
            raise ValueError("Table psi needs at least one value")
        if any(not v > 0 for v in table):
            raise ValueError("Table psi values must be positive")
    elif not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    if s < 0 or t < 0:
        raise ValueError(f"Exponents must be non-negative, got s={s}, t={t}")
    if int(kappa) != kappa or kappa < 1:
        raise ValueError(f"kappa must be a positive integer, got {kappa}")
    if int(l) != l or l < 1:
        raise ValueError(f"l must be a positive integer, got {l}")
    return PsiFunction(
        kind,
        float(c),
        float(s),
        float(t),
        tuple(float(v) for v in table),
        int(kappa),
        int(l),
        source,
    )


def power(c: float, s: float) -> PsiFunction:
    """psi(x) = c x^-s."""
    return make_psi("power", c=c, s=s)


def constant(c: float) -> PsiFunction:
    """psi = c."""
    return make_psi("power", c=c, s=0.0)


def scaled(f: PsiFunction, kappa: int = 1, l: int = 1) -> PsiFunction:  # noqa: E741
    """kappa * f_l, composed with the scalings already on ``f``."""
    return make_psi(
        f.kind, f.c, f.s, f.t, f.table, f.kappa * kappa, f.l * l, f.source
    )


def evaluate_many(f: PsiFunction, js: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Vectorised ``evaluate``."""
    j = np.asarray(js, dtype=np.int64)
    if np.any(j < 1):
        raise ValueError("psi is only defined on positive integers")
    x = (f.l * j).astype(np.float64)
    if f.kind == "power":
        base = f.c * x ** (-f.s)
    elif f.kind == "logpow":
        base = f.c / (x**f.s * np.log(x + 1.0) ** f.t)
    else:
        values = np.asarray(f.table, dtype=np.float64)
        base = values[np.minimum(f.l * j, len(values)) - 1]
    return f.kappa * base


def evaluate(f: PsiFunction, j: int) -> float:
    """kappa * psi(l * j) for a positive integer j."""
    if j < 1:
        raise ValueError(f"psi is only defined on positive integers, got {j}")
    return float(evaluate_many(f, [j])[0])


def _series_terms(f: PsiFunction, m: int, n: int, j: npt.NDArray[np.int64]) -> npt.NDArray:
    return j.astype(np.float64) ** (m - 1) * evaluate_many(f, j) ** n


def check_decay_hypothesis(f: PsiFunction, m: int, n: int, Jmax: int) -> bool:
    """True iff j^(m-1) psi(j)^n is non-increasing on 1 <= j <= Jmax.

    Consecutive terms may grow by a relative 1e-12 to absorb rounding.
    """
    if Jmax < 2:
        raise ValueError(f"Jmax must be at least 2, got {Jmax}")
    g = _series_terms(f, m, n, np.arange(1, Jmax + 1, dtype=np.int64))
    return bool(np.all(g[1:] <= g[:-1] * (1 + DECAY_RTOL)))


def series_partial_sum(f: PsiFunction, m: int, n: int, Q: int) -> float:
    """Sum of j^(m-1) psi(j)^n for 1 <= j <= Q, compensated."""
    if Q < 1:
        raise ValueError(f"Q must be at least 1, got {Q}")
    return math.fsum(_series_terms(f, m, n, np.arange(1, Q + 1, dtype=np.int64)))


def series_partial_sums(f: PsiFunction, m: int, n: int, Qs: typing.Sequence[int]) -> list[float]:
    """``series_partial_sum`` at each truncation in ``Qs``."""
    return [series_partial_sum(f, m, n, Q) for Q in Qs]


class ScaledSeries(typing.NamedTuple):
    """Both sides of the dilation inequality for the series."""

    lower_bound: float
    scaled_sum: float


def scaled_series_lower_bound(
    f: PsiFunction, m: int, n: int, l: int, Q: int  # noqa: E741
) -> ScaledSeries:
    """Compare the series of psi_l with its lower bound through psi.

    Returns l^-m sum_{l <= j <= Q} j^(m-1) psi(j)^n together with
    sum_{j <= Q/l} j^(m-1) psi_l(j)^n, which must dominate it when
    j^(m-1) psi(j)^n is non-increasing.

    Raises:
        RuntimeError: if the inequality fails.
    """
    if l < 1:
        raise ValueError(f"l must be at least 1, got {l}")
    if l == 1:
        total = series_partial_sum(f, m, n, Q)
        return ScaledSeries(total, total)
    if Q < l:
        lower = 0.0
    else:
        lower = math.fsum(_series_terms(f, m, n, np.arange(l, Q + 1, dtype=np.int64))) / l**m
    upper_index = Q // l
    scaled_sum = series_partial_sum(scaled(f, 1, l), m, n, upper_index) if upper_index else 0.0
    if scaled_sum < lower * (1 - DECAY_RTOL):
        raise RuntimeError(
            f"Dilated series {scaled_sum!r} is below its lower bound {lower!r} (l={l}, Q={Q})"
        )
    return ScaledSeries(lower, scaled_sum)


def doubling_ratio(f: PsiFunction, Jmax: int) -> float:
    """min over l <= Jmax of psi(2l)/psi(l)."""
    j = np.arange(1, Jmax + 1, dtype=np.int64)
    return float(np.min(evaluate_many(f, 2 * j) / evaluate_many(f, j)))


class CasselsRatio(typing.NamedTuple):
    """Behaviour of psi(l)/l on 1 <= l <= Jmax."""

    max_ratio: float
    decreasing: bool


def cassels_ratio(f: PsiFunction, Jmax: int) -> CasselsRatio:
    """max of psi(l)/l and whether psi(l)/l is non-increasing up to Jmax."""
    j = np.arange(1, Jmax + 1, dtype=np.int64)
    r = evaluate_many(f, j) / j
    return CasselsRatio(float(r.max()), bool(np.all(r[1:] <= r[:-1] * (1 + DECAY_RTOL))))


def _parse_params(body: str) -> dict[str, float]:
    params = {}
    for item in filter(None, (x.strip() for x in body.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"Malformed psi parameter {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError as e:
            raise ValueError(f"Malformed psi parameter {item!r}") from e
    return params


def _int_param(params: dict[str, float], name: str) -> int:
    value = params.pop(name, 1.0)
    if not value.is_integer():
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def read_table(path: str | Path) -> tuple[float, ...]:
    """Read psi values, one per line or comma-separated."""
    text = Path(path).read_text()
    try:
        return tuple(float(x) for x in text.replace(",", "\n").split())
    except ValueError as e:
        raise ValueError(f"Malformed psi table {path}") from e


def parse_psi(text: str) -> PsiFunction:
    """Parse ``power:c=1,s=1.5``, ``logpow:c=1,s=1,t=1`` or ``table:@file.csv``.

    Tables may also be given inline as ``table:0.4,0.3,0.2``. Any kind
    accepts trailing ``kappa=`` and ``l=`` scalings.
    """
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise ValueError(f"Malformed psi {text!r}")
    if kind == "table":
        head, _, scalings = body.partition(";")
        extra = _parse_params(scalings)
        if head.startswith("@"):
            values, source = read_table(head[1:]), head[1:]
        else:
            values, source = tuple(float(x) for x in head.split(",")), ""
        return make_psi(
            "table",
            table=values,
            kappa=_int_param(extra, "kappa"),
            l=_int_param(extra, "l"),
            source=source,
        )
    params = _parse_params(body)
    unknown = set(params) - {"c", "s", "t", "kappa", "l"}
    if unknown:
        raise ValueError(f"Unknown psi parameters {sorted(unknown)} in {text!r}")
    if kind == "power" and "t" in params:
        raise ValueError("power psi takes no t parameter")
    return make_psi(
        kind,
        c=params.get("c", 1.0),
        s=params.get("s", 0.0),
        t=params.get("t", 0.0),
        kappa=_int_param(params, "kappa"),
        l=_int_param(params, "l"),
    )


def format_psi(f: PsiFunction) -> str:
    """Plain-text form understood by ``parse_psi``."""
    scalings = ""
    if f.kappa != 1:
        scalings += f",kappa={f.kappa}"
    if f.l != 1:
        scalings += f",l={f.l}"
    if f.kind == "table":
        head = f"@{f.source}" if f.source else ",".join(repr(v) for v in f.table)
        return f"table:{head}" + (";" + scalings[1:] if scalings else "")
    body = f"c={f.c!r},s={f.s!r}"
    if f.kind == "logpow":
        body += f",t={f.t!r}"
    return f"{f.kind}:{body}{scalings}"
