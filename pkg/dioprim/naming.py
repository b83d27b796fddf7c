# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Naming."""

from __future__ import annotations

import hashlib
import zlib

import numpy as np

import dioprim
from dioprim.options import OptionValue, format_config

# options that change where or how fast a run happens, not what it computes
_VOLATILE = ("out", "threads", "verbosity")


def compute_signature(options: dict[str, OptionValue], tag: str = "") -> str:
    """Compute the signature hash of a resolved configuration.

    Based on the options that influence results, the package version and
    an optional ``tag``.
    """
    relevant = {k: v for k, v in options.items() if k not in _VOLATILE}
    signatures = [format_config(relevant), str(dioprim.__version__), tag]
    string = ";".join(signatures)
    return hashlib.sha1(string.encode("utf-8")).hexdigest()


def stream_id(name: str) -> int:
    """Stable integer id of a named random stream."""
    return zlib.crc32(name.encode("utf-8"))


def derive_seed(seed: int, stream: str, index: int = 0) -> int:
    """A 63-bit seed for task ``index`` of ``stream`` under the root ``seed``."""
    state = np.random.SeedSequence(seed, spawn_key=(stream_id(stream), index)).generate_state(
        2, dtype=np.uint32
    )
    return (int(state[0]) << 31) ^ int(state[1])


def task_rng(seed: int, stream: str, index: int = 0) -> np.random.Generator:
    """Generator for task ``index`` of ``stream``."""
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(stream_id(stream), index))
    )
