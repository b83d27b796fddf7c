# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Test configuration."""

import numpy as np
import pytest

from dioprim.partitions import trivial_partition
from dioprim.psi import constant


@pytest.fixture
def rng():
    """Seeded generator for building random test inputs."""
    return np.random.default_rng(20260116)


@pytest.fixture(scope="module")
def half_instance_args():
    """Theta = 1/2, y = 0, psi = 0.4, trivial partition on m = n = 1."""
    return {
        "theta": [[0.5]],
        "y": [0.0],
        "psi": constant(0.4),
        "partition": trivial_partition(1, 1),
    }

