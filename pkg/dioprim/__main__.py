#!/usr/bin/env python
# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later
"""Run a dioprim experiment."""

from dioprim.main import main

if __name__ == "__main__":
    import sys

    sys.exit(main())
