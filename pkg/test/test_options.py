# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later

import logging

import numpy as np
import pytest

from dioprim.options import (
    DIOPRIM_DEFAULT_OPTIONS,
    check_options,
    format_config,
    format_matrix,
    format_vector,
    get_options,
    parse_config,
    parse_matrix,
    parse_vector,
    read_config,
)


def test_defaults_are_typed():
    for name, (kind, value, desc, choices) in DIOPRIM_DEFAULT_OPTIONS.items():
        assert isinstance(value, kind), name
        assert desc
        if choices is not None:
            assert value in choices


def test_get_options_priority():
    options = get_options({"seed": 7, "verbosity": 20})
    assert options["seed"] == 7
    assert options["threads"] == 1
    assert logging.getLogger("dioprim").level == 20
    get_options({"verbosity": 30})


def test_parse_config():
    text = """
# a comment
seed = 3
partition=m=1 n=1 pi={1,2}
unconstrained=TRUE
psi_value=0.25

regime=convergent
"""
    assert parse_config(text) == {
        "seed": 3,
        "partition": "m=1 n=1 pi={1,2}",
        "unconstrained": True,
        "psi_value": 0.25,
        "regime": "convergent",
    }


def test_config_round_trip():
    options = get_options({"psi": "power:c=1.0,s=1.5", "cond_max": 1e10, "theta": "0.1,0.2"})
    assert parse_config(format_config(options)) == options


def test_format_config_is_sorted():
    lines = format_config({"seed": 1, "m": 2, "budget": 10}).splitlines()
    assert lines == ["budget=10", "m=2", "seed=1"]


@pytest.mark.parametrize(
    "text,error",
    [
        ("colour=red", KeyError),
        ("seed=abc", ValueError),
        ("unconstrained=yes", ValueError),
        ("regime=borderline", ValueError),
        ("seed", ValueError),
    ],
)
def test_parse_config_rejects(text, error):
    with pytest.raises(error):
        parse_config(text)


def test_read_config(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("command=orbit\nbound=2\n")
    assert read_config(path) == {"command": "orbit", "bound": 2}
    with pytest.raises(FileNotFoundError):
        read_config(tmp_path / "missing.conf")


def test_parse_vector():
    assert np.array_equal(parse_vector("1, 2,3", int), [1, 2, 3])
    assert parse_vector("0.5,-0.25").tolist() == [0.5, -0.25]
    with pytest.raises(ValueError):
        parse_vector("1,a")


def test_parse_matrix():
    A = parse_matrix("0.5,0.1;0.2,0.3;1,2", 3, 2)
    assert A.shape == (3, 2)
    assert A[2, 1] == 2.0
    with pytest.raises(ValueError):
        parse_matrix("0.5,0.1;0.2", 2, 2)


def test_matrix_text_is_exact(rng):
    A = rng.uniform(-0.5, 0.5, size=(2, 3))
    assert np.array_equal(parse_matrix(format_matrix(A), 2, 3), A)
    assert format_vector([1, 2.5, True]) == "1,2.5,true"


def test_check_options_defaults():
    check_options(get_options())


@pytest.mark.parametrize(
    "name,value", [("cond_max", 0.5), ("cond_max", float("nan")), ("threads", 0), ("budget", -1)]
)
def test_check_options_rejects(name, value):
    with pytest.raises(ValueError, match=name):
        check_options(get_options({name: value}))
