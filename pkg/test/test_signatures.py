# Copyright (C) 2026 dioprim developers
#
# This file is part of dioprim.
#
# SPDX-License-Identifier:    LGPL-3.0-or-later

import os

import pytest

from dioprim import formatting, naming
from dioprim.options import get_options, parse_config


def test_signature_ignores_volatile_options():
    options = get_options({"command": "sieve"})
    reference = naming.compute_signature(options)
    for key, value in [("out", "elsewhere"), ("threads", 8), ("verbosity", 10)]:
        assert naming.compute_signature({**options, key: value}) == reference
    assert naming.compute_signature({**options, "seed": 1}) != reference
    assert naming.compute_signature(options, "orbit") != reference
    get_options({"verbosity": 30})


def test_derived_seeds():
    a = naming.derive_seed(0, "dichotomy", 0)
    assert a == naming.derive_seed(0, "dichotomy", 0)
    assert 0 <= a < 2**63
    assert len({naming.derive_seed(0, "dichotomy", i) for i in range(100)}) == 100
    assert naming.derive_seed(0, "theta") != naming.derive_seed(0, "dichotomy")
    assert naming.derive_seed(1, "theta") != naming.derive_seed(0, "theta")


def test_task_rng_streams():
    a = naming.task_rng(3, "theta").uniform(size=4)
    assert (a == naming.task_rng(3, "theta").uniform(size=4)).all()
    assert not (a == naming.task_rng(3, "theta", 1).uniform(size=4)).all()


def test_format_table():
    table = formatting.Table("t.csv", ("a", "b", "c", "word"), [(1, 0.1, True, "E1,2")])
    assert formatting.format_table(table) == 'a,b,c,word\n1,0.1,true,"E1,2"\n'


def test_format_table_keeps_float_precision():
    table = formatting.Table("t.csv", ("x",), [(1 / 3,), (1e-20,)])
    lines = formatting.format_table(table).splitlines()
    assert [float(x) for x in lines[1:]] == [1 / 3, 1e-20]


def test_format_table_rejects_ragged_rows():
    with pytest.raises(ValueError):
        formatting.format_table(formatting.Table("t.csv", ("a", "b"), [(1,)]))


def test_manifest():
    options = get_options({"command": "orbit", "bound": 3})
    text = formatting.format_manifest(options, "2026-01-01T00:00:00+00:00")
    first, _, rest = text.partition("\n")
    assert first == "# dioprim run 2026-01-01T00:00:00+00:00"
    assert parse_config(text) == options
    assert "bound=3" in rest.splitlines()


def test_write_results(tmp_path):
    tables = [
        formatting.Table("one.csv", ("a",), [(1,), (2,)]),
        formatting.Table("two.csv", ("b",), []),
    ]
    options = get_options({"command": "sieve"})
    out = str(tmp_path / "results")
    paths = formatting.write_results(tables, options, out, {"note.txt": "x\n"})
    assert [os.path.basename(p) for p in paths] == [
        formatting.MANIFEST,
        "one.csv",
        "two.csv",
        "note.txt",
    ]
    for path in paths:
        with open(path, "rb") as f:
            assert b"\r\n" not in f.read()
    with open(os.path.join(out, "one.csv")) as f:
        assert f.read() == "a\n1\n2\n"


def test_plot_script_is_valid_python():
    script = formatting.format_plot_script("growth.csv", "0.1.0")
    assert 'open("growth.csv")' in script
    compile(script, "plot_growth.py", "exec")
