# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
import pytest
from django.core.exceptions import ValidationError

from spectra_app.exceptions import PotentialDocumentError
from spectra_app.forms import parse_potential_document
from spectra_app.potential import CellPotential, HeteroPotential, NCellPotential


def test_cell_document():
    pot = parse_potential_document(
        '{"kind": "cell", "a": 1, "segments": [[0, 0.5, 10], [0.5, 1, 0]]}'
    )
    assert isinstance(pot, CellPotential), "Should build a cell"
    assert pot.values == (10.0, 0.0), "Should keep segment values"


def test_ncell_document():
    pot = parse_potential_document(
        '{"kind": "ncell", "n": 8, "cell": {"a": 1, "segments": [[0, 1, -4]]}}'
    )
    assert isinstance(pot, NCellPotential), "Should build an n-cell potential"
    assert pot.n == 8, "Should read n"


def test_hetero_document():
    pot = parse_potential_document(
        '{"kind": "hetero", "cells": ['
        '{"x_lo": 0, "x_hi": 1, "segments": [[0, 1, -2]]},'
        '{"x_lo": 2, "x_hi": 3, "segments": [[2, 2.5, -1], [2.5, 3, 4]]}]}'
    )
    assert isinstance(pot, HeteroPotential), "Should build a hetero potential"
    assert pot.cut_points == (1.0,), "Should expose the cell boundaries"


@pytest.mark.parametrize(
    "text, location",
    [
        ('{"kind": "cell", "a": "1", "segments": [[0, 1, 0]]}', "$.a"),
        ('{"kind": "cell", "a": 1, "segments": [[0, 1]]}', "$.segments"),
        ('{"kind": "cell", "a": 1, "segments": [[0, 1, 0]], "b": 2}', "$"),
        ('{"kind": "ncell", "n": 2.5, "cell": {"a": 1, "segments": []}}', "$.n"),
        ('{"kind": "ncell", "n": 2, "cell": [1]}', "$.cell"),
        ('{"kind": "hetero", "cells": []}', "$.cells"),
        (
            '{"kind": "hetero", "cells": [{"x_lo": 0, "x_hi": 1}]}',
            "$.cells[0].segments",
        ),
        ('{"kind": "slab"}', "$.kind"),
    ],
)
def test_schema_errors_carry_location(text, location):
    with pytest.raises(PotentialDocumentError) as error:
        parse_potential_document(text)
    assert error.value.location == location, f"Should point at {location}"


def test_non_finite_numbers_are_refused():
    with pytest.raises(PotentialDocumentError):
        parse_potential_document(
            '{"kind": "cell", "a": 1, "segments": [[0, 1, NaN]]}'
        )


def test_invalid_json_reports_position():
    with pytest.raises(PotentialDocumentError) as error:
        parse_potential_document('{"kind": "cell",')
    assert error.value.location.startswith("line 1"), "Should report the position"


def test_semantic_errors_come_from_the_builders():
    with pytest.raises(ValidationError) as error:
        parse_potential_document(
            '{"kind": "cell", "a": 1, "segments": [[0, 0.6, 1], [0.5, 1, 0]]}'
        )
    assert not isinstance(
        error.value, PotentialDocumentError
    ), "Overlaps are not schema errors"
    assert error.value.code == "overlap", "Should report the overlap"
