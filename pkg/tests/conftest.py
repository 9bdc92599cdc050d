# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
import factory.random
import pytest

from spectra_app.bands import zone_table_for
from spectra_app.factory import BarrierCellFactory, CellFactory, WellCellFactory
from spectra_app.potential import save_potential


@pytest.fixture(autouse=True)
def seeded_factories():
    factory.random.reseed_random("ncell-spectra")
    yield
    zone_table_for.cache_clear()


@pytest.fixture
def free_cell():
    return CellFactory()


@pytest.fixture
def shallow_well():
    """v = −4 on [0, 1]."""
    return WellCellFactory(depth=-4)


@pytest.fixture
def deep_well():
    """v = −25 on [0, 1]."""
    return WellCellFactory(depth=-25)


@pytest.fixture
def kronig_penney():
    """Barrier V₀ = 10 on [0, 0.5], free on [0.5, 1]."""
    return BarrierCellFactory()


@pytest.fixture
def potential_file(tmp_path):
    def write(potential, name="potential.json"):
        path = tmp_path / name
        save_potential(potential, path)
        return str(path)

    return write
