# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
import math

import numpy as np
import pytest

from spectra_app import oracle
from spectra_app.bands import (
    ALLOWED,
    FORBIDDEN,
    bloch_phase,
    build_quasimomentum,
    discriminant,
    monodromy,
    quasimomentum_at,
    scan_zones,
)
from spectra_app.exceptions import DomainError, OutOfRangeError


def test_free_discriminant(free_cell):
    energies = np.array([-4.0, 0.0, 2.0, 30.0])
    expected = [
        2 * math.cosh(2.0),
        2.0,
        2 * math.cos(math.sqrt(2.0)),
        2 * math.cos(math.sqrt(30.0)),
    ]
    assert np.allclose(
        discriminant(free_cell, energies), expected
    ), "Free cell should give 2 cos(√E a)"


def test_kronig_penney_monodromy_matches_ode(kronig_penney):
    trace = monodromy(kronig_penney, 1.0).trace
    reference = np.trace(oracle.ode_transfer(kronig_penney.pieces(), 1.0))
    assert trace == pytest.approx(reference, abs=1e-8), "Should match the ODE oracle"


def test_zone_table_alternates(shallow_well):
    table = scan_zones(shallow_well, 40.0)
    kinds = [zone.kind for zone in table.zones]
    assert kinds[0] == FORBIDDEN, "The line below the spectrum is forbidden"
    assert all(
        left != right for left, right in zip(kinds, kinds[1:])
    ), "Zones should alternate"
    assert table.zones[0].E_lo == -math.inf, "First zone should start at −∞"
    assert table.zones[-1].E_hi == 40.0, "Last zone should stop at the ceiling"
    for edge in table.edges:
        assert abs(abs(discriminant(shallow_well, edge)) - 2) < 1e-8, (
            f"Edge {edge} should satisfy |Tr M| = 2"
        )


def test_gap_indices_count_the_bands(kronig_penney):
    table = scan_zones(kronig_penney, 60.0)
    assert [gap.index for gap in table.gaps] == list(
        range(len(table.gaps))
    ), "Gap j should carry index j − 1"
    assert [band.index for band in table.bands] == list(
        range(1, len(table.bands) + 1)
    ), "Bands should be numbered from 1"


def test_zone_count_stable_under_refinement(kronig_penney):
    coarse = scan_zones(kronig_penney, 60.0, initial_grid=2000)
    fine = scan_zones(kronig_penney, 60.0, initial_grid=4000)
    assert len(coarse.zones) == len(fine.zones), "Grid doubling should not add zones"
    assert np.allclose(coarse.edges, fine.edges, atol=1e-9), "Edges should agree"


def test_free_cell_gaps_are_closed(free_cell):
    table = scan_zones(free_cell, 50.0)
    closed = [gap.E_lo for gap in table.closed_gaps]
    assert np.allclose(
        closed, [math.pi**2, 4 * math.pi**2], atol=1e-8
    ), "Free cell gaps should close at (lπ)²"
    assert len(table.open_gaps) == 1, "Only the gap below zero should be open"


def test_scan_rejects_low_ceiling(shallow_well):
    with pytest.raises(DomainError):
        scan_zones(shallow_well, -10.0)


def test_quasimomentum_is_monotone(kronig_penney):
    q = build_quasimomentum(kronig_penney, 60.0)
    grid = np.linspace(kronig_penney.min_value - 1, 60.0, 10_000)
    turns = q.turns(grid)
    assert np.all(np.diff(turns) >= -1e-12), "a·p/π should never decrease"
    assert turns[0] == 0, "a·p should vanish below the first band"
    for band in q.zone_table.complete_bands:
        assert q.turns(band.E_hi) == band.index, "Each band should add one turn"


def test_quasimomentum_free_limit(free_cell):
    q = build_quasimomentum(free_cell, 50.0)
    for E in (1.0, 12.0, 45.0):
        assert q.at(E) == pytest.approx(
            math.sqrt(E), abs=1e-9
        ), "Free quasimomentum should be √E"
    assert quasimomentum_at(q, 4.0) == pytest.approx(2.0, abs=1e-9), "p(4) = 2"


def test_bloch_phase_rejects_open_gaps(kronig_penney):
    q = build_quasimomentum(kronig_penney, 60.0)
    gap = q.zone_table.open_gaps[1]
    with pytest.raises(DomainError):
        bloch_phase(q, (gap.E_lo + gap.E_hi) / 2)
    band = q.zone_table.bands[0]
    middle = (band.E_lo + band.E_hi) / 2
    assert bloch_phase(q, middle) == pytest.approx(
        math.acos(discriminant(kronig_penney, middle) / 2)
    ), "Inside band 1 the phase should be arccos(Tr M / 2)"


def test_energies_above_the_ceiling_are_refused(kronig_penney):
    q = build_quasimomentum(kronig_penney, 20.0)
    with pytest.raises(OutOfRangeError):
        q.turns(25.0)


def test_zone_lookup(kronig_penney):
    table = scan_zones(kronig_penney, 60.0)
    band = table.bands[1]
    assert table.locate((band.E_lo + band.E_hi) / 2) == band, "Should find band 2"
    assert table.locate(band.E_lo).kind == ALLOWED, "Band closures win at edges"
    nudged = table.nudge(np.array([band.E_lo]), 1e-6)
    assert nudged[0] == pytest.approx(band.E_lo + 1e-6), "Edges should be moved off"
