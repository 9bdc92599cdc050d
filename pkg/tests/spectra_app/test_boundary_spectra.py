# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
import math

import numpy as np
import pytest
from django.core.exceptions import ValidationError

from spectra_app import oracle
from spectra_app.boundary_spectra import (
    DIRICHLET,
    DOUBLE,
    NEUMANN,
    NONE,
    PERIODIC,
    SIMPLE,
    SKEW,
    BoundaryConditions,
    boundary_residual,
    classify_periodic,
    periodic_count,
    periodic_eigenvalues,
    sl_count,
    sl_count_bounds,
    sl_eigenvalues,
)
from spectra_app.exceptions import DomainError, OutOfRangeError
from spectra_app.factory import RandomCellFactory
from spectra_app.potential import assemble_n_cell, build_cell

PI2 = math.pi**2


def test_boundary_condition_tokens():
    assert BoundaryConditions.from_tokens("dirichlet", "dirichlet") == DIRICHLET
    assert BoundaryConditions.from_tokens("Neumann", "neumann") == NEUMANN
    mixed = BoundaryConditions.from_tokens("0.5", 2)
    assert (mixed.alpha, mixed.beta) == (0.5, 2.0), "Radians should be parsed"
    assert mixed.case == "alpha_below_beta", "α < β should be recognised"


@pytest.mark.parametrize(
    "alpha, beta, code",
    [
        (math.pi, 1.0, "alpha_range"),
        (-0.1, 1.0, "alpha_range"),
        (0.5, 0.0, "beta_range"),
    ],
)
def test_boundary_conditions_are_range_checked(alpha, beta, code):
    with pytest.raises(ValidationError) as error:
        BoundaryConditions(alpha, beta)
    assert error.value.code == code, f"Should raise {code}"


def test_boundary_condition_cases():
    assert DIRICHLET.case == "dirichlet", "α = 0, β = π is the Dirichlet case"
    assert NEUMANN.case == "equal", "Neumann has α = β"
    assert BoundaryConditions(2.0, 1.0).case == "beta_below_alpha"


def test_dirichlet_levels_of_a_constant_interval(shallow_well):
    pot = assemble_n_cell(shallow_well, 3)
    spectrum = sl_eigenvalues(pot, DIRICHLET, -5.0, 30.0)
    expected = [-4 + (j * math.pi / 3) ** 2 for j in range(1, 6)]
    assert np.allclose(
        spectrum.eigenvalues, expected, atol=1e-8
    ), "Constant potential should give −4 + (jπ/3)²"
    for energy in spectrum.eigenvalues:
        assert boundary_residual(pot, DIRICHLET, energy) < 1e-7, "ψ(L) should vanish"


def test_neumann_levels_start_at_the_floor(shallow_well):
    pot = assemble_n_cell(shallow_well, 3)
    spectrum = sl_eigenvalues(pot, NEUMANN, -5.0, 10.0)
    assert spectrum.eigenvalues[0] == pytest.approx(-4.0, abs=1e-8), "Constant mode"
    assert spectrum.eigenvalues[1] == pytest.approx(-4 + PI2 / 9, abs=1e-8)


def test_neumann_count_matches_oracle(shallow_well):
    pot = assemble_n_cell(shallow_well, 3)
    reference = oracle.sl_eigenvalues(pot, math.pi / 2, math.pi / 2, 60.0)
    grid = np.linspace(-4.5, 40.0, 90)
    grid = grid[np.min(np.abs(grid[:, None] - reference[None, :]), axis=1) > 1e-3]
    counts = sl_count(pot, NEUMANN, grid)
    expected = [int(np.sum(reference <= E)) for E in grid]
    assert list(counts) == expected, "Counts should match the Neumann oracle"


def test_mixed_conditions_match_oracle(shallow_well):
    bc = BoundaryConditions(math.pi / 4, 3 * math.pi / 4)
    pot = assemble_n_cell(shallow_well, 2)
    ours = sl_eigenvalues(pot, bc, -5.0, 40.0).eigenvalues
    reference = oracle.sl_eigenvalues(pot, bc.alpha, bc.beta, 45.0)
    assert np.allclose(ours, reference[: len(ours)], atol=1e-4), "Should match FD"


def test_random_cell_levels_match_oracle():
    cell = RandomCellFactory(v_lo=-30.0, v_hi=10.0)
    pot = assemble_n_cell(cell, 2)
    bc = BoundaryConditions(0.3, 2.2)
    ours = sl_eigenvalues(pot, bc, pot.min_value - 1, 25.0).eigenvalues
    reference = oracle.sl_eigenvalues(pot, bc.alpha, bc.beta, 30.0)
    assert np.allclose(ours, reference[: len(ours)], atol=1e-3), "Should match FD"


def test_counts_are_monotone_and_bracketed():
    cell = RandomCellFactory()
    pot = assemble_n_cell(cell, 4)
    grid = np.linspace(pot.min_value - 1, 50.0, 300)
    for bc in (DIRICHLET, NEUMANN, BoundaryConditions(1.0, 2.0)):
        counts = sl_count(pot, bc, grid)
        assert np.all(np.diff(counts) >= 0), f"Counts should not decrease for {bc}"
        lower, upper = sl_count_bounds(pot, bc, grid)
        assert np.all((lower <= counts) & (counts <= upper)), f"Winding bounds {bc}"


def test_equal_angles_at_the_energy_floor():
    # e^x solves the constant well at E = v − 1 and meets α = β = π/4 at both ends
    cell = build_cell(1, [(0, 1, -4)])
    bc = BoundaryConditions(math.pi / 4, math.pi / 4)
    floor = cell.min_value - 1.0
    for n in (1, 3):
        pot = assemble_n_cell(cell, n)
        lower, upper = sl_count_bounds(pot, bc, floor)
        assert lower == sl_count(pot, bc, floor) == upper, "Winding and count agree"
        assert sl_count(pot, bc, floor - 1e-6) == 0, "Nothing below the first level"
        assert sl_count(pot, bc, floor + 1e-6) == 1, "The floor is the first level"


def test_open_count_excludes_eigenvalues(shallow_well):
    pot = assemble_n_cell(shallow_well, 2)
    first = sl_eigenvalues(pot, DIRICHLET, -5.0, 0.0).eigenvalues[0]
    assert sl_count(pot, DIRICHLET, first + 1e-7) == 1, "Closed count includes E₁"
    assert sl_count(pot, DIRICHLET, first - 1e-7, closed=False) == 0


def test_empty_window(shallow_well):
    spectrum = sl_eigenvalues(shallow_well, DIRICHLET, -5.0, -4.5)
    assert spectrum.eigenvalues == (), "No level below the potential"
    with pytest.raises(DomainError):
        sl_eigenvalues(shallow_well, DIRICHLET, 1.0, 0.0)


def test_free_periodic_levels(free_cell):
    spectrum = periodic_eigenvalues(free_cell, PERIODIC, 4.1 * PI2)
    levels = [
        (round(item.energy, 6), item.multiplicity) for item in spectrum.eigenvalues
    ]
    assert levels == [(0.0, 1), (round(4 * PI2, 6), 2)], "Should be 0 and 4π² twice"
    assert spectrum.count(4.1 * PI2) == 3, "Count includes multiplicity"


def test_free_skew_levels(free_cell):
    spectrum = periodic_eigenvalues(free_cell, SKEW, 20.0)
    lowest = spectrum.eigenvalues[0]
    assert lowest.energy == pytest.approx(PI2, abs=1e-8), "Lowest skew level is π²"
    assert lowest.multiplicity == 2, "It should be double"


def test_two_free_cells_fill_in_levels(free_cell):
    pot = assemble_n_cell(free_cell, 2)
    periodic = periodic_eigenvalues(pot, PERIODIC, 45.0)
    skew = periodic_eigenvalues(pot, SKEW, 45.0)
    assert np.allclose(periodic.energies, [0.0, PI2, 4 * PI2], atol=1e-8)
    assert np.allclose(skew.energies, [PI2 / 4, 9 * PI2 / 4], atol=1e-8)


def test_periodic_levels_match_oracle():
    cell = RandomCellFactory(v_lo=-30.0, v_hi=10.0)
    pot = assemble_n_cell(cell, 2)
    for flavor in (PERIODIC, SKEW):
        ours = periodic_eigenvalues(pot, flavor, 60.0)
        weights = [item.multiplicity for item in ours.eigenvalues]
        expanded = np.repeat(ours.energies, weights)
        reference = oracle.periodic_eigenvalues(pot, flavor == SKEW, 70.0)
        reference = np.repeat([e for e, _ in reference], [m for _, m in reference])
        assert np.allclose(
            expanded[:4], reference[:4], atol=5e-2
        ), f"Lowest {flavor} levels should match the FD ring"


def test_periodic_count_refuses_energies_above_range(kronig_penney):
    spectrum = periodic_eigenvalues(kronig_penney, PERIODIC, 20.0)
    with pytest.raises(OutOfRangeError):
        spectrum.count(25.0)
    assert periodic_count(kronig_penney, PERIODIC, 20.0) == spectrum.count(20.0)


def test_periodic_flavor_is_checked(kronig_penney):
    with pytest.raises(DomainError):
        periodic_eigenvalues(kronig_penney, "antiperiodic", 20.0)


def test_classify_periodic(free_cell, kronig_penney):
    assert classify_periodic(free_cell, 0.0).multiplicity == SIMPLE, "Band bottom"
    assert classify_periodic(free_cell, PI2).multiplicity == DOUBLE, "Closed gap"
    assert classify_periodic(free_cell, PI2).flavor == SKEW, "Level one is skew"
    assert classify_periodic(kronig_penney, 3.0).multiplicity == NONE, "Generic E"
