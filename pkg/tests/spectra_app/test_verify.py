# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
import json
from dataclasses import replace

import numpy as np
import pytest
from django.core.exceptions import ImproperlyConfigured

from spectra_app.bands import scan_zones
from spectra_app.boundary_spectra import (
    PERIODIC,
    PeriodicEigenvalue,
    periodic_eigenvalues,
)
from spectra_app.potential import build_cell
from spectra_app.scatter import count_bound_states
from spectra_app.verify import (
    DENSITY_BARRIER,
    DENSITY_N,
    Campaign,
    CheckRecord,
    CountReport,
    _periodic_oracle,
    check_density,
    check_periodic,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    energy_grid,
    hetero_id,
    off_gap_mask,
    resonance_density_bound,
    resonance_density_errors,
    run_suite,
)


@pytest.fixture
def small_campaign():
    return Campaign.from_settings(instances=2, n_list=(1, 2), grid_points=40)


def test_campaign_reads_settings():
    campaign = Campaign.from_settings()
    assert campaign.instances == 4, "Testing settings should shrink the family"
    assert campaign.n_list == (1, 2, 4), "n_list should be a tuple"
    assert Campaign.from_settings(seed=None).seed == 7, "None keeps the default"


def test_campaign_rejects_unknown_keys(settings):
    settings.NCELL_CAMPAIGN = {"instance_count": 3}
    with pytest.raises(ImproperlyConfigured):
        Campaign.from_settings()


def test_campaign_rejects_unknown_family():
    with pytest.raises(ImproperlyConfigured):
        Campaign(family="lattices")


def test_campaign_is_reproducible():
    first = [cell.values for cell in Campaign(seed=11, instances=3).cells()]
    second = [cell.values for cell in Campaign(seed=11, instances=3).cells()]
    assert first == second, "The same seed should give the same cells"
    free = Campaign(seed=11, instances=3, family="free").cells()
    assert all(set(cell.values) == {0.0} for cell in free), "Free cells are zero"


def test_wells_stay_in_range():
    for cell in Campaign(seed=3, instances=5).cells():
        assert all(-50.0 <= v <= -1.0 for v in cell.values), "Wells should be negative"
        assert cell.a == 1, "Campaign cells have unit length"


def test_bound_records_failures():
    record = CheckRecord("demo", 0, 1).bound([0.0, 1.0, 2.0], [0, 3, 1], 0, 2)
    assert record.evaluated == 3, "Every point should be counted"
    assert record.failures == [
        {"E": 1.0, "value": 3, "lower": 0, "upper": 2}
    ], "Only the point above the bound should fail"
    assert not record.passed, "A failure should fail the record"


def test_informational_records_always_pass():
    record = CheckRecord("demo", 0, 1, informational=True).bound(0.0, 5, 0, 1)
    assert record.failures, "The violation should still be kept"
    assert record.passed, "Informational records never fail"


def test_report_serialisation():
    report = CountReport("theorem1", 7, [{"id": 0, "potential": {}}])
    report.records.append(CheckRecord("demo", 0, 1).bound(0.0, 1, 0, 1))
    report.records.append(CheckRecord("demo", 0, 2).bound(0.0, 4, 0, 1))
    document = json.loads(report.to_json())
    assert set(document) == {"suite", "seed", "instances", "records", "summary"}
    assert document["summary"] == {"pass": 1, "fail": 1}, "Should tally records"
    assert len(report.failures()) == 1, "Should list the failing record"
    lines = report.to_csv().splitlines()
    assert lines[0] == "check,instance,n,params,evaluated,failures,passed"
    assert len(lines) == 3, "One row per record"


def test_energy_grid_avoids_edges(kronig_penney):
    table = scan_zones(kronig_penney, 40.0)
    grid = energy_grid(table, -1.0, 40.0, 500, 1e-9)
    assert grid.max() <= 40.0, "The grid should not pass its top"
    distances = np.min(np.abs(grid[:, None] - np.array(table.edges)[None, :]), axis=1)
    assert np.all(distances >= 1e-9 * 0.99), "Points should keep off the edges"


def test_off_gap_mask(kronig_penney):
    table = scan_zones(kronig_penney, 40.0)
    gap = table.open_gaps[1]
    band = table.bands[0]
    energies = np.array([(gap.E_lo + gap.E_hi) / 2, (band.E_lo + band.E_hi) / 2])
    assert list(off_gap_mask(table, energies)) == [False, True], "Gap vs band"


def test_theorem1_passes_on_small_family(small_campaign):
    report = check_theorem1(small_campaign)
    assert report.passed, f"Failed: {[r.check for r in report.failures()]}"
    assert len(report.instances) == 2, "Instances should be listed"
    assert report.instances[0]["potential"]["kind"] == "cell", "As documents"


def test_theorem1_catches_a_wrong_counter(small_campaign):
    def shifted(pot, energies):
        return np.asarray(count_bound_states(pot, energies)) + 2

    report = check_theorem1(small_campaign, counter=shifted)
    assert not report.passed, "A shifted counter should break the bracket"
    failed = {record.check for record in report.failures()}
    assert "theorem1.bracket" in failed, "The bracket check should fail"


def test_theorem2_passes_on_one_cell():
    campaign = Campaign.from_settings(instances=1, n_list=(1, 2), grid_points=30)
    report = check_theorem2(campaign)
    assert report.passed, f"Failed: {[r.check for r in report.failures()]}"
    cases = {record.params["case"] for record in report.records}
    assert len(cases) == 4, "Every boundary case should be covered"


@pytest.mark.parametrize("check", [check_periodic, check_density])
def test_free_family_is_degenerate_but_passes(check):
    campaign = Campaign.from_settings(
        family="free", instances=1, n_list=(1, 2), grid_points=30
    )
    report = check(campaign)
    assert report.passed, f"Failed: {[r.check for r in report.failures()]}"


def test_theorem3_passes_on_small_family(small_campaign):
    report = check_theorem3(small_campaign)
    assert report.passed, f"Failed: {[r.check for r in report.failures()]}"
    assert all(record.n >= 2 for record in report.records), "Two cells or more"


def test_run_suite_rejects_unknown_suite(small_campaign):
    with pytest.raises(ImproperlyConfigured):
        run_suite(small_campaign, "theorem4")


def test_campaign_energy_window():
    campaign = Campaign.from_settings(e_floor=-3.0, e_ceiling=20.0)
    cell = campaign.cells()[0]
    assert campaign.floor_for(cell) == -3.0, "A fixed floor replaces the default"
    assert Campaign().floor_for(cell) == cell.min_value - 1.0, "One below the cell"
    with pytest.raises(ImproperlyConfigured):
        Campaign(e_floor=1.0)
    with pytest.raises(ImproperlyConfigured):
        Campaign(e_ceiling=0.0)


@pytest.mark.parametrize("family", ["wells", "barriers", "mixed"])
def test_periodic_passes_on_small_families(family):
    campaign = Campaign.from_settings(
        family=family, instances=2, n_list=(1, 2, 4), grid_points=40
    )
    report = check_periodic(campaign)
    assert report.passed, f"Failed: {[r.check for r in report.failures()]}"
    checks = {record.check for record in report.records}
    assert {"periodic.oracle", "periodic.bracket"} <= checks, "Oracle should run"


@pytest.mark.parametrize("family", ["wells", "barriers"])
def test_density_passes_on_small_families(family):
    campaign = Campaign.from_settings(
        family=family, instances=2, n_list=(1, 2, 4), grid_points=40
    )
    report = check_density(campaign)
    assert report.passed, f"Failed: {[r.check for r in report.failures()]}"
    resonance = [r for r in report.records if r.check == "density.resonance"]
    assert [r.n for r in resonance] == list(DENSITY_N), "One record per n"
    assert all(not r.informational for r in resonance), "The ceiling is enforced"


def test_resonance_density_error_is_bounded_not_monotone():
    cell = build_cell(1, DENSITY_BARRIER)
    errors = resonance_density_errors(cell, DENSITY_N, 60.0)
    ceiling = resonance_density_bound(cell, 60.0, 1e-6)
    assert max(errors.values()) <= ceiling, "n·error should stay under the ceiling"
    assert ceiling < 10, "The ceiling does not grow with n"
    assert errors[8] > errors[4], "n·error may grow when n doubles"


def test_periodic_oracle_compares_both_ways(kronig_penney):
    spectrum = periodic_eigenvalues(kronig_penney, PERIODIC, 30.0)
    assert _periodic_oracle(0, 1, kronig_penney, spectrum, 30.0).passed
    missing = replace(spectrum, eigenvalues=spectrum.eigenvalues[1:])
    record = _periodic_oracle(0, 1, kronig_penney, missing, 30.0)
    assert not record.passed, "A level only the oracle finds should fail"
    first = spectrum.eigenvalues[0]
    doubled = replace(
        spectrum,
        eigenvalues=(PeriodicEigenvalue(first.energy, 2), *spectrum.eigenvalues[1:]),
    )
    record = _periodic_oracle(0, 1, kronig_penney, doubled, 30.0)
    assert not record.passed, "A wrong multiplicity should fail"


def test_hetero_ids_match_between_suites(small_campaign):
    alone = check_theorem3(small_campaign)
    ids = {item["id"] for item in alone.instances}
    assert ids == {hetero_id(0), hetero_id(1)}, "Hetero instances are labelled"
    assert {r.instance for r in alone.records} <= ids, "Records use the same ids"
