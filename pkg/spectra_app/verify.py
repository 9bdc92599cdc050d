# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""
Verification campaigns: generated instance families, the integer counting
bounds checked on energy grids, and the resulting report.

Every bound is an exact integer inequality evaluated point by point. Records
are aggregated per (check, instance, n, parameters) and keep the energies
where a bound failed, so a failing report is its own reproduction recipe
together with the seed and the instance documents.
"""
import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from decimal import Decimal
from typing import Callable

import numpy as np
import simplejson
import structlog
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from .bands import ZoneTable, build_quasimomentum
from .boundary_spectra import (
    DOUBLE,
    PERIODIC,
    SKEW,
    BoundaryConditions,
    classify_periodic,
    periodic_eigenvalues,
    sl_count,
    sl_count_bounds,
)
from .conf import Tolerances, get_tolerances
from .oracle import line_eigenvalues
from .oracle import periodic_eigenvalues as oracle_periodic_eigenvalues
from .potential import (
    CellPotential,
    assemble_hetero,
    assemble_n_cell,
    build_cell,
    place_cell,
    potential_document,
)
from .propagate import integer_part
from .scatter import (
    BLOCH_COMB,
    count_bound_states,
    find_resonances,
    single_cell_resonances,
)

logger = structlog.get_logger(__name__)

SUITES = ("theorem1", "theorem2", "periodic", "density", "theorem3")
FAMILIES = ("wells", "barriers", "mixed", "free")
ANGLES = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)
BOUNDARY_GRID = tuple(
    BoundaryConditions(alpha, beta)
    for alpha in ANGLES
    if alpha < math.pi
    for beta in ANGLES
    if beta > 0
)
# bracket offsets on the strict count, everywhere / off the gap closures
THEOREM2_OFFSETS = {
    "dirichlet": ((-1, 0), (0, 0)),
    "alpha_below_beta": ((-1, 1), (0, 1)),
    "beta_below_alpha": ((0, 2), (1, 2)),
    "equal": ((0, 1), (1, 1)),
}
DENSITY_BARRIER = ((0, "0.5", 10), ("0.5", 1, 0))
DENSITY_N = (4, 8, 16, 32)
ORACLE_INSTANCES = 5
# eigenvalue distance below which the oracle and the sweep name the same level
ORACLE_MATCH = 0.02

Counter = Callable[..., np.ndarray]


@dataclass(frozen=True)
class Campaign:
    seed: int = 7
    family: str = "wells"
    instances: int = 20
    v_range: tuple[float, float] = (-50.0, -1.0)
    max_segments: int = 4
    n_list: tuple[int, ...] = (1, 2, 4, 8, 16)
    grid_points: int = 200
    e_ceiling: float = 60.0
    # lowest grid energy; None starts each instance one below its minimum
    e_floor: float | None = None
    oracle_fraction: float = 0.1
    workers: int = 1
    tolerances: Tolerances = field(default_factory=get_tolerances)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ImproperlyConfigured(f"unknown instance family {self.family!r}")
        if self.e_ceiling <= 0:
            raise ImproperlyConfigured("the energy ceiling must be positive")
        if self.e_floor is not None and self.e_floor >= 0:
            raise ImproperlyConfigured("the energy floor must be negative")

    @classmethod
    def from_settings(cls, **overrides) -> "Campaign":
        configured = dict(getattr(settings, "NCELL_CAMPAIGN", {}))
        configured.update({k: v for k, v in overrides.items() if v is not None})
        known = {item.name for item in fields(cls)}
        unknown = set(configured) - known
        if unknown:
            raise ImproperlyConfigured(
                f"Unknown NCELL_CAMPAIGN keys: {', '.join(sorted(unknown))}"
            )
        for key in ("v_range", "n_list"):
            if key in configured:
                configured[key] = tuple(configured[key])
        return cls(**configured)

    def floor_for(self, potential) -> float:
        if self.e_floor is not None:
            return self.e_floor
        return energy_floor(potential)

    def _values(self, rng, count: int) -> np.ndarray:
        lo, hi = self.v_range
        if self.family == "free":
            return np.zeros(count)
        if self.family == "barriers":
            lo, hi = -hi, -lo
        elif self.family == "mixed":
            hi = -lo
        return rng.uniform(lo, hi, count)

    def random_cell(self, rng) -> CellPotential:
        pieces = int(rng.integers(1, self.max_segments + 1))
        cuts = sorted({round(float(x), 3) for x in rng.uniform(0.05, 0.95, pieces - 1)})
        edges = [Decimal(0)] + [Decimal(str(x)) for x in cuts] + [Decimal(1)]
        values = self._values(rng, len(edges) - 1)
        return build_cell(
            1,
            [
                (lo, hi, Decimal(str(round(float(v), 3))))
                for lo, hi, v in zip(edges, edges[1:], values)
            ],
        )

    def cells(self) -> list[CellPotential]:
        rng = np.random.default_rng(self.seed)
        return [self.random_cell(rng) for _ in range(self.instances)]

    def hetero_potentials(self) -> list:
        rng = np.random.default_rng([self.seed, 3])
        potentials = []
        for _ in range(self.instances):
            offset = Decimal(0)
            placed = []
            for _ in range(int(rng.integers(2, 5))):
                cell = self.random_cell(rng)
                placed.append(place_cell(cell, offset))
                spacing = Decimal(str(round(float(rng.uniform(0.0, 1.5)), 2)))
                offset += cell.a + spacing
            potentials.append(assemble_hetero(placed))
        return potentials


def _plain(value):
    if isinstance(value, (np.integer, int)):
        return int(value)
    return float(value)


@dataclass
class CheckRecord:
    check: str
    instance: int | str
    n: int
    params: dict = field(default_factory=dict)
    evaluated: int = 0
    failures: list = field(default_factory=list)
    informational: bool = False
    value: float | None = None

    @property
    def passed(self) -> bool:
        return self.informational or not self.failures

    def bound(self, energies, values, lower, upper):
        """Record every point where ``lower ≤ value ≤ upper`` fails."""
        energies, values = np.atleast_1d(energies), np.atleast_1d(values)
        lower = np.broadcast_to(lower, values.shape)
        upper = np.broadcast_to(upper, values.shape)
        bad = (values < lower) | (values > upper)
        self.evaluated += len(values)
        for E, value, lo, hi in zip(
            energies[bad], values[bad], lower[bad], upper[bad]
        ):
            self.failures.append(
                {
                    "E": float(E),
                    "value": _plain(value),
                    "lower": _plain(lo),
                    "upper": _plain(hi),
                }
            )
        return self

    def as_dict(self) -> dict:
        document = asdict(self)
        document["passed"] = self.passed
        return document


@dataclass
class CountReport:
    suite: str
    seed: int
    instances: list = field(default_factory=list)
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        failed = sum(not record.passed for record in self.records)
        return {"pass": len(self.records) - failed, "fail": failed}

    @property
    def passed(self) -> bool:
        return self.summary["fail"] == 0

    def failures(self) -> list[CheckRecord]:
        return [record for record in self.records if not record.passed]

    def to_json(self) -> str:
        return simplejson.dumps(
            {
                "suite": self.suite,
                "seed": self.seed,
                "instances": self.instances,
                "records": [record.as_dict() for record in self.records],
                "summary": self.summary,
            },
            indent=2,
            use_decimal=True,
        )

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(
            ["check", "instance", "n", "params", "evaluated", "failures", "passed"]
        )
        for record in self.records:
            writer.writerow(
                [
                    record.check,
                    record.instance,
                    record.n,
                    simplejson.dumps(record.params, sort_keys=True),
                    record.evaluated,
                    len(record.failures),
                    record.passed,
                ]
            )
        return buffer.getvalue()


# Grids


def energy_floor(potential) -> float:
    return min(potential.min_value, 0.0) - 1.0


def energy_grid(table: ZoneTable, lo: float, hi: float, points: int, distance: float):
    """Uniform grid on [lo, hi] moved off zone edges, never above ``hi``."""
    grid = table.nudge(np.linspace(lo, hi, points), distance)
    return np.where(grid > hi, grid - 2 * distance, grid)


def off_gap_mask(table: ZoneTable, energies: np.ndarray) -> np.ndarray:
    """True where E lies outside the closure of every open gap."""
    mask = np.ones(len(energies), dtype=bool)
    for gap in table.open_gaps:
        inside = (energies >= gap.E_lo - table.edge_tol) & (
            energies <= gap.E_hi + table.edge_tol
        )
        mask &= ~inside
    return mask


def _oracle_sample(campaign, rng, energies, eigenvalues) -> np.ndarray:
    """Grid points for the oracle cross-check, kept clear of its eigenvalues."""
    eigenvalues = np.asarray(eigenvalues)
    keep = energies < -0.05
    if len(eigenvalues):
        gaps = np.min(np.abs(energies[:, None] - eigenvalues[None, :]), axis=1)
        keep &= gaps > 1e-3
    candidates = energies[keep]
    size = min(len(candidates), max(1, round(campaign.oracle_fraction * len(energies))))
    if not size:
        return candidates
    return np.sort(rng.choice(candidates, size=size, replace=False))


def _scaled(cell: CellPotential, factor: int) -> CellPotential:
    """x → factor·x, q → q/factor²."""
    return build_cell(
        cell.a * factor,
        [
            (s.x_lo * factor, s.x_hi * factor, s.v / (factor * factor))
            for s in cell.segments
        ],
    )


# Scattering counts


def _theorem1_instance(campaign: Campaign, index: int, cell, counter: Counter):
    tol = campaign.tolerances
    q = build_quasimomentum(cell, campaign.e_ceiling)
    table = q.zone_table
    grid = energy_grid(
        table, campaign.floor_for(cell), 0.0, campaign.grid_points, tol.edge_nudge
    )
    turns = q.turns(grid)
    off_gap = off_gap_mask(table, grid)
    records = []
    for n in campaign.n_list:
        pot = assemble_n_cell(cell, n)
        counts = np.asarray(counter(pot, grid))
        bracket = integer_part(n * turns)
        records.append(
            CheckRecord("theorem1.bracket", index, n).bound(
                grid, counts, bracket - 1, bracket + 1
            )
        )
        records.append(
            CheckRecord("theorem1.off_gap", index, n).bound(
                grid[off_gap], counts[off_gap], bracket[off_gap], bracket[off_gap] + 1
            )
        )
        gap_record = CheckRecord("theorem1.gap_count", index, n)
        for gap in table.open_gaps:
            if gap.E_lo >= 0:
                continue
            upper_edge = gap.E_hi + tol.edge_nudge
            above = int(counter(pot, upper_edge if upper_edge < 0 else 0.0))
            below = (
                0 if gap.index == 0 else int(counter(pot, gap.E_lo - tol.edge_nudge))
            )
            gap_record.bound(gap.E_hi, above - below, 0, 1 if gap.index == 0 else 2)
        records.append(gap_record)
        rng = np.random.default_rng([campaign.seed, index, n])
        eigenvalues = line_eigenvalues(pot, 0.0)
        sample = _oracle_sample(campaign, rng, grid, eigenvalues)
        expected = np.array([np.sum(eigenvalues < E) for E in sample])
        records.append(
            CheckRecord("theorem1.oracle", index, n).bound(
                sample, np.asarray(counter(pot, sample)), expected, expected
            )
        )
    scaled = _scaled(cell, 2)
    expected = count_bound_states(cell, grid)
    records.append(
        CheckRecord("theorem1.scaling", index, 1, {"factor": 2}).bound(
            grid, count_bound_states(scaled, grid / 4), expected, expected
        )
    )
    return records


# Separated boundary conditions


def _closure_count(pot, bc, gap, distance: float) -> int:
    above = sl_count(pot, bc, gap.E_hi + distance)
    if gap.index == 0:
        return above
    return above - sl_count(pot, bc, gap.E_lo - distance, closed=False)


def _corollary2_bounds(case: str, first: bool) -> tuple[int, int]:
    if case == "dirichlet":
        return (0, 0) if first else (1, 1)
    if case == "alpha_below_beta":
        return (0, 1) if first else (0, 2)
    if case == "beta_below_alpha":
        return 0, 2
    return 1, 1


def _theorem2_instance(campaign: Campaign, index: int, cell):
    tol = campaign.tolerances
    q = build_quasimomentum(cell, campaign.e_ceiling)
    table = q.zone_table
    floor = campaign.floor_for(cell)
    grid = energy_grid(
        table, floor, campaign.e_ceiling, campaign.grid_points, tol.edge_nudge
    )
    turns = q.turns(grid)
    off_gap = off_gap_mask(table, grid)
    closures = [gap for gap in table.open_gaps if gap.E_hi < table.E_max]
    records = []
    for n in campaign.n_list:
        pot = assemble_n_cell(cell, n)
        bracket = integer_part(n * turns)
        for bc in BOUNDARY_GRID:
            params = {"alpha": bc.alpha, "beta": bc.beta, "case": bc.case}
            everywhere, outside = THEOREM2_OFFSETS[bc.case]
            counts = sl_count(pot, bc, grid, closed=False)
            records.append(
                CheckRecord("theorem2.bracket", index, n, params).bound(
                    grid, counts, bracket + everywhere[0], bracket + everywhere[1]
                )
            )
            records.append(
                CheckRecord("theorem2.off_gap", index, n, params).bound(
                    grid[off_gap],
                    counts[off_gap],
                    bracket[off_gap] + outside[0],
                    bracket[off_gap] + outside[1],
                )
            )
            lower, upper = sl_count_bounds(pot, bc, grid)
            records.append(
                CheckRecord("theorem2.winding", index, n, params).bound(
                    grid, sl_count(pot, bc, grid), lower, upper
                )
            )
            gap_record = CheckRecord("theorem2.gap_count", index, n, params)
            for gap in closures:
                low, high = _corollary2_bounds(bc.case, gap.index == 0)
                gap_record.bound(
                    gap.E_hi, _closure_count(pot, bc, gap, tol.edge_nudge), low, high
                )
            records.append(gap_record)
    return records


# Periodic problems and transmission resonances


def _window_total(levels, E: float) -> int:
    return sum(count for energy, count in levels if abs(energy - E) <= ORACLE_MATCH)


def _periodic_oracle(index, n, cell, spectrum, top: float) -> CheckRecord:
    """
    Multiplicities summed over a small window around every level of either
    list, so a level missing on one side fails as well as a wrong count.
    """
    record = CheckRecord("periodic.oracle", index, n, {"flavor": spectrum.flavor})
    reference = oracle_periodic_eigenvalues(
        assemble_n_cell(cell, n), spectrum.flavor == SKEW, top + 1.0
    )
    ours = [
        (item.energy, item.multiplicity)
        for item in spectrum.eigenvalues
        if item.energy <= top
    ]
    everything = np.array([energy for energy, _ in ours + reference])
    for energy, _ in ours + reference:
        if energy > top - ORACLE_MATCH:
            continue
        distance = np.abs(everything - energy)
        # levels at the edge of the window could fall on either side
        if np.any((distance > ORACLE_MATCH / 2) & (distance < 2 * ORACLE_MATCH)):
            continue
        expected = _window_total(reference, energy)
        record.bound(energy, _window_total(ours, energy), expected, expected)
    return record


def _periodic_instance(campaign: Campaign, index: int, cell):
    tol = campaign.tolerances
    q = build_quasimomentum(cell, campaign.e_ceiling)
    table = q.zone_table
    floor = campaign.floor_for(cell)
    grid = energy_grid(
        table, floor, campaign.e_ceiling, campaign.grid_points, tol.edge_nudge
    )
    turns = q.turns(grid)
    gaps = [gap for gap in table.open_gaps if gap.E_hi < table.E_max]
    records = []
    for n in campaign.n_list:
        pot = assemble_n_cell(cell, n)
        bracket = integer_part(n * turns)
        for flavor in (PERIODIC, SKEW):
            spectrum = periodic_eigenvalues(pot, flavor, campaign.e_ceiling, q)
            counts = spectrum.count(grid)
            records.append(
                CheckRecord("periodic.bracket", index, n, {"flavor": flavor}).bound(
                    grid, counts, bracket, bracket + 1
                )
            )
            mass = CheckRecord("periodic.gap_mass", index, n, {"flavor": flavor})
            for gap in gaps:
                lo = max(gap.E_lo, floor)
                samples = np.linspace(lo, gap.E_hi, 52)[1:-1]
                inside = spectrum.count(samples) - spectrum.count(samples[0])
                mass.bound(samples, inside, 0, 0)
            records.append(mass)
            if index < ORACLE_INSTANCES and n <= 4:
                records.append(
                    _periodic_oracle(
                        index, n, cell, spectrum, min(campaign.e_ceiling, 30.0)
                    )
                )
        if n >= 2:
            records.extend(_resonance_records(campaign, index, n, cell, q, gaps))
    return records


def _resonance_records(campaign, index, n, cell, q, gaps) -> list[CheckRecord]:
    tol = campaign.tolerances
    table = q.zone_table
    resonances = find_resonances(cell, n, 0.0, campaign.e_ceiling, q)
    if resonances.all_pass:
        record = CheckRecord("proposition1.all_pass", index, n, informational=True)
        record.value = 1.0
        return [record]
    pot = assemble_n_cell(cell, n)
    double = CheckRecord("proposition1.double", index, n)
    zones = CheckRecord("proposition1.zones", index, n)
    for resonance in resonances.resonances:
        E = resonance.energy
        if resonance.origin == BLOCH_COMB:
            verdict = classify_periodic(pot, E, q)
            double.bound(E, int(verdict.multiplicity == DOUBLE), 1, 1)
        in_gap = table.in_open_gap(E) is not None or any(
            abs(E - gap.E_lo) <= tol.edge_nudge for gap in table.closed_gaps
        )
        zones.bound(E, int(in_gap), 0, 0)
    rejected = CheckRecord("proposition1.rejected", index, n, informational=True)
    rejected.value = float(len(resonances.rejected))
    sampled = CheckRecord("proposition1.gap_samples", index, n)
    for gap in gaps:
        if gap.E_hi <= 0:
            continue
        samples = np.linspace(max(gap.E_lo, 0.0), gap.E_hi, 52)[1:-1]
        sampled.bound(samples, resonances.count(samples, samples[0]), 0, 0)
    comb = CheckRecord("proposition1.comb_count", index, n)
    for band in table.complete_bands:
        if band.E_lo <= 0:
            continue
        inside = sum(
            1
            for item in resonances.resonances
            if item.origin == BLOCH_COMB and band.E_lo < item.energy < band.E_hi
        )
        comb.bound(band.E_lo, inside, n - 1, n - 1)
    return [double, zones, rejected, sampled, comb]


# Densities


def _density_instance(campaign: Campaign, index: int, cell):
    tol = campaign.tolerances
    q = build_quasimomentum(cell, campaign.e_ceiling)
    table = q.zone_table
    floor = campaign.floor_for(cell)
    negative = energy_grid(table, floor, 0.0, campaign.grid_points, tol.edge_nudge)
    grid = energy_grid(
        table, floor, campaign.e_ceiling, campaign.grid_points, tol.edge_nudge
    )
    negative_turns, turns = q.turns(negative), q.turns(grid)
    records = []
    for n in campaign.n_list:
        pot = assemble_n_cell(cell, n)
        counts = count_bound_states(pot, negative)
        records.append(
            CheckRecord("density.scattering", index, n).bound(
                negative, n * negative_turns, counts - 1, counts + 2
            )
        )
        scaled = n * turns
        for bc in BOUNDARY_GRID:
            params = {"alpha": bc.alpha, "beta": bc.beta, "case": bc.case}
            counts = sl_count(pot, bc, grid)
            if bc.case == "beta_below_alpha":
                records.append(
                    CheckRecord("density.sl", index, n, params).bound(
                        grid, scaled, counts - 2, counts + 1
                    )
                )
                printed = CheckRecord(
                    "density.sl_printed", index, n, params, informational=True
                ).bound(grid, scaled, counts, counts + 3)
                printed.value = float(len(printed.failures))
                records.append(printed)
            else:
                records.append(
                    CheckRecord("density.sl", index, n, params).bound(
                        grid, scaled, counts - 1, counts + 2
                    )
                )
        for flavor in (PERIODIC, SKEW):
            spectrum = periodic_eigenvalues(pot, flavor, campaign.e_ceiling, q)
            counts = spectrum.count(grid)
            records.append(
                CheckRecord("density.periodic", index, n, {"flavor": flavor}).bound(
                    grid, scaled, counts - 1, counts + 1
                )
            )
    return records


def resonance_density_errors(cell: CellPotential, n_values, E_max: float, points=2000):
    """n·sup|(na)⁻¹Φ(]0,E]) − (p(E) − p(0))/π| over a grid of ]0, E_max]."""
    q = build_quasimomentum(cell, E_max)
    grid = np.linspace(0.0, E_max, points + 1)[1:]
    shift = q.turns(grid) - q.turns(0.0)
    errors = {}
    for n in n_values:
        resonances = find_resonances(cell, n, 0.0, E_max, q)
        counts = resonances.count(grid)
        errors[n] = float(np.max(np.abs(counts - n * shift))) / cell.period
    return errors


def resonance_density_bound(cell: CellPotential, E_max: float, res_tol: float) -> float:
    """
    Ceiling on ``resonance_density_errors`` that holds for every n.

    On ]0, E] the Bloch comb has one level per 1/n of a turn, minus the band
    edges, so it trails n·shift by at most two plus the completed bands and
    leads it by at most one. Each reflectionless energy of the single cell
    adds at most one more.
    """
    q = build_quasimomentum(cell, E_max)
    bands = math.floor(float(q.turns(E_max)) - float(q.turns(0.0)))
    single = len(single_cell_resonances(cell, 0.0, E_max, res_tol))
    return max(2 + bands, 1 + single) / cell.period


def _resonance_density(campaign: Campaign) -> list[CheckRecord]:
    cell = build_cell(1, DENSITY_BARRIER)
    errors = resonance_density_errors(cell, DENSITY_N, campaign.e_ceiling)
    ceiling = resonance_density_bound(
        cell, campaign.e_ceiling, campaign.tolerances.res_tol
    )
    records = []
    for n, value in errors.items():
        record = CheckRecord("density.resonance", -1, n, {"ceiling": ceiling})
        record.value = value
        records.append(record.bound(campaign.e_ceiling, value, 0.0, ceiling))
    decay = CheckRecord(
        "density.resonance_decay", -1, DENSITY_N[-1], informational=True
    )
    decay.value = errors[DENSITY_N[-1]] / max(errors[DENSITY_N[0]], 1e-12)
    records.append(decay)
    return records


# Heterogeneous potentials


def hetero_id(index: int) -> str:
    """Report id of a heterogeneous instance, distinct from the cell indices."""
    return f"hetero-{index}"


def _theorem3_instance(campaign: Campaign, index: int, pot):
    label = hetero_id(index)
    n = pot.n
    floor = campaign.floor_for(pot)
    grid = np.linspace(floor, 0.0, campaign.grid_points)
    counts = count_bound_states(pot, grid)
    parts = sum(count_bound_states(pot.sub_potential(j), grid) for j in range(n))
    records = [
        CheckRecord("theorem3.bound", label, n).bound(
            grid, counts, parts - (n - 1), parts + (n - 1)
        ),
        CheckRecord("theorem3.zero", label, n).bound(
            0.0, counts[-1], 1 - n + parts[-1], parts[-1]
        ),
    ]
    sharp = CheckRecord("theorem3.sharpness", label, n, informational=True)
    sharp.value = float(np.max(np.abs(counts - parts)))
    records.append(sharp)
    if index < ORACLE_INSTANCES:
        rng = np.random.default_rng([campaign.seed, 3, index])
        eigenvalues = line_eigenvalues(pot, 0.0)
        sample = _oracle_sample(campaign, rng, grid, eigenvalues)
        expected = np.array([np.sum(eigenvalues < E) for E in sample])
        records.append(
            CheckRecord("theorem3.oracle", label, n).bound(
                sample, count_bound_states(pot, sample), expected, expected
            )
        )
    return records


# Suites


def _pooled(campaign: Campaign, worker, items) -> list[CheckRecord]:
    with ThreadPoolExecutor(max_workers=max(1, campaign.workers)) as pool:
        batches = pool.map(lambda pair: worker(campaign, *pair), enumerate(items))
        return [record for batch in batches for record in batch]


def _report(
    campaign: Campaign, suite: str, records, instances, label=lambda index: index
) -> CountReport:
    report = CountReport(
        suite,
        campaign.seed,
        [
            {"id": label(index), "potential": potential_document(potential)}
            for index, potential in enumerate(instances)
        ],
        records,
    )
    logger.info("check_finished", suite=suite, **report.summary)
    return report


def check_theorem1(campaign: Campaign, counter: Counter = count_bound_states):
    cells = campaign.cells()
    records = _pooled(
        campaign,
        lambda c, index, cell: _theorem1_instance(c, index, cell, counter),
        cells,
    )
    return _report(campaign, "theorem1", records, cells)


def check_theorem2(campaign: Campaign):
    cells = campaign.cells()
    return _report(
        campaign, "theorem2", _pooled(campaign, _theorem2_instance, cells), cells
    )


def check_periodic(campaign: Campaign):
    cells = campaign.cells()
    return _report(
        campaign, "periodic", _pooled(campaign, _periodic_instance, cells), cells
    )


def check_density(campaign: Campaign):
    cells = campaign.cells()
    records = _pooled(campaign, _density_instance, cells)
    if campaign.family != "free":
        records.extend(_resonance_density(campaign))
    return _report(campaign, "density", records, cells)


def check_theorem3(campaign: Campaign):
    potentials = campaign.hetero_potentials()
    return _report(
        campaign,
        "theorem3",
        _pooled(campaign, _theorem3_instance, potentials),
        potentials,
        label=hetero_id,
    )


CHECKS = {
    "theorem1": check_theorem1,
    "theorem2": check_theorem2,
    "periodic": check_periodic,
    "density": check_density,
    "theorem3": check_theorem3,
}


def run_suite(campaign: Campaign, suite: str = "all") -> CountReport:
    if suite != "all" and suite not in CHECKS:
        raise ImproperlyConfigured(f"unknown suite {suite!r}")
    names = SUITES if suite == "all" else (suite,)
    logger.info("campaign_started", suite=suite, seed=campaign.seed, **_shape(campaign))
    reports = [CHECKS[name](campaign) for name in names]
    if len(reports) == 1:
        return reports[0]
    combined = CountReport(suite, campaign.seed, reports[0].instances)
    for report in reports:
        combined.records.extend(report.records)
    combined.instances += reports[-1].instances
    logger.info("campaign_finished", suite=suite, **combined.summary)
    return combined


def _shape(campaign: Campaign) -> dict:
    return {
        "family": campaign.family,
        "instances": campaign.instances,
        "n_list": list(campaign.n_list),
        "energy_window": [campaign.e_floor, campaign.e_ceiling],
    }
