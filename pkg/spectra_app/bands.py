# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""
Monodromy, Bloch discriminant, allowed/forbidden zones and quasimomentum of
the periodic extension of a cell.

Zones are numbered from the bottom. Forbidden zone j carries the plateau
index l_j = j − 1: every band adds exactly π to a·p(E), and a closed gap
(a tangential touch |Tr M| = 2) is kept as a zero-width forbidden zone so the
numbering stays continuous.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import structlog
from scipy import optimize

from .conf import Tolerances, get_tolerances
from .exceptions import DomainError, OutOfRangeError, ZoneScanError
from .potential import CellPotential
from .propagate import TransferMatrix, cell_transfer, transfer_entries

logger = structlog.get_logger(__name__)

ALLOWED = "allowed"
FORBIDDEN = "forbidden"


@dataclass(frozen=True)
class Monodromy:
    matrix: TransferMatrix

    @property
    def trace(self) -> float:
        return self.matrix.trace

    @property
    def energy(self) -> float:
        return self.matrix.energy


def monodromy(cell: CellPotential, E: float) -> Monodromy:
    return Monodromy(cell_transfer(cell, E))


def discriminant(cell: CellPotential, E):
    """Tr M(E); vectorised over arrays of E."""
    m11, _, _, m22 = transfer_entries(cell.pieces(), E)
    trace = m11 + m22
    if np.ndim(E):
        return trace
    return float(trace)


def _dirichlet_entry(cell: CellPotential, E: float) -> float:
    return float(transfer_entries(cell.pieces(), E)[1])


@dataclass(frozen=True)
class Zone:
    kind: str
    E_lo: float
    E_hi: float
    # l_j for forbidden zones, band number (from 1) for allowed ones
    index: int

    @property
    def is_allowed(self) -> bool:
        return self.kind == ALLOWED

    @property
    def is_closed_gap(self) -> bool:
        return self.kind == FORBIDDEN and self.E_lo == self.E_hi

    @property
    def width(self) -> float:
        return self.E_hi - self.E_lo


@dataclass(frozen=True)
class ZoneTable:
    zones: tuple[Zone, ...]
    E_max: float
    period: float
    edge_tol: float = 1e-10

    @property
    def bands(self) -> tuple[Zone, ...]:
        return tuple(zone for zone in self.zones if zone.is_allowed)

    @property
    def gaps(self) -> tuple[Zone, ...]:
        return tuple(zone for zone in self.zones if not zone.is_allowed)

    @property
    def open_gaps(self) -> tuple[Zone, ...]:
        return tuple(zone for zone in self.gaps if not zone.is_closed_gap)

    @property
    def closed_gaps(self) -> tuple[Zone, ...]:
        return tuple(zone for zone in self.gaps if zone.is_closed_gap)

    @property
    def edges(self) -> tuple[float, ...]:
        finite = {
            edge
            for zone in self.zones
            for edge in (zone.E_lo, zone.E_hi)
            if math.isfinite(edge) and edge < self.E_max
        }
        return tuple(sorted(finite))

    @property
    def complete_bands(self) -> tuple[Zone, ...]:
        """Bands whose upper edge lies below the ceiling."""
        return tuple(zone for zone in self.bands if zone.E_hi < self.E_max)

    def check_range(self, E):
        if np.any(np.asarray(E) > self.E_max):
            raise OutOfRangeError(
                f"energy above the zone table ceiling {self.E_max}"
            )

    def locate(self, E: float) -> Zone:
        """Zone containing E; band closures win at shared edges."""
        self.check_range(E)
        for zone in self.bands:
            if zone.E_lo - self.edge_tol <= E <= zone.E_hi + self.edge_tol:
                return zone
        for zone in self.gaps:
            if zone.E_lo < E < zone.E_hi:
                return zone
        return self.zones[-1]

    def in_open_gap(self, E: float) -> Zone | None:
        """The open gap having E strictly inside (away from its edges)."""
        for zone in self.open_gaps:
            if zone.E_lo + self.edge_tol < E < zone.E_hi - self.edge_tol:
                return zone
        return None

    def nudge(self, energies: np.ndarray, distance: float) -> np.ndarray:
        """Move grid points lying within ``distance`` of an edge off it."""
        energies = np.array(energies, dtype=float)
        for edge in self.edges:
            close = np.abs(energies - edge) < distance
            energies[close] = edge + distance
        return energies


def _bisect(function, lo: float, hi: float, tol: float) -> float:
    return optimize.bisect(function, lo, hi, xtol=tol, maxiter=200)


class _ZoneScan:
    """One scan of the discriminant on a fixed grid."""

    def __init__(self, cell: CellPotential, E_max: float, points: int, tol):
        self.cell = cell
        self.E_max = E_max
        self.tol = tol
        self.grid = np.linspace(cell.min_value - 1.0, E_max, points + 1)
        self.suspects: list[tuple[float, float]] = []

    def excess(self, E: float) -> float:
        return abs(discriminant(self.cell, E)) - 2.0

    def crossings(self, excess: np.ndarray) -> list[float]:
        outside = excess > 0
        roots = []
        for i in np.flatnonzero(outside[:-1] != outside[1:]):
            roots.append(
                _bisect(self.excess, self.grid[i], self.grid[i + 1], self.tol.edge_tol)
            )
        return roots

    def touches(self, excess: np.ndarray) -> tuple[list[float], list[float]]:
        """Closed gaps and gaps too narrow for the grid, near |Tr| maxima."""
        closed, hidden = [], []
        grid = self.grid
        for i in range(1, len(grid) - 1):
            if not (excess[i] >= excess[i - 1] and excess[i] >= excess[i + 1]):
                continue
            if max(excess[i - 1], excess[i], excess[i + 1]) > 0:
                continue
            lo, hi = grid[i - 1], grid[i + 1]
            if np.sign(_dirichlet_entry(self.cell, lo)) != np.sign(
                _dirichlet_entry(self.cell, hi)
            ):
                peak = _bisect(
                    lambda E: _dirichlet_entry(self.cell, E),
                    lo,
                    hi,
                    self.tol.edge_tol,
                )
            else:
                peak = optimize.minimize_scalar(
                    lambda E: -abs(discriminant(self.cell, E)),
                    bounds=(lo, hi),
                    method="bounded",
                    options={"xatol": self.tol.edge_tol},
                ).x
            value = self.excess(peak)
            if value > self.tol.touch_tol:
                hidden.append(_bisect(self.excess, lo, peak, self.tol.edge_tol))
                hidden.append(_bisect(self.excess, peak, hi, self.tol.edge_tol))
            elif value >= -self.tol.touch_tol:
                closed.append(float(peak))
            elif value > -1e-3:
                self.suspects.append((float(lo), float(hi)))
        return closed, hidden

    def run(self) -> ZoneTable | None:
        excess = np.abs(discriminant(self.cell, self.grid)) - 2.0
        if excess[0] <= 0:
            raise DomainError("discriminant below the potential minimum is not > 2")
        closed, hidden = self.touches(excess)
        crossings = sorted(self.crossings(excess) + hidden)
        zones = _assemble(crossings, closed, self.E_max)
        table = ZoneTable(tuple(zones), self.E_max, self.cell.period, self.tol.edge_tol)
        if not self.orientation_consistent(table):
            return None
        return table

    def orientation_consistent(self, table: ZoneTable) -> bool:
        """Band j starts at Tr M = 2·(−1)^(j−1); a missed touch breaks this."""
        consistent = True
        for band in table.bands:
            expected = 1.0 if band.index % 2 else -1.0
            if np.sign(discriminant(self.cell, band.E_lo)) != expected:
                self.suspects.append((band.E_lo, band.E_hi))
                consistent = False
        return consistent


def _assemble(crossings: list[float], closed: list[float], E_max: float):
    """Alternate forbidden/allowed zones from edge crossings and touches."""
    bands = []
    for i in range(0, len(crossings), 2):
        lo = crossings[i]
        hi = crossings[i + 1] if i + 1 < len(crossings) else E_max
        bands.append((lo, hi))
    # closed gaps split the band holding them
    split = []
    for lo, hi in bands:
        inner = sorted(point for point in closed if lo < point < hi)
        edges = [lo] + inner + [hi]
        split.extend(zip(edges, edges[1:]))

    zones = []
    previous_hi = -math.inf
    for number, (lo, hi) in enumerate(split, start=1):
        zones.append(Zone(FORBIDDEN, previous_hi, lo, number - 1))
        zones.append(Zone(ALLOWED, lo, hi, number))
        previous_hi = hi
    if not split:
        zones.append(Zone(FORBIDDEN, -math.inf, E_max, 0))
    elif previous_hi < E_max:
        zones.append(Zone(FORBIDDEN, previous_hi, E_max, len(split)))
    return zones


def _assert_tiling(table: ZoneTable):
    zones = table.zones
    assert zones[0].kind == FORBIDDEN and zones[0].E_lo == -math.inf
    assert zones[-1].E_hi == table.E_max
    for left, right in zip(zones, zones[1:]):
        assert left.kind != right.kind and left.E_hi == right.E_lo
    indices = [zone.index for zone in table.gaps]
    assert indices[0] == 0 and all(b > a for a, b in zip(indices, indices[1:]))


def scan_zones(
    cell: CellPotential,
    E_max: float,
    initial_grid: int = 2000,
    tolerances: Tolerances | None = None,
) -> ZoneTable:
    """
    Zone decomposition of ]−∞, E_max] for the periodic extension of ``cell``.

    The grid is doubled until two successive scans agree on the zone count.
    """
    tol = tolerances or get_tolerances()
    if E_max <= cell.min_value:
        raise DomainError("E_max must exceed the minimum of the potential")
    if initial_grid < 100:
        raise DomainError("initial_grid must be at least 100")
    previous = None
    suspects: list[tuple[float, float]] = []
    points = initial_grid
    for _ in range(tol.max_doublings + 1):
        scan = _ZoneScan(cell, E_max, points, tol)
        table = scan.run()
        suspects = scan.suspects
        if table is not None:
            _assert_tiling(table)
            if previous is not None and len(previous.zones) == len(table.zones):
                logger.debug(
                    "zones_scanned",
                    zones=len(table.zones),
                    closed_gaps=len(table.closed_gaps),
                    grid=points,
                )
                return table
        logger.info(
            "zone_scan_refined",
            grid=points,
            zones=None if table is None else len(table.zones),
        )
        previous = table
        points *= 2
    raise ZoneScanError("zone scan did not converge", suspects)


@lru_cache(maxsize=256)
def zone_table_for(cell: CellPotential, E_max: float, initial_grid: int = 2000):
    return scan_zones(cell, E_max, initial_grid)


def ceiling_for(E: float) -> float:
    """Scan ceiling used when callers do not pass their own zone table."""
    return 10.0 * (math.floor(max(E, 0.0) / 10.0) + 2)


@dataclass(frozen=True)
class Quasimomentum:
    zone_table: ZoneTable
    cell: CellPotential

    @property
    def ceiling(self) -> float:
        return self.zone_table.E_max

    def turns(self, E):
        """
        a·p(E)/π, built as integer winding plus fraction so plateaus are
        exact integers. Vectorised over arrays of E.
        """
        table = self.zone_table
        table.check_range(E)
        energies = np.atleast_1d(np.asarray(E, dtype=float))
        bands = table.bands
        lows = np.array([band.E_lo for band in bands])
        highs = np.array([band.E_hi for band in bands])
        numbers = np.array([band.index for band in bands])
        slot = np.searchsorted(lows, energies, side="right") - 1
        result = np.zeros_like(energies)
        inside = slot >= 0
        trace = discriminant(self.cell, energies)
        angle = np.arccos(np.clip(trace / 2, -1.0, 1.0)) / np.pi
        tol = table.edge_tol
        for position in np.flatnonzero(inside):
            s = slot[position]
            number = numbers[s]
            e = energies[position]
            if e > highs[s] - tol and highs[s] < table.E_max:
                result[position] = number
            elif e < lows[s] + tol:
                result[position] = number - 1
            elif number % 2:
                result[position] = number - 1 + angle[position]
            else:
                result[position] = number - angle[position]
        if np.ndim(E):
            return result
        return float(result[0])

    def at(self, E):
        return np.pi * self.turns(E) / self.zone_table.period

    def phase(self, E):
        return np.pi * self.turns(E)

    def energy_at_turns(self, band: Zone, target: float, xtol: float = 1e-13):
        """Invert a·p/π = target inside ``band`` (monotone there)."""
        return _bisect(
            lambda E: self.turns(E) - target, band.E_lo, band.E_hi, xtol
        )


def build_quasimomentum(
    cell: CellPotential, E_max: float, initial_grid: int = 2000
) -> Quasimomentum:
    return Quasimomentum(zone_table_for(cell, E_max, initial_grid), cell)


def quasimomentum_at(q: Quasimomentum, E):
    return q.at(E)


def bloch_phase(q: Quasimomentum, E: float) -> float:
    """φ(E) = a·p(E) on the closure of the allowed zones."""
    table = q.zone_table
    table.check_range(E)
    below = not table.bands or E < table.bands[0].E_lo - table.edge_tol
    if below or table.in_open_gap(E) is not None:
        raise DomainError(f"E = {E} lies inside an open gap")
    return q.phase(E)
