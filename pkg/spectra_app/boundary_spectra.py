# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""
Spectra of the n-cell problem on [0, na] under separated boundary conditions

    ψ(0)·cos α − ψ′(0)·sin α = 0,    ψ(na)·cos β − ψ′(na)·sin β = 0,

with 0 ≤ α < π and 0 < β ≤ π, and under periodic / skew-periodic conditions.

Separated problems are counted by the Prüfer angle of the solution with
initial data (sin α, cos α): θ starts at π/2 − α, decreases strictly with E,
tends to π/2 as E → −∞, and E is an eigenvalue exactly when the terminal
angle hits π/2 − β − jπ. Periodic spectra come from the quasimomentum comb
n·a·p(E) ∈ πℤ (even multiples periodic, odd multiples skew).
"""
import math
from dataclasses import dataclass

import numpy as np
import structlog
from django.core.exceptions import ValidationError

from .bands import Quasimomentum, build_quasimomentum, ceiling_for
from .conf import get_tolerances
from .exceptions import DomainError, OutOfRangeError, PhaseMonotonicityError
from .potential import CellPotential, NCellPotential
from .propagate import Sweep, integer_part, sweep

logger = structlog.get_logger(__name__)

PERIODIC = "periodic"
SKEW = "skew"
SIMPLE = "simple"
DOUBLE = "double"
NONE = "none"

_TOKENS = {"dirichlet": None, "neumann": math.pi / 2}


@dataclass(frozen=True)
class BoundaryConditions:
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0 <= self.alpha < math.pi:
            raise ValidationError(
                f"alpha = {self.alpha} must lie in [0, π)", code="alpha_range"
            )
        if not 0 < self.beta <= math.pi:
            raise ValidationError(
                f"beta = {self.beta} must lie in (0, π]", code="beta_range"
            )

    @classmethod
    def from_tokens(cls, alpha, beta) -> "BoundaryConditions":
        """Angles in radians, or the tokens ``dirichlet`` / ``neumann``."""

        def angle(value, dirichlet: float) -> float:
            if isinstance(value, str) and value.lower() in _TOKENS:
                token = _TOKENS[value.lower()]
                return dirichlet if token is None else token
            try:
                return float(value)
            except ValueError:
                raise ValidationError(
                    f"{value!r} is neither an angle nor dirichlet/neumann",
                    code="invalid",
                )

        return cls(angle(alpha, 0.0), angle(beta, math.pi))

    @property
    def case(self) -> str:
        if self.alpha == 0 and self.beta == math.pi:
            return "dirichlet"
        if self.alpha == self.beta:
            return "equal"
        return "alpha_below_beta" if self.alpha < self.beta else "beta_below_alpha"

    @property
    def start_angle(self) -> float:
        return math.pi / 2 - self.alpha

    def target(self, j):
        """Terminal angle of the j-th eigenfunction (j from 0)."""
        return math.pi / 2 - self.beta - math.pi * np.asarray(j)


DIRICHLET = BoundaryConditions(0.0, math.pi)
NEUMANN = BoundaryConditions(math.pi / 2, math.pi / 2)


def _cell_and_n(pot) -> tuple[CellPotential, int]:
    if isinstance(pot, NCellPotential):
        return pot.cell, pot.n
    if isinstance(pot, CellPotential):
        return pot, 1
    raise DomainError("periodic problems need a cell or an n-cell potential")


def _interval_sweep(pot, bc: BoundaryConditions, E) -> Sweep:
    return sweep(pot.pieces(), E, math.sin(bc.alpha), math.cos(bc.alpha))


def terminal_angle(pot, bc: BoundaryConditions, E):
    angle = _interval_sweep(pot, bc, E).theta_end
    return angle if np.ndim(E) else float(angle)


def sl_count(pot, bc: BoundaryConditions, E, closed: bool = True):
    """
    F(]−∞, E]) for the separated problem, or F(]−∞, E[) with
    ``closed=False``. Vectorised over arrays of E.
    """
    trace = _interval_sweep(pot, bc, E)
    # target(0) measured from the swept start angle, as in sl_count_bounds
    reach = (trace.theta_start - trace.theta_end + bc.alpha - bc.beta) / math.pi
    if closed:
        count = np.maximum(np.floor(reach) + 1, 0)
    else:
        count = np.maximum(np.ceil(reach), 0)
    count = count.astype(int)
    return count if np.ndim(E) else int(count)


def sl_count_bounds(pot, bc: BoundaryConditions, E):
    """
    Bracket bounds (lower, upper) on F(]−∞, E]) from the winding
    r = −Δθ/π alone, without the β-target comparison.
    """
    trace = _interval_sweep(pot, bc, E)
    bracket = integer_part((trace.theta_start - trace.theta_end) / math.pi)
    low, high = {
        "dirichlet": (0, 0),
        "alpha_below_beta": (0, 1),
        "beta_below_alpha": (1, 2),
        "equal": (1, 1),
    }[bc.case]
    return bracket + low, bracket + high


@dataclass(frozen=True)
class SLSpectrum:
    eigenvalues: tuple[float, ...]
    bc: BoundaryConditions
    # eigenvalues at or below the lower end of the searched window
    first_index: int = 0

    def count(self, E):
        return self.first_index + np.searchsorted(
            np.asarray(self.eigenvalues), E, side="right"
        )


def sl_eigenvalues(pot, bc: BoundaryConditions, E_lo: float, E_hi: float):
    """Eigenvalues in ]E_lo, E_hi], bisected on the terminal angle."""
    if not E_lo < E_hi:
        raise DomainError("E_lo must be below E_hi")
    tol = get_tolerances()
    first, last = sl_count(pot, bc, np.array([E_lo, E_hi]))
    indices = np.arange(first, last)
    if not len(indices):
        return SLSpectrum((), bc, int(first))
    targets = bc.target(indices)
    lo = np.full(len(indices), float(E_lo))
    hi = np.full(len(indices), float(E_hi))
    g_lo = terminal_angle(pot, bc, lo) - targets
    g_hi = terminal_angle(pot, bc, hi) - targets
    for _ in range(200):
        if np.max(hi - lo) <= tol.eig_tol:
            break
        mid = (lo + hi) / 2
        g_mid = terminal_angle(pot, bc, mid) - targets
        slack = tol.phase_tol
        if np.any(g_mid > g_lo + slack) or np.any(g_mid < g_hi - slack):
            raise PhaseMonotonicityError(
                f"terminal angle not monotone in E on [{E_lo}, {E_hi}] for {bc}"
            )
        below = g_mid > 0
        lo, g_lo = np.where(below, mid, lo), np.where(below, g_mid, g_lo)
        hi, g_hi = np.where(below, hi, mid), np.where(below, g_hi, g_mid)
    eigenvalues = tuple(float(value) for value in (lo + hi) / 2)
    logger.debug("sl_eigenvalues", case=bc.case, count=len(eigenvalues))
    return SLSpectrum(eigenvalues, bc, int(first))


def boundary_residual(pot, bc: BoundaryConditions, E: float) -> float:
    """|ψ cos β − ψ′ sin β| for the unit-normalised terminal data."""
    end = _interval_sweep(pot, bc, E)
    return float(
        abs(end.psi * math.cos(bc.beta) - end.dpsi * math.sin(bc.beta))
    )


# Periodic and skew-periodic problems


@dataclass(frozen=True)
class PeriodicEigenvalue:
    energy: float
    multiplicity: int


@dataclass(frozen=True)
class PeriodicSpectrum:
    eigenvalues: tuple[PeriodicEigenvalue, ...]
    flavor: str
    n: int
    E_max: float

    @property
    def energies(self) -> np.ndarray:
        return np.array([item.energy for item in self.eigenvalues])

    def count(self, E):
        """F(]−∞, E]) with multiplicity; vectorised."""
        if np.any(np.asarray(E) > self.E_max):
            raise OutOfRangeError(f"energy above the enumerated range {self.E_max}")
        weights = np.concatenate(
            ([0], np.cumsum([item.multiplicity for item in self.eigenvalues]))
        )
        count = weights[np.searchsorted(self.energies, E, side="right")]
        return count if np.ndim(E) else int(count)


@dataclass(frozen=True)
class PeriodicClass:
    multiplicity: str
    flavor: str | None = None


def _check_flavor(flavor: str):
    if flavor not in (PERIODIC, SKEW):
        raise DomainError(f"flavor must be periodic or skew, got {flavor!r}")


def _matches(level: int, flavor: str) -> bool:
    return level % 2 == (0 if flavor == PERIODIC else 1)


def _quasimomentum(cell: CellPotential, E: float, q: Quasimomentum | None):
    if q is None:
        return build_quasimomentum(cell, ceiling_for(E))
    q.zone_table.check_range(E)
    return q


def periodic_eigenvalues(
    pot, flavor: str, E_max: float, q: Quasimomentum | None = None
) -> PeriodicSpectrum:
    """
    Periodic (n·a·p ∈ 2πℤ) or skew (n·a·p ∈ π + 2πℤ) eigenvalues up to
    E_max: double on band interiors and closed gaps, simple on the edges of
    open gaps.
    """
    _check_flavor(flavor)
    cell, n = _cell_and_n(pot)
    q = _quasimomentum(cell, E_max, q)
    table = q.zone_table
    found: list[PeriodicEigenvalue] = []
    for gap in table.gaps:
        level = n * gap.index
        if not _matches(level, flavor):
            continue
        if gap.is_closed_gap:
            found.append(PeriodicEigenvalue(gap.E_lo, 2))
            continue
        if math.isfinite(gap.E_lo):
            found.append(PeriodicEigenvalue(gap.E_lo, 1))
        if gap.E_hi < table.E_max:
            found.append(PeriodicEigenvalue(gap.E_hi, 1))
    for band in table.bands:
        top = q.turns(band.E_hi)
        for level in range(n * (band.index - 1) + 1, n * band.index):
            if not _matches(level, flavor) or level / n >= top:
                continue
            found.append(PeriodicEigenvalue(q.energy_at_turns(band, level / n), 2))
    eigenvalues = tuple(
        sorted(
            (item for item in found if item.energy <= E_max),
            key=lambda item: item.energy,
        )
    )
    return PeriodicSpectrum(eigenvalues, flavor, n, E_max)


def periodic_count(pot, flavor: str, E, q: Quasimomentum | None = None):
    """F(]−∞, E]) (periodic) or F̃(]−∞, E]) (skew), with multiplicity."""
    top = float(np.max(E))
    return periodic_eigenvalues(pot, flavor, top, q).count(E)


def classify_periodic(pot, E: float, q: Quasimomentum | None = None):
    cell, n = _cell_and_n(pot)
    q = _quasimomentum(cell, E, q)
    tol = get_tolerances()
    table = q.zone_table
    winding = n * q.turns(E)
    level = round(winding)
    if abs(winding - level) > tol.comb_tol or table.in_open_gap(E) is not None:
        return PeriodicClass(NONE)
    flavor = PERIODIC if level % 2 == 0 else SKEW
    for gap in table.open_gaps:
        edges = (gap.E_lo, gap.E_hi if gap.E_hi < table.E_max else math.inf)
        if any(abs(E - edge) <= tol.edge_nudge for edge in edges):
            return PeriodicClass(SIMPLE, flavor)
    return PeriodicClass(DOUBLE, flavor)
