# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""
Scattering on the line, bound states and transmission resonances.

A cell transfer matrix M (real, det 1) acting on (ψ, ψ′) is read in the
basis ψ±(x) = e^{±ikx}. Written in that basis at x = 0 it has the structure

    | conj(1/T₁)   −conj(R₁/T₁) |
    | −R₁/T₁        1/T₁        |

where T₁ = t·e^{ika} carries the free phase of the cell. The S-matrix uses
plane waves in absolute coordinates: s11 = s22 = t, s21 = r (reflection to
the left), s12 = r′ (reflection to the right).
"""
import math
from dataclasses import dataclass, field

import numpy as np
import structlog
from scipy import optimize

from .bands import Quasimomentum, build_quasimomentum, ceiling_for
from .boundary_spectra import DOUBLE, PeriodicClass, classify_periodic
from .conf import get_tolerances
from .exceptions import BandEdgeError, DomainError, OutOfRangeError
from .potential import CellPotential, HeteroPotential, NCellPotential, assemble_n_cell
from .propagate import jost_node_count, transfer_entries

logger = structlog.get_logger(__name__)

SINGLE_CELL = "single_cell"
BLOCH_COMB = "bloch_comb"


@dataclass(frozen=True)
class ScatteringData:
    k: float
    s11: complex
    s12: complex
    s21: complex
    s22: complex
    # length of the support, for the free phase in T
    length: float

    @property
    def T(self) -> complex:
        return self.s22 * np.exp(1j * self.k * self.length)

    @property
    def R(self) -> complex:
        return self.s21

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.s11, self.s12], [self.s21, self.s22]])

    def unitarity_defect(self) -> float:
        """max |S·S* − I|."""
        S = self.matrix
        return float(np.max(np.abs(S @ S.conj().T - np.eye(2))))


def _check_wavenumber(k):
    if np.any(np.asarray(k) <= 0):
        raise DomainError(f"wavenumber must be positive, got {k}")


def _psi_basis_row(m11, m12, m21, m22, k):
    """Second row (−R₁/T₁, 1/T₁) of the transfer matrix in the ψ± basis."""
    lower_left = 0.5 * ((m11 - m22) + 1j * (k * m12 + m21 / k))
    lower_right = 0.5 * ((m11 + m22) + 1j * (m21 / k - k * m12))
    return lower_left, lower_right


def _psi_basis(m11, m12, m21, m22, k) -> np.ndarray:
    lower_left, lower_right = _psi_basis_row(m11, m12, m21, m22, k)
    return np.array(
        [
            [np.conj(lower_right), np.conj(lower_left)],
            [lower_left, lower_right],
        ]
    )


def _plane_waves(k: float, x: float) -> np.ndarray:
    forward, backward = np.exp(1j * k * x), np.exp(-1j * k * x)
    return np.array([[forward, backward], [1j * k * forward, -1j * k * backward]])


def cell_scattering(cell: CellPotential, k: float) -> tuple[complex, complex]:
    _check_wavenumber(k)
    entries = transfer_entries(cell.pieces(), k * k)
    lower_left, inverse_T = _psi_basis_row(*entries, k)
    T1 = 1 / complex(inverse_T)
    return T1, complex(-lower_left * T1)


def reflection_modulus(cell: CellPotential, E) -> np.ndarray:
    """|R₁(E)| for an array of positive energies."""
    E = np.asarray(E, dtype=float)
    _check_wavenumber(E)
    lower_left, inverse_T = _psi_basis_row(
        *transfer_entries(cell.pieces(), E), np.sqrt(E)
    )
    return np.abs(lower_left) / np.abs(inverse_T)


def compose_n(T1: complex, R1: complex, phi: float, n: int) -> tuple[complex, complex]:
    """
    (T_n, R_n) from the single-cell pair through the Chebyshev
    polynomials U_{n−1} = sin nφ / sin φ.
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if n == 1:
        return T1, R1
    sin_phi = math.sin(phi)
    if abs(sin_phi) < get_tolerances().edge_guard:
        raise BandEdgeError(sin_phi)
    u_n = math.sin(n * phi) / sin_phi
    u_prev = math.sin((n - 1) * phi) / sin_phi
    Tn = 1 / (u_n / T1 - u_prev)
    return Tn, u_n * (R1 / T1) * Tn


def _ncell_scattering(pot: NCellPotential, k: float) -> ScatteringData:
    entries = transfer_entries(pot.cell.pieces(), k * k)
    basis = _psi_basis(*entries, k)
    T1 = 1 / basis[1, 1]
    R1 = -basis[1, 0] * T1
    cos_phi = (basis[1, 1]).real
    Tn = Rn = None
    if abs(cos_phi) < 1:
        try:
            Tn, Rn = compose_n(T1, R1, math.acos(cos_phi), pot.n)
        except BandEdgeError as exc:
            logger.debug("band_edge_fallback", k=k, sin_phi=exc.sin_phi)
    if Tn is None:
        power = np.linalg.matrix_power(basis, pot.n)
        Tn = 1 / power[1, 1]
        Rn = -power[1, 0] * Tn
    length = pot.length
    s22 = Tn * np.exp(-1j * k * length)
    s12 = np.conj(-Rn / Tn) * Tn * np.exp(-2j * k * length)
    return ScatteringData(
        k, complex(s22), complex(s12), complex(Rn), complex(s22), length
    )


def _hetero_scattering(pot: HeteroPotential, k: float) -> ScatteringData:
    # plane-wave amplitudes only change across cells; free gaps act as identity
    product = np.eye(2, dtype=complex)
    for cell in pot.cells:
        x_lo, x_hi = cell.support
        entries = transfer_entries(cell.pieces(), k * k)
        M = np.array(entries, dtype=float).reshape(2, 2)
        step = np.linalg.solve(_plane_waves(k, x_hi), M @ _plane_waves(k, x_lo))
        product = step @ product
    t = 1 / product[1, 1]
    r = -product[1, 0] * t
    r_right = product[0, 1] * t
    lo, hi = pot.support
    return ScatteringData(
        k, complex(t), complex(r_right), complex(r), complex(t), hi - lo
    )


def n_cell_scattering(pot, k: float) -> ScatteringData:
    _check_wavenumber(k)
    if isinstance(pot, CellPotential):
        pot = assemble_n_cell(pot, 1)
    if isinstance(pot, NCellPotential):
        return _ncell_scattering(pot, k)
    if isinstance(pot, HeteroPotential):
        return _hetero_scattering(pot, k)
    raise DomainError(f"cannot scatter off {type(pot).__name__}")


# Bound states


def count_bound_states(pot, E):
    """F_sc(]−∞, E[), the number of bound states strictly below E ≤ 0."""
    return jost_node_count(pot, E)


@dataclass(frozen=True)
class BoundSpectrum:
    energies: tuple[float, ...]

    @property
    def total(self) -> int:
        return len(self.energies)

    def count(self, E):
        """#{E_j < E}."""
        return np.searchsorted(np.asarray(self.energies), E, side="left")


def locate_bound_states(pot, E_floor: float | None = None) -> BoundSpectrum:
    """Bisect every unit jump of the bound-state count on [E_floor, 0]."""
    tol = get_tolerances()
    bottom = min(pot.min_value, 0.0)
    if E_floor is None:
        E_floor = bottom - 1.0
    if E_floor > bottom:
        raise DomainError(f"E_floor = {E_floor} must lie below min q = {bottom}")
    total = count_bound_states(pot, 0.0)
    if total == 0:
        return BoundSpectrum(())
    levels = np.arange(total)
    lo = np.full(total, float(E_floor))
    hi = np.zeros(total)
    while np.max(hi - lo) > tol.eig_tol:
        mid = (lo + hi) / 2
        above = count_bound_states(pot, mid) > levels
        lo = np.where(above, lo, mid)
        hi = np.where(above, mid, hi)
    energies = tuple(float(value) for value in (lo + hi) / 2)
    logger.debug("bound_states_located", total=total)
    return BoundSpectrum(energies)


# Transmission resonances


@dataclass(frozen=True)
class Resonance:
    energy: float
    origin: str
    reflection: float


@dataclass(frozen=True)
class ResonanceSet:
    resonances: tuple[Resonance, ...]
    n: int
    E_lo: float
    E_hi: float
    all_pass: bool = False
    rejected: tuple[Resonance, ...] = field(default_factory=tuple)

    @property
    def energies(self) -> np.ndarray:
        return np.array([item.energy for item in self.resonances])

    def count(self, E, E_from: float = 0.0):
        """Φ_sc(]E_from, E]): resonances in the half-open window."""
        energies = self.energies
        upper = np.searchsorted(energies, E, side="right")
        return upper - np.searchsorted(energies, E_from, side="right")


def _comb_resonances(q: Quasimomentum, n: int, E_lo: float, E_hi: float):
    found = []
    for band in q.zone_table.bands:
        if band.E_hi < E_lo or band.E_lo > E_hi:
            continue
        top = q.turns(band.E_hi)
        for level in range(n * (band.index - 1) + 1, n * band.index):
            if level / n >= top:
                break
            energy = q.energy_at_turns(band, level / n)
            if E_lo <= energy <= E_hi and energy > 0:
                found.append(energy)
    return found


def single_cell_resonances(cell: CellPotential, E_lo: float, E_hi: float, res_tol):
    """Reflectionless energies of one cell: local minima of |R₁| below res_tol."""
    grid = np.linspace(max(E_lo, 1e-9), E_hi, 4001)
    modulus = reflection_modulus(cell, grid)
    found = []
    for i in range(1, len(grid) - 1):
        if not (modulus[i] <= modulus[i - 1] and modulus[i] <= modulus[i + 1]):
            continue
        result = optimize.minimize_scalar(
            lambda E: float(reflection_modulus(cell, E)),
            bounds=(grid[i - 1], grid[i + 1]),
            method="bounded",
            options={"xatol": 1e-13},
        )
        if result.fun < res_tol:
            found.append(float(result.x))
    return found


def find_resonances(
    cell: CellPotential,
    n: int,
    E_lo: float,
    E_hi: float,
    q: Quasimomentum | None = None,
) -> ResonanceSet:
    """
    Energies of perfect transmission through n copies of ``cell`` in
    [E_lo, E_hi]: the Bloch comb n·a·p ∈ πℤ away from multiples of π·n,
    plus the reflectionless energies of the cell itself.
    """
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    if not 0 <= E_lo < E_hi:
        raise DomainError("resonances need 0 ≤ E_lo < E_hi")
    if cell.is_free:
        return ResonanceSet((), n, E_lo, E_hi, all_pass=True)
    if q is None:
        q = build_quasimomentum(cell, ceiling_for(E_hi))
    elif E_hi > q.ceiling:
        raise OutOfRangeError(f"E_hi = {E_hi} above the zone table ceiling {q.ceiling}")
    tol = get_tolerances()
    candidates = [(energy, BLOCH_COMB) for energy in _comb_resonances(q, n, E_lo, E_hi)]
    comb = np.array([energy for energy, _ in candidates])
    for energy in single_cell_resonances(cell, E_lo, E_hi, tol.res_tol):
        if not len(comb) or np.min(np.abs(comb - energy)) > 1e-8:
            candidates.append((energy, SINGLE_CELL))
    pot = assemble_n_cell(cell, n)
    accepted, rejected = [], []
    for energy, origin in sorted(candidates):
        reflection = abs(n_cell_scattering(pot, math.sqrt(energy)).R)
        resonance = Resonance(energy, origin, reflection)
        if reflection < tol.res_tol:
            accepted.append(resonance)
        else:
            logger.warning(
                "resonance_rejected",
                energy=energy,
                origin=origin,
                reflection=reflection,
            )
            rejected.append(resonance)
    return ResonanceSet(tuple(accepted), n, E_lo, E_hi, rejected=tuple(rejected))


@dataclass(frozen=True)
class ResonanceClass:
    resonance: Resonance
    periodic: PeriodicClass

    @property
    def consistent(self) -> bool:
        """Comb resonances must be double periodic or skew eigenvalues."""
        if self.resonance.origin == BLOCH_COMB:
            return self.periodic.multiplicity == DOUBLE
        return True


def resonance_vs_periodic(
    cell: CellPotential, n: int, resonance: Resonance, q: Quasimomentum | None = None
) -> ResonanceClass:
    classification = classify_periodic(
        assemble_n_cell(cell, n), resonance.energy, q
    )
    verdict = ResonanceClass(resonance, classification)
    if not verdict.consistent:
        logger.warning(
            "resonance_unclassified",
            energy=resonance.energy,
            multiplicity=classification.multiplicity,
        )
    return verdict
