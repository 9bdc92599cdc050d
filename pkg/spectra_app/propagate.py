# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""
Exact propagation of Cauchy data (ψ, ψ′) for −ψ″ + vψ = Eψ with v piecewise
constant, and the continuous Prüfer angle θ = arg(ψ + iψ′).

Crossing convention: θ crosses every odd multiple of π/2 downwards (θ′ = −1
whenever ψ = 0), so ψ vanishes exactly where θ ≡ π/2 (mod π) and the node
count on an open interval ]x0, x1[ is the number of integers m with
θ(x1) < π/2 + mπ < θ(x0). A node sitting on a segment boundary is crossed
once by the continuous angle and therefore counted once; nodes at x0 or x1
themselves are excluded.

Initial data are sign-normalised before tracking (ψ(x0) > 0, or ψ′(x0) > 0 when
ψ(x0) = 0), which puts θ(x0) in ]−π/2, π/2]. The returned Cauchy data are the
true, un-normalised transfer-matrix image.

Everything below the public functions works on numpy arrays of energies so
that grids are swept in one pass.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError
from .potential import Piece, Profile

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class CauchyData:
    psi: float
    dpsi: float
    x: float = 0.0

    @property
    def is_zero(self) -> bool:
        return self.psi == 0 and self.dpsi == 0


@dataclass(frozen=True)
class TransferMatrix:
    m11: float
    m12: float
    m21: float
    m22: float
    energy: float
    interval: tuple[float, float]

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    def __matmul__(self, earlier: "TransferMatrix") -> "TransferMatrix":
        """``later @ earlier`` propagates across both intervals."""
        product = self.matrix @ earlier.matrix
        return TransferMatrix(
            *product.ravel().tolist(),
            energy=self.energy,
            interval=(earlier.interval[0], self.interval[1]),
        )

    def power(self, n: int) -> "TransferMatrix":
        lo, hi = self.interval
        product = np.linalg.matrix_power(self.matrix, n)
        return TransferMatrix(
            *product.ravel().tolist(),
            energy=self.energy,
            interval=(lo, lo + n * (hi - lo)),
        )

    def apply(self, data: CauchyData) -> CauchyData:
        return CauchyData(
            self.m11 * data.psi + self.m12 * data.dpsi,
            self.m21 * data.psi + self.m22 * data.dpsi,
            self.interval[1],
        )


@dataclass(frozen=True)
class PhaseTrace:
    theta_start: float
    theta_end: float
    node_count: int
    interval: tuple[float, float]

    @property
    def delta(self) -> float:
        return self.theta_end - self.theta_start


@dataclass(frozen=True)
class TailClass:
    kappa: float
    extra_nodes: int


def integer_part(r):
    """
    Integer part [r] used by every bracket expression.

    For r ≥ 0 this is the usual integer part and for −1 < r < 0 it is −1,
    so it coincides with floor on r > −1.
    """
    if np.ndim(r):
        return np.floor(r).astype(int)
    return math.floor(r)


def _wrap(angle):
    return (angle + np.pi) % (2 * np.pi) - np.pi


def _segment_entries(v: float, E, width: float):
    """Unscaled propagator entries over a constant segment (arrays in E)."""
    s = np.asarray(E, dtype=float) - v
    k = np.sqrt(np.abs(s))
    x = k * width
    oscillatory = s >= 0
    with np.errstate(over="ignore"):
        cosine = np.where(oscillatory, np.cos(x), np.cosh(x))
        # sin(kw)/k and sinh(κw)/κ, both → w as k → 0
        ratio = np.where(
            oscillatory,
            width * np.sinc(x / np.pi),
            width * np.where(x > 0, np.sinh(x) / np.where(x > 0, x, 1.0), 1.0),
        )
        lower = np.where(oscillatory, -k * np.sin(x), k * np.sinh(x))
    return cosine, ratio, lower, cosine


def _scaled_segment_entries(v: float, E, width: float):
    """
    Propagator entries with the evanescent growth e^{κw} factored out.

    Returns the four entries and the log of the removed factor.
    """
    s = np.asarray(E, dtype=float) - v
    k = np.sqrt(np.abs(s))
    x = k * width
    oscillatory = s >= 0
    decay = -np.expm1(-2 * x)
    cosine = np.where(oscillatory, np.cos(x), (2 - decay) / 2)
    ratio = np.where(
        oscillatory,
        width * np.sinc(x / np.pi),
        width * np.where(x > 0, decay / np.where(x > 0, 2 * x, 1.0), 1.0),
    )
    lower = np.where(oscillatory, -k * np.sin(x), k * decay / 2)
    log_factor = np.where(oscillatory, 0.0, x)
    return cosine, ratio, lower, cosine, log_factor


def segment_propagator(v: float, E: float, width: float) -> TransferMatrix:
    if width < 0:
        raise DomainError(f"segment width must be non-negative, got {width}")
    entries = (float(entry) for entry in _segment_entries(v, E, width))
    return TransferMatrix(*entries, energy=E, interval=(0.0, width))


def transfer_entries(pieces: tuple[Piece, ...], E):
    """Entries of the ordered product over ``pieces`` for an array of E."""
    E = np.asarray(E, dtype=float)
    m11, m12 = np.ones_like(E), np.zeros_like(E)
    m21, m22 = np.zeros_like(E), np.ones_like(E)
    for piece in pieces:
        a11, a12, a21, a22 = _segment_entries(piece.v, E, piece.width)
        m11, m12, m21, m22 = (
            a11 * m11 + a12 * m21,
            a11 * m12 + a12 * m22,
            a21 * m11 + a22 * m21,
            a21 * m12 + a22 * m22,
        )
    return m11, m12, m21, m22


def transfer(profile: Profile, E: float) -> TransferMatrix:
    """Transfer matrix across the whole support of ``profile``."""
    entries = (float(entry) for entry in transfer_entries(profile.pieces(), E))
    return TransferMatrix(*entries, energy=E, interval=profile.support)


def cell_transfer(cell, E: float) -> TransferMatrix:
    return transfer(cell, E)


def pieces_between(profile: Profile, x_from: float, x_to: float) -> list[Piece]:
    """Pieces of ``profile`` clipped to [x_from, x_to], zero outside support."""
    lo, hi = profile.support
    pieces = []
    if x_from < lo:
        pieces.append(Piece(x_from, min(lo, x_to), 0.0))
    for piece in profile.pieces():
        left, right = max(piece.x_lo, x_from), min(piece.x_hi, x_to)
        if right > left:
            pieces.append(Piece(left, right, piece.v))
    if x_to > hi:
        pieces.append(Piece(max(hi, x_from), x_to, 0.0))
    return pieces


class Sweep(NamedTuple):
    theta_start: np.ndarray
    theta_end: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    log_scale: np.ndarray
    sign: np.ndarray

    @property
    def node_count(self) -> np.ndarray:
        return nodes_between(self.theta_start, self.theta_end)


def sweep(pieces, E, psi0, dpsi0) -> Sweep:
    """
    Track direction and Prüfer angle of a solution across ``pieces``.

    In an oscillatory segment (E > v) the scaled angle ζ = arg(kψ + iψ′)
    decreases by exactly k·w; θ and ζ share a quadrant, which fixes the
    branch of θ at both ends. In an evanescent segment θ cannot cross the
    invariant directions ψ′ = ±κψ, so its increment is below π in size and
    follows from the end data alone.
    """
    E = np.asarray(E, dtype=float)
    psi = np.broadcast_to(np.asarray(psi0, dtype=float), E.shape).copy()
    dpsi = np.broadcast_to(np.asarray(dpsi0, dtype=float), E.shape).copy()
    flip = (psi < 0) | ((psi == 0) & (dpsi < 0))
    sign = np.where(flip, -1.0, 1.0)
    psi, dpsi = psi * sign, dpsi * sign
    norm = np.hypot(psi, dpsi)
    psi, dpsi = psi / norm, dpsi / norm
    log_scale = np.log(norm)
    theta = np.arctan2(dpsi, psi)
    theta_start = theta.copy()
    for piece in pieces:
        width = piece.width
        if width <= 0:
            continue
        m11, m12, m21, m22, log_factor = _scaled_segment_entries(piece.v, E, width)
        new_psi = m11 * psi + m12 * dpsi
        new_dpsi = m21 * psi + m22 * dpsi
        norm = np.hypot(new_psi, new_dpsi)
        new_psi, new_dpsi = new_psi / norm, new_dpsi / norm
        log_scale = log_scale + np.log(norm) + log_factor

        theta_mod = np.arctan2(new_dpsi, new_psi)
        k = np.sqrt(np.abs(E - piece.v))
        zeta_start = theta + _wrap(np.arctan2(dpsi, k * psi) - theta)
        zeta_end = zeta_start - k * width
        theta = np.where(
            E > piece.v,
            zeta_end + _wrap(theta_mod - zeta_end),
            theta + _wrap(theta_mod - theta),
        )
        psi, dpsi = new_psi, new_dpsi
    return Sweep(theta_start, theta, psi, dpsi, log_scale, sign)


def nodes_between(theta_start, theta_end):
    """Integers m with θ_end < π/2 + mπ < θ_start."""
    upper = np.ceil((np.asarray(theta_start) - HALF_PI) / np.pi)
    lower = np.floor((np.asarray(theta_end) - HALF_PI) / np.pi)
    return np.maximum(upper - lower - 1, 0).astype(int)


def propagate_phase(
    potential: Profile, E: float, init: CauchyData, x_to: float
) -> tuple[CauchyData, PhaseTrace]:
    if init.is_zero:
        raise DomainError("initial Cauchy data must not vanish")
    if x_to < init.x:
        raise DomainError(f"cannot propagate backwards from {init.x} to {x_to}")
    result = sweep(
        pieces_between(potential, init.x, x_to), E, init.psi, init.dpsi
    )
    scale = result.sign * np.exp(result.log_scale)
    end = CauchyData(float(result.psi * scale), float(result.dpsi * scale), x_to)
    trace = PhaseTrace(
        float(result.theta_start),
        float(result.theta_end),
        int(result.node_count),
        (init.x, x_to),
    )
    return end, trace


def phase_excess(trace: PhaseTrace) -> float:
    """
    π/2 − θ(x0) − Δθ − πN for a sign-normalised trace, lying in ]0, π].

    With the normalisation θ(x0) = arctan(ψ′/ψ) when ψ(x0) ≠ 0 and π/2
    otherwise, so the second case reduces to −Δθ − πN.
    """
    return HALF_PI - trace.theta_end - math.pi * trace.node_count


def _tail_extra(psi, dpsi, kappa):
    psi = np.asarray(psi, dtype=float)
    slope = kappa * psi + np.asarray(dpsi, dtype=float)
    return (((psi >= 0) & (slope < 0)) | ((psi <= 0) & (slope > 0))).astype(int)


def tail_nodes(end: CauchyData, E: float) -> TailClass:
    """Zeros on [y, ∞[ of the solution leaving the support with data ``end``."""
    if E > 0:
        raise DomainError("the tail rule needs E ≤ 0")
    kappa = math.sqrt(-E)
    return TailClass(kappa, int(_tail_extra(end.psi, end.dpsi, kappa)))


def _check_non_positive(E):
    if np.any(np.asarray(E) > 0):
        raise DomainError("node counting of the Jost solution needs E ≤ 0")


def jost_node_count(potential: Profile, E):
    """
    Zeros on the line of the solution equal to e^{κ(x−x0)} left of the
    support, which is the number of bound states below E.

    Accepts a scalar or an array of energies.
    """
    _check_non_positive(E)
    energies = np.asarray(E, dtype=float)
    kappa = np.sqrt(-energies)
    result = sweep(potential.pieces(), energies, 1.0, kappa)
    count = result.node_count + _tail_extra(result.psi, result.dpsi, kappa)
    if np.ndim(E):
        return count
    return int(count)
