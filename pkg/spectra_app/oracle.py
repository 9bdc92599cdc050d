# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""
Independent reference computations: three-point finite differences and
adaptive ODE integration. Used by the verification campaign and the tests,
never by the shooting code itself.
"""
import math

import numpy as np
from scipy import integrate, linalg

from .exceptions import DomainError
from .potential import Piece, Profile

CLUSTER_TOL = 1e-6


def _primitive(pieces, points: np.ndarray) -> np.ndarray:
    """∫ q from −∞ to each point, exact for piecewise-constant q."""
    breaks = [pieces[0].x_lo]
    values = [0.0]
    for piece in pieces:
        if piece.x_lo > breaks[-1]:
            breaks.append(piece.x_lo)
            values.append(values[-1])
        breaks.append(piece.x_hi)
        values.append(values[-1] + piece.v * piece.width)
    return np.interp(points, breaks, values, left=0.0, right=values[-1])


def averaged_potential(pieces, nodes: np.ndarray, h: float) -> np.ndarray:
    """Mean of q over [x − h/2, x + h/2] at every node."""
    return (_primitive(pieces, nodes + h / 2) - _primitive(pieces, nodes - h / 2)) / h


def _line_box(profile: Profile, E_max: float, pad: float, h: float):
    lo, hi = profile.support
    steps = math.ceil((hi - lo + 2 * pad) / h)
    nodes = lo - pad + h * np.arange(1, steps)
    diagonal = 2 / h**2 + averaged_potential(profile.pieces(), nodes, h)
    off = np.full(len(nodes) - 1, -1 / h**2)
    floor = min(profile.pieces(), key=lambda piece: piece.v).v
    return linalg.eigh_tridiagonal(
        diagonal,
        off,
        eigvals_only=True,
        select="v",
        select_range=(min(floor, 0.0) - 1.0, E_max),
    )


def line_eigenvalues(
    profile: Profile, E_max: float = 0.0, pad: float = 20.0, h: float = 2e-3
) -> np.ndarray:
    """
    Eigenvalues below ``E_max`` of −ψ″ + qψ on the support padded by ``pad``
    with Dirichlet walls, Richardson-extrapolated from steps h and h/2.
    """
    coarse = _line_box(profile, E_max, pad, h)
    fine = _line_box(profile, E_max, pad, h / 2)
    if len(coarse) != len(fine):
        return fine
    return (4 * fine - coarse) / 3


def line_count(profile: Profile, E: float, **options) -> int:
    """Number of box eigenvalues strictly below E (E < 0)."""
    return int(np.sum(line_eigenvalues(profile, E, **options) < E))


def _cot(angle: float) -> float:
    return math.cos(angle) / math.sin(angle)


def sl_matrix(profile: Profile, alpha: float, beta: float, h: float):
    """
    Symmetrised three-point matrix on [0, L] with ghost-point Robin ends;
    Dirichlet ends drop the boundary node.
    """
    lo, hi = profile.support
    steps = round((hi - lo) / h)
    h = (hi - lo) / steps
    nodes = lo + h * np.arange(steps + 1)
    pieces = profile.pieces()
    potential = averaged_potential(pieces, nodes, h)
    diagonal = 2 / h**2 + potential
    off = np.full(steps, -1 / h**2)
    # boundary nodes own a half cell
    diagonal[0] = 2 / h**2 + 2 * _primitive(pieces, np.array([lo + h / 2]))[0] / h
    diagonal[-1] = 2 / h**2 + 2 * (
        _primitive(pieces, np.array([hi]))[0]
        - _primitive(pieces, np.array([hi - h / 2]))[0]
    ) / h
    if alpha == 0:
        diagonal, off = diagonal[1:], off[1:]
    else:
        diagonal[0] += 2 * _cot(alpha) / h
        off[0] = -math.sqrt(2) / h**2
    if beta == math.pi:
        diagonal, off = diagonal[:-1], off[:-1]
    else:
        diagonal[-1] -= 2 * _cot(beta) / h
        off[-1] = -math.sqrt(2) / h**2
    return diagonal, off


def sl_eigenvalues(
    profile: Profile, alpha: float, beta: float, E_max: float, h: float = 1e-3
) -> np.ndarray:
    """Richardson-extrapolated Sturm–Liouville eigenvalues up to ``E_max``."""

    def solve(step):
        diagonal, off = sl_matrix(profile, alpha, beta, step)
        return linalg.eigh_tridiagonal(
            diagonal,
            off,
            eigvals_only=True,
            select="v",
            select_range=(min(np.min(diagonal) - 4 / step**2, -1.0), E_max),
        )

    coarse, fine = solve(h), solve(h / 2)
    if len(coarse) != len(fine):
        return fine
    return (4 * fine - coarse) / 3


def sl_count(profile: Profile, alpha: float, beta: float, E: float, **options) -> int:
    """#{eigenvalues ≤ E} of the finite-difference problem."""
    spectrum = sl_eigenvalues(profile, alpha, beta, E + 1.0, **options)
    return int(np.sum(spectrum <= E))


def periodic_eigenvalues(
    profile: Profile, skew: bool, E_max: float, points_per_unit: int = 400
) -> list[tuple[float, int]]:
    """
    Periodic (or antiperiodic) eigenvalues with multiplicities found by
    clustering at 1e-6; the wrap-around corner carries the sign.
    """
    lo, hi = profile.support
    steps = round((hi - lo) * points_per_unit)
    h = (hi - lo) / steps
    nodes = lo + h * np.arange(steps)
    pieces = profile.pieces()
    potential = averaged_potential(pieces, nodes, h)
    # node 0 also sees the end of the cell across the wrap
    potential[0] += (
        _primitive(pieces, np.array([hi]))[0]
        - _primitive(pieces, np.array([hi - h / 2]))[0]
    ) / h
    matrix = np.diag(2 / h**2 + potential)
    matrix += np.diag(np.full(steps - 1, -1 / h**2), 1)
    matrix += np.diag(np.full(steps - 1, -1 / h**2), -1)
    corner = (1 if skew else -1) / h**2
    matrix[0, -1] = matrix[-1, 0] = corner
    values = linalg.eigh(matrix, eigvals_only=True, subset_by_value=(-np.inf, E_max))
    clusters: list[list[float]] = []
    for value in np.sort(values):
        if clusters and value - clusters[-1][-1] < CLUSTER_TOL * max(1.0, abs(value)):
            clusters[-1].append(value)
        else:
            clusters.append([value])
    return [(float(np.mean(group)), len(group)) for group in clusters]


def _rhs(v: float, E: float):
    def derivative(x, y):
        return [y[1], (v - E) * y[0], y[3], (v - E) * y[2]]

    return derivative


def ode_transfer(pieces: tuple[Piece, ...], E: float) -> np.ndarray:
    """Transfer matrix across ``pieces`` by DOP853 integration."""
    state = np.array([1.0, 0.0, 0.0, 1.0])
    for piece in pieces:
        if piece.width <= 0:
            continue
        solution = integrate.solve_ivp(
            _rhs(piece.v, E),
            (piece.x_lo, piece.x_hi),
            state,
            method="DOP853",
            rtol=1e-12,
            atol=1e-14,
        )
        if not solution.success:
            raise DomainError(f"integration failed on {piece}: {solution.message}")
        state = solution.y[:, -1]
    return np.array([[state[0], state[2]], [state[1], state[3]]])


def sign_changes(
    pieces: tuple[Piece, ...], E: float, psi0: float, dpsi0: float, samples: int = 400
) -> int:
    """Sign changes of ψ on a dense sampling of every piece."""
    state = [psi0, dpsi0, 0.0, 0.0]
    values = []
    for piece in pieces:
        if piece.width <= 0:
            continue
        grid = np.linspace(piece.x_lo, piece.x_hi, samples)
        solution = integrate.solve_ivp(
            _rhs(piece.v, E),
            (piece.x_lo, piece.x_hi),
            state,
            method="DOP853",
            rtol=1e-12,
            atol=1e-14,
            t_eval=grid,
        )
        values.extend(solution.y[0][1:] if values else solution.y[0])
        state = solution.y[:, -1]
    signs = np.sign(np.array(values))
    signs = signs[signs != 0]
    return int(np.sum(signs[1:] != signs[:-1]))
