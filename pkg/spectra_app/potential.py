# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""
Piecewise-constant potentials on the line.

Every potential exposes ``support`` and ``pieces()``: the absolute
``(x_lo, x_hi, v)`` pieces covering its support in increasing x. The
propagation, scattering and counting code only ever talks to that
interface. Values are looked up on half-open intervals ``[x_lo, x_hi)`` and
vanish outside the support.
"""
import math
from bisect import bisect_right
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from functools import cached_property
from pathlib import Path
from typing import NamedTuple, Protocol, Union

import simplejson
import structlog
from django.core.exceptions import ValidationError

from .exceptions import DomainError

logger = structlog.get_logger(__name__)


class Piece(NamedTuple):
    x_lo: float
    x_hi: float
    v: float

    @property
    def width(self) -> float:
        return self.x_hi - self.x_lo


class Profile(Protocol):
    @property
    def support(self) -> tuple[float, float]:
        ...

    def pieces(self) -> tuple[Piece, ...]:
        ...

    def evaluate(self, x: float) -> float:
        ...


def to_decimal(value, label: str) -> Decimal:
    """Exact decimal for a user-supplied number; floats go through repr."""
    if isinstance(value, bool):
        raise ValidationError(f"{label} must be a number", code="invalid")
    try:
        number = Decimal(repr(value)) if isinstance(value, float) else Decimal(value)
    except (InvalidOperation, TypeError, ValueError):
        raise ValidationError(f"{label} must be a number", code="invalid")
    # finite decimals beyond the double range would still become ±inf
    if not number.is_finite() or not math.isfinite(float(number)):
        raise ValidationError(f"{label} must be finite", code="non_finite")
    return number


@dataclass(frozen=True)
class Segment:
    x_lo: Decimal
    x_hi: Decimal
    v: Decimal

    @property
    def width(self) -> Decimal:
        return self.x_hi - self.x_lo

    def shifted(self, offset: Decimal) -> "Segment":
        return Segment(self.x_lo + offset, self.x_hi + offset, self.v)

    def __str__(self):
        return f"[{self.x_lo}, {self.x_hi}] v={self.v}"


def _make_segments(raw: Iterable, owner: str) -> list[Segment]:
    segments = []
    for index, item in enumerate(raw):
        label = f"{owner} segment {index}"
        if isinstance(item, Segment):
            item = (item.x_lo, item.x_hi, item.v)
        try:
            x_lo, x_hi, v = item
        except (TypeError, ValueError):
            raise ValidationError(
                f"{label} must be a triple (x_lo, x_hi, v)", code="invalid"
            )
        segment = Segment(
            to_decimal(x_lo, f"{label} x_lo"),
            to_decimal(x_hi, f"{label} x_hi"),
            to_decimal(v, f"{label} value"),
        )
        if segment.width <= 0:
            raise ValidationError(
                f"{label} {segment} has non-positive width", code="negative_width"
            )
        segments.append(segment)
    return segments


def _tile(segments: list[Segment], lo: Decimal, hi: Decimal, owner: str):
    """Sort segments and check they tile [lo, hi] exactly."""
    if not segments:
        raise ValidationError(f"{owner} has no segments", code="empty")
    ordered = sorted(segments, key=lambda segment: (segment.x_lo, segment.x_hi))
    if ordered[0].x_lo != lo:
        raise ValidationError(
            f"{owner} segment {ordered[0]} must start at {lo}", code="gap"
        )
    for left, right in zip(ordered, ordered[1:]):
        if right.x_lo < left.x_hi:
            raise ValidationError(
                f"{owner} segment {right} overlaps segment {left} "
                f"at [{right.x_lo}, {min(left.x_hi, right.x_hi)}]",
                code="overlap",
            )
        if right.x_lo > left.x_hi:
            raise ValidationError(
                f"{owner} segment {right} leaves a gap "
                f"[{left.x_hi}, {right.x_lo}] after {left}",
                code="gap",
            )
    if ordered[-1].x_hi != hi:
        raise ValidationError(
            f"{owner} segment {ordered[-1]} must end at {hi}", code="gap"
        )
    return tuple(ordered)


class _Lookup:
    """Half-open segment lookup shared by the potential types."""

    segments: tuple[Segment, ...]

    @cached_property
    def _bounds(self) -> tuple[list[float], list[float], list[float]]:
        return (
            [float(segment.x_lo) for segment in self.segments],
            [float(segment.x_hi) for segment in self.segments],
            [float(segment.v) for segment in self.segments],
        )

    def _value_at(self, x: float) -> float:
        lows, highs, values = self._bounds
        index = bisect_right(lows, x) - 1
        if index < 0 or x >= highs[index]:
            return 0.0
        return values[index]


@dataclass(frozen=True)
class CellPotential(_Lookup):
    """One cell q₁ on [0, a]."""

    a: Decimal
    segments: tuple[Segment, ...]

    kind = "cell"

    @property
    def period(self) -> float:
        return float(self.a)

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, float(self.a)

    @cached_property
    def _pieces(self) -> tuple[Piece, ...]:
        lows, highs, values = self._bounds
        return tuple(Piece(*item) for item in zip(lows, highs, values))

    def pieces(self) -> tuple[Piece, ...]:
        return self._pieces

    def evaluate(self, x: float) -> float:
        return self._value_at(x)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(piece.v for piece in self._pieces)

    @property
    def min_value(self) -> float:
        return min(self.values)

    @property
    def is_free(self) -> bool:
        return all(segment.v == 0 for segment in self.segments)

    def __str__(self):
        return f"cell a={self.a} " + "; ".join(str(s) for s in self.segments)


@dataclass(frozen=True)
class NCellPotential:
    """q_n(x) = Σ_{j<n} q₁(x − ja), supported on [0, na]."""

    cell: CellPotential
    n: int

    kind = "ncell"

    @property
    def period(self) -> float:
        return self.cell.period

    @property
    def length(self) -> float:
        return self.n * self.cell.period

    @property
    def support(self) -> tuple[float, float]:
        return 0.0, self.length

    @cached_property
    def _pieces(self) -> tuple[Piece, ...]:
        a = self.cell.period
        return tuple(
            Piece(j * a + piece.x_lo, j * a + piece.x_hi, piece.v)
            for j in range(self.n)
            for piece in self.cell.pieces()
        )

    def pieces(self) -> tuple[Piece, ...]:
        return self._pieces

    @property
    def min_value(self) -> float:
        return self.cell.min_value

    def evaluate(self, x: float) -> float:
        a = self.cell.period
        if x < 0 or x >= self.length:
            return 0.0
        j = min(int(x // a), self.n - 1)
        return self.cell.evaluate(max(x - j * a, 0.0))


@dataclass(frozen=True)
class PeriodicExtension:
    """q(x) = q₁(x mod a) on the whole line."""

    cell: CellPotential

    def evaluate(self, x: float) -> float:
        a = self.cell.period
        local = x - math.floor(x / a) * a
        if local >= a:
            local -= a
        elif local < 0:
            local += a
        return self.cell.evaluate(local)


@dataclass(frozen=True)
class HeteroCell(_Lookup):
    """One cell q_j of a heterogeneous potential, in absolute coordinates."""

    x_lo: Decimal
    x_hi: Decimal
    segments: tuple[Segment, ...]

    @property
    def support(self) -> tuple[float, float]:
        return float(self.x_lo), float(self.x_hi)

    def pieces(self) -> tuple[Piece, ...]:
        return tuple(Piece(*item) for item in zip(*self._bounds))

    def evaluate(self, x: float) -> float:
        return self._value_at(x)


@dataclass(frozen=True)
class HeteroPotential:
    cells: tuple[HeteroCell, ...]

    kind = "hetero"

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def cut_points(self) -> tuple[float, ...]:
        return tuple(float(cell.x_hi) for cell in self.cells[:-1])

    @property
    def support(self) -> tuple[float, float]:
        return float(self.cells[0].x_lo), float(self.cells[-1].x_hi)

    @cached_property
    def _pieces(self) -> tuple[Piece, ...]:
        pieces = []
        previous_hi = None
        for cell in self.cells:
            if previous_hi is not None and cell.x_lo > previous_hi:
                pieces.append(Piece(float(previous_hi), float(cell.x_lo), 0.0))
            pieces.extend(cell.pieces())
            previous_hi = cell.x_hi
        return tuple(pieces)

    def pieces(self) -> tuple[Piece, ...]:
        return self._pieces

    @property
    def min_value(self) -> float:
        return min(piece.v for piece in self._pieces)

    def evaluate(self, x: float) -> float:
        return sum(cell.evaluate(x) for cell in self.cells)

    def sub_potential(self, index: int) -> "HeteroPotential":
        """The potential made of cell ``index`` alone."""
        return HeteroPotential((self.cells[index],))


Potential = Union[CellPotential, NCellPotential, HeteroPotential]


def build_cell(a, segments: Iterable) -> CellPotential:
    a = to_decimal(a, "period a")
    if a <= 0:
        raise ValidationError("period a must be positive", code="non_positive")
    tiled = _tile(_make_segments(segments, "cell"), Decimal(0), a, "cell")
    return CellPotential(a, tiled)


def assemble_n_cell(cell: CellPotential, n: int) -> NCellPotential:
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"cell count n must be a positive integer, got {n!r}")
    return NCellPotential(cell, n)


def place_cell(cell: CellPotential, offset=0) -> HeteroCell:
    """Translate a cell so that it occupies [offset, offset + a]."""
    offset = to_decimal(offset, "offset")
    return HeteroCell(
        offset,
        offset + cell.a,
        tuple(segment.shifted(offset) for segment in cell.segments),
    )


def _hetero_cell(item, index: int) -> HeteroCell:
    owner = f"hetero cell {index}"
    if isinstance(item, HeteroCell):
        return item
    if isinstance(item, CellPotential):
        return place_cell(item)
    if isinstance(item, Mapping):
        x_lo, x_hi, segments = item["x_lo"], item["x_hi"], item["segments"]
    else:
        x_lo, x_hi, segments = item
    x_lo = to_decimal(x_lo, f"{owner} x_lo")
    x_hi = to_decimal(x_hi, f"{owner} x_hi")
    if x_hi <= x_lo:
        raise ValidationError(f"{owner} has an empty support", code="negative_width")
    tiled = _tile(_make_segments(segments, owner), x_lo, x_hi, owner)
    return HeteroCell(x_lo, x_hi, tiled)


def assemble_hetero(cells: Iterable) -> HeteroPotential:
    hetero_cells = tuple(_hetero_cell(item, index) for index, item in enumerate(cells))
    if not hetero_cells:
        raise ValidationError("hetero potential needs at least one cell", code="empty")
    for index, (left, right) in enumerate(zip(hetero_cells, hetero_cells[1:])):
        if right.x_lo < left.x_hi:
            raise ValidationError(
                f"hetero cell {index + 1} [{right.x_lo}, {right.x_hi}] overlaps "
                f"cell {index} [{left.x_lo}, {left.x_hi}]",
                code="overlap",
            )
    return HeteroPotential(hetero_cells)


def refine(cell: CellPotential, m: int) -> CellPotential:
    """Split every segment into ``m`` equal pieces with the same value."""
    if m < 1:
        raise DomainError("refinement factor must be at least 1")
    segments = []
    for segment in cell.segments:
        step = segment.width / m
        edges = [segment.x_lo + i * step for i in range(m)] + [segment.x_hi]
        segments.extend(
            Segment(lo, hi, segment.v) for lo, hi in zip(edges, edges[1:])
        )
    return CellPotential(cell.a, tuple(segments))


def cell_from_function(q: Callable[[float], float], a, m: int) -> CellPotential:
    """
    Piecewise-constant approximation of a smooth cell by midpoint samples.

    The quality of the approximation is the caller's concern: the spectral
    code treats the result as the exact potential.
    """
    a = to_decimal(a, "period a")
    edges = [a * i / m for i in range(m)] + [a]
    segments = [
        (lo, hi, to_decimal(float(q(float(lo + hi) / 2)), "sample"))
        for lo, hi in zip(edges, edges[1:])
    ]
    return build_cell(a, segments)


# Documents


def _json_number(value: Decimal):
    if value == value.to_integral_value():
        return int(value)
    return value


def _segments_document(segments: Iterable[Segment]) -> list:
    return [
        [_json_number(s.x_lo), _json_number(s.x_hi), _json_number(s.v)]
        for s in segments
    ]


def potential_document(potential: Potential) -> dict:
    if isinstance(potential, CellPotential):
        return {
            "kind": "cell",
            "a": _json_number(potential.a),
            "segments": _segments_document(potential.segments),
        }
    if isinstance(potential, NCellPotential):
        return {
            "kind": "ncell",
            "n": potential.n,
            "cell": potential_document(potential.cell),
        }
    return {
        "kind": "hetero",
        "cells": [
            {
                "x_lo": _json_number(cell.x_lo),
                "x_hi": _json_number(cell.x_hi),
                "segments": _segments_document(cell.segments),
            }
            for cell in potential.cells
        ],
    }


def save_potential(potential: Potential, path: Path | str | None = None) -> str:
    text = simplejson.dumps(potential_document(potential), use_decimal=True)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


def load_potential(source: Path | str) -> Potential:
    """
    Parse a potential document given as a path or as JSON text.

    Strings whose first non-blank character is ``{`` are taken as text.
    """
    from .forms import parse_potential_document

    if isinstance(source, Path) or not source.lstrip().startswith("{"):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    potential = parse_potential_document(text)
    logger.debug("potential_loaded", kind=potential.kind)
    return potential
