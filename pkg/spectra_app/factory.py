# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
# factory.py
from decimal import Decimal

import factory
from factory import fuzzy

from .potential import (
    CellPotential,
    HeteroPotential,
    NCellPotential,
    assemble_hetero,
    assemble_n_cell,
    build_cell,
    place_cell,
)


class CellFactory(factory.Factory):
    """Zero cell on [0, 1] unless told otherwise."""

    class Meta:
        model = CellPotential

    a = Decimal(1)
    segments = factory.LazyAttribute(lambda obj: [(0, obj.a, 0)])

    @classmethod
    def _create(cls, model_class, a, segments):
        return build_cell(a, segments)

    _build = _create


class WellCellFactory(CellFactory):
    class Params:
        depth = fuzzy.FuzzyDecimal(-50, -1, 2)

    segments = factory.LazyAttribute(lambda obj: [(0, obj.a, obj.depth)])


class BarrierCellFactory(CellFactory):
    """Barrier of ``height`` on [0, width], free on the rest of the cell."""

    class Params:
        height = Decimal(10)
        width = Decimal("0.5")

    segments = factory.LazyAttribute(
        lambda obj: [(0, obj.width, obj.height), (obj.width, obj.a, 0)]
    )


def _random_segments(obj) -> list:
    randgen = factory.random.randgen
    cuts = sorted(
        Decimal(str(round(randgen.uniform(0.05, 0.95) * float(obj.a), 3)))
        for _ in range(obj.pieces - 1)
    )
    edges = [Decimal(0)] + sorted(set(cuts)) + [obj.a]
    return [
        (lo, hi, Decimal(str(round(randgen.uniform(obj.v_lo, obj.v_hi), 3))))
        for lo, hi in zip(edges, edges[1:])
    ]


class RandomCellFactory(CellFactory):
    class Params:
        pieces = fuzzy.FuzzyInteger(1, 4)
        v_lo = -50.0
        v_hi = 20.0

    segments = factory.LazyAttribute(_random_segments)


class NCellFactory(factory.Factory):
    class Meta:
        model = NCellPotential

    cell = factory.SubFactory(WellCellFactory)
    n = 2

    @classmethod
    def _create(cls, model_class, cell, n):
        return assemble_n_cell(cell, n)

    _build = _create


class HeteroFactory(factory.Factory):
    """``count`` random cells laid side by side, ``spacing`` apart."""

    class Meta:
        model = HeteroPotential

    class Params:
        count = fuzzy.FuzzyInteger(2, 4)
        spacing = Decimal(0)

    cells = factory.LazyAttribute(
        lambda obj: [
            place_cell(cell, offset=index * (cell.a + obj.spacing))
            for index, cell in enumerate(
                RandomCellFactory.create_batch(obj.count)
            )
        ]
    )

    @classmethod
    def _create(cls, model_class, cells):
        return assemble_hetero(cells)

    _build = _create
