# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""
Schema validation for potential documents.

    {"kind": "cell", "a": <number>, "segments": [[x_lo, x_hi, v], ...]}
    {"kind": "ncell", "n": <int>, "cell": <cell-object>}
    {"kind": "hetero", "cells": [{"x_lo": .., "x_hi": .., "segments": [...]}, ...]}

Structural problems raise PotentialDocumentError with a JSON location;
semantic problems (overlaps, non-positive period) come from the builders in
``potential`` as plain ValidationError.
"""
import json
from decimal import Decimal

from django import forms
from django.core.exceptions import ValidationError

from .exceptions import PotentialDocumentError
from .potential import (
    Potential,
    assemble_hetero,
    assemble_n_cell,
    build_cell,
)


def _reject_constant(token: str):
    raise PotentialDocumentError(f"{token} is not a finite decimal number")


def _is_number(value) -> bool:
    return isinstance(value, (int, Decimal)) and not isinstance(value, bool)


class SegmentListField(forms.Field):
    """A JSON list of [x_lo, x_hi, v] number triples."""

    def to_python(self, value):
        if value in self.empty_values:
            return []
        if not isinstance(value, list):
            raise ValidationError("Expected a list of segments.", code="invalid")
        segments = []
        for index, item in enumerate(value):
            if (
                not isinstance(item, list)
                or len(item) != 3
                or not all(_is_number(number) for number in item)
            ):
                raise ValidationError(
                    "Segment %(index)s must be a [x_lo, x_hi, v] number triple.",
                    code="invalid",
                    params={"index": index},
                )
            segments.append(tuple(item))
        return segments


class NumberField(forms.DecimalField):
    def to_python(self, value):
        if isinstance(value, (bool, str)):
            raise ValidationError("Expected a number.", code="invalid")
        return super().to_python(value)


class DocumentKindForm(forms.Form):
    kind = forms.ChoiceField(
        choices=[("cell", "cell"), ("ncell", "ncell"), ("hetero", "hetero")]
    )

    keys = {"kind"}


class CellDocumentForm(forms.Form):
    a = NumberField()
    segments = SegmentListField()

    keys = {"kind", "a", "segments"}

    def build(self):
        return build_cell(self.cleaned_data["a"], self.cleaned_data["segments"])


class NCellDocumentForm(forms.Form):
    n = forms.IntegerField()

    keys = {"kind", "n", "cell"}

    def clean_n(self):
        if isinstance(self.data.get("n"), (bool, Decimal)):
            raise ValidationError("Expected an integer.", code="invalid")
        return self.cleaned_data["n"]


class HeteroCellDocumentForm(forms.Form):
    x_lo = NumberField()
    x_hi = NumberField()
    segments = SegmentListField()

    keys = {"x_lo", "x_hi", "segments"}


def _validated(form_class, data, location: str) -> forms.Form:
    if not isinstance(data, dict):
        raise PotentialDocumentError("expected an object", location)
    unknown = set(data) - form_class.keys
    if unknown:
        raise PotentialDocumentError(
            f"unexpected keys {sorted(unknown)}", location
        )
    form = form_class(data=data)
    if not form.is_valid():
        field, errors = next(iter(form.errors.items()))
        raise PotentialDocumentError(str(errors[0]), f"{location}.{field}")
    return form


def _cell_from(data, location: str):
    if isinstance(data, dict) and data.get("kind", "cell") != "cell":
        raise PotentialDocumentError("nested object must be a cell", location)
    return _validated(CellDocumentForm, data, location).build()


def potential_from_document(document) -> Potential:
    kind_form = _validated(
        DocumentKindForm,
        {"kind": document.get("kind")} if isinstance(document, dict) else document,
        "$",
    )
    kind = kind_form.cleaned_data["kind"]
    if kind == "cell":
        return _cell_from(document, "$")
    if kind == "ncell":
        form = _validated(NCellDocumentForm, document, "$")
        return assemble_n_cell(
            _cell_from(document.get("cell"), "$.cell"), form.cleaned_data["n"]
        )
    if set(document) - {"kind", "cells"}:
        raise PotentialDocumentError("unexpected keys", "$")
    cells = document.get("cells")
    if not isinstance(cells, list) or not cells:
        raise PotentialDocumentError("expected a non-empty list", "$.cells")
    cleaned = [
        _validated(HeteroCellDocumentForm, item, f"$.cells[{index}]").cleaned_data
        for index, item in enumerate(cells)
    ]
    return assemble_hetero(cleaned)


def parse_potential_document(text: str) -> Potential:
    try:
        document = json.loads(
            text, parse_float=Decimal, parse_constant=_reject_constant
        )
    except json.JSONDecodeError as exc:
        raise PotentialDocumentError(
            f"invalid JSON ({exc.msg})", f"line {exc.lineno} column {exc.colno}"
        )
    return potential_from_document(document)
