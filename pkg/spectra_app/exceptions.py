# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
from django.core.exceptions import ValidationError


class DomainError(ValueError):
    """Argument outside the domain where the quantity is defined."""


class OutOfRangeError(DomainError):
    """Energy above the ceiling of the zone table in use."""


class BandEdgeError(DomainError):
    """sin φ too small for the closed-form n-cell composition."""

    def __init__(self, sin_phi: float):
        super().__init__(f"|sin φ| = {abs(sin_phi):.3e} is below the edge guard")
        self.sin_phi = sin_phi


class ZoneScanError(RuntimeError):
    def __init__(self, message: str, suspects: list[tuple[float, float]]):
        listed = ", ".join(f"[{lo:.10g}, {hi:.10g}]" for lo, hi in suspects)
        super().__init__(f"{message}; suspect intervals: {listed or 'none'}")
        self.suspects = suspects


class PotentialDocumentError(ValidationError):
    """Schema violation in a potential document, with its JSON location."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}", code="schema", params=None)
        self.location = location


class PhaseMonotonicityError(ArithmeticError):
    """The terminal Prüfer angle failed to decrease with the energy."""
