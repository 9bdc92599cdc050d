# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""Numerical tolerances shared by every module, overridable in settings."""
from dataclasses import dataclass, fields, replace

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured


@dataclass(frozen=True)
class Tolerances:
    det_tol: float = 1e-12
    oracle_tol: float = 1e-8
    edge_tol: float = 1e-10
    phase_tol: float = 1e-9
    res_tol: float = 1e-6
    edge_guard: float = 1e-6
    touch_tol: float = 1e-9
    comb_tol: float = 1e-7
    eig_tol: float = 1e-10
    max_doublings: int = 5

    @property
    def edge_nudge(self) -> float:
        """Distance grid points are moved away from zone edges."""
        return 10 * self.edge_tol


def get_tolerances(**overrides) -> Tolerances:
    """Build the tolerance record from ``settings.NCELL_TOLERANCES``."""
    configured = dict(getattr(settings, "NCELL_TOLERANCES", {}))
    configured.update(overrides)
    known = {field.name for field in fields(Tolerances)}
    unknown = set(configured) - known
    if unknown:
        raise ImproperlyConfigured(
            f"Unknown NCELL_TOLERANCES keys: {', '.join(sorted(unknown))}"
        )
    return replace(Tolerances(), **configured)
