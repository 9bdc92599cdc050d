# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
import argparse
import csv
import json
import math
import sys
from contextlib import contextmanager

import numpy as np
import structlog
from django.core.exceptions import ImproperlyConfigured, ValidationError
from django.core.management.base import BaseCommand, CommandError

from spectra_app.bands import build_quasimomentum, ceiling_for, discriminant
from spectra_app.boundary_spectra import (
    PERIODIC,
    SKEW,
    BoundaryConditions,
    periodic_eigenvalues,
    sl_eigenvalues,
)
from spectra_app.exceptions import (
    DomainError,
    PhaseMonotonicityError,
    ZoneScanError,
)
from spectra_app.potential import (
    CellPotential,
    HeteroPotential,
    NCellPotential,
    assemble_n_cell,
    load_potential,
)
from spectra_app.scatter import (
    count_bound_states,
    find_resonances,
    n_cell_scattering,
)
from spectra_app.verify import FAMILIES, SUITES, Campaign, run_suite

logger = structlog.get_logger(__name__)


def int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(item) for item in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a list of integers")
    if any(value < 1 for value in values):
        raise argparse.ArgumentTypeError("cell counts must be positive")
    return values


def _number(value: float):
    return repr(float(value))


def _finite(value: float):
    return value if math.isfinite(value) else None


class Command(BaseCommand):
    help = "Spectra, scattering data and counting-bound campaigns for n-cell potentials"
    requires_system_checks = []

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(
            dest="subcommand",
            required=True,
            parser_class=argparse.ArgumentParser,
        )

        def subcommand(name, help_text, formats=("csv", "json")):
            sub = subparsers.add_parser(name, help=help_text)
            sub.add_argument("--out", help="output file (default: stdout)")
            sub.add_argument("--format", choices=formats, default=formats[0])
            return sub

        bands = subcommand("bands", "discriminant, quasimomentum and zones of a cell")
        bands.add_argument("--cell", required=True)
        bands.add_argument("--emin", type=float)
        bands.add_argument("--emax", type=float, default=60.0)
        bands.add_argument("--grid", type=int, default=2000)

        scatter = subcommand("scatter", "transmission and reflection on an energy grid")
        scatter.add_argument("--pot", "--cell", dest="pot", required=True)
        scatter.add_argument("--n", type=int_list)
        scatter.add_argument("--emin", type=float, default=0.01)
        scatter.add_argument("--emax", type=float, default=60.0)
        scatter.add_argument("--grid", type=int, default=500)

        resonances = subcommand("resonances", "energies of perfect transmission")
        resonances.add_argument("--cell", "--pot", dest="cell", required=True)
        resonances.add_argument("--n", type=int_list, required=True)
        resonances.add_argument("--emin", type=float, default=0.0)
        resonances.add_argument("--emax", type=float, default=60.0)

        sl = subcommand("sl", "eigenvalues under separated boundary conditions")
        sl.add_argument("--pot", "--cell", dest="pot", required=True)
        sl.add_argument("--n", type=int_list)
        sl.add_argument("--alpha", default="dirichlet")
        sl.add_argument("--beta", default="dirichlet")
        sl.add_argument("--emin", type=float)
        sl.add_argument("--emax", type=float, default=60.0)

        periodic = subcommand("periodic", "periodic or skew-periodic eigenvalues")
        periodic.add_argument("--pot", "--cell", dest="pot", required=True)
        periodic.add_argument("--n", type=int_list)
        periodic.add_argument("--flavor", choices=(PERIODIC, SKEW), default=PERIODIC)
        periodic.add_argument("--emax", type=float, default=60.0)

        count = subcommand("count", "number of bound states below E")
        count.add_argument("--pot", "--cell", dest="pot", required=True)
        count.add_argument("--n", type=int_list)
        count.add_argument("--E", dest="energy", type=float, required=True)

        verify = subcommand("verify", "run a verification campaign", ("json", "csv"))
        verify.add_argument("--suite", choices=(*SUITES, "all"), default="all")
        verify.add_argument("--seed", type=int)
        verify.add_argument("--family", choices=FAMILIES)
        verify.add_argument("--n", type=int_list)
        verify.add_argument("--grid", type=int)
        verify.add_argument("--workers", type=int)
        verify.add_argument("--emin", type=float)
        verify.add_argument("--emax", type=float)

    def handle(self, *args, **options):
        subcommand = options["subcommand"]
        logger.info("cli_dispatch", subcommand=subcommand)
        try:
            getattr(self, f"handle_{subcommand}")(options)
        except (
            ValidationError,
            ImproperlyConfigured,
            DomainError,
            PhaseMonotonicityError,
            ZoneScanError,
            OSError,
        ) as exc:
            raise CommandError(str(exc), returncode=2)

    @contextmanager
    def output(self, options):
        if options.get("out"):
            with open(options["out"], "w", encoding="utf-8", newline="") as stream:
                yield stream
        else:
            yield self.stdout

    def emit(self, options, header, rows, document=None):
        with self.output(options) as stream:
            if options["format"] == "json":
                payload = document or [dict(zip(header, row)) for row in rows]
                stream.write(json.dumps(payload, indent=2) + "\n")
                return
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)

    def potential(self, path: str, counts):
        pot = load_potential(path)
        if counts is not None and len(counts) != 1:
            raise CommandError("--n takes a single cell count here", returncode=2)
        if isinstance(pot, HeteroPotential):
            return pot
        cell = pot if isinstance(pot, CellPotential) else pot.cell
        n = counts[0] if counts else getattr(pot, "n", 1)
        return assemble_n_cell(cell, n)

    def cell(self, path: str) -> CellPotential:
        pot = load_potential(path)
        if isinstance(pot, NCellPotential):
            return pot.cell
        if not isinstance(pot, CellPotential):
            raise CommandError("a single cell document is required", returncode=2)
        return pot

    def handle_bands(self, options):
        cell = self.cell(options["cell"])
        q = build_quasimomentum(cell, options["emax"])
        table = q.zone_table
        emin = options["emin"] if options["emin"] is not None else cell.min_value - 1
        grid = np.linspace(emin, options["emax"], options["grid"])
        traces = discriminant(cell, grid)
        momenta = q.at(grid)
        rows = []
        for E, trace, momentum in zip(grid, traces, momenta):
            zone = table.locate(E)
            gap = "" if zone.is_allowed else zone.index
            rows.append([_number(E), _number(trace), _number(momentum), zone.kind, gap])
        document = {
            "zones": [
                {
                    "kind": zone.kind,
                    "E_lo": _finite(zone.E_lo),
                    "E_hi": _finite(zone.E_hi),
                    "index": zone.index,
                }
                for zone in table.zones
            ],
            "samples": [
                dict(zip(("E", "TrM", "p", "zone_kind", "gap_index"), row))
                for row in rows
            ],
        }
        self.emit(options, ["E", "TrM", "p", "zone_kind", "gap_index"], rows, document)

    def handle_scatter(self, options):
        pot = self.potential(options["pot"], options["n"])
        if options["emin"] <= 0:
            raise CommandError("--emin must be positive for scattering", returncode=2)
        rows = []
        for E in np.linspace(options["emin"], options["emax"], options["grid"]):
            data = n_cell_scattering(pot, math.sqrt(E))
            T, R = data.T, data.R
            rows.append(
                [
                    _number(E),
                    _number(T.real),
                    _number(T.imag),
                    _number(abs(T) ** 2),
                    _number(R.real),
                    _number(R.imag),
                ]
            )
        self.emit(options, ["E", "Re T", "Im T", "|T|^2", "Re R", "Im R"], rows)

    def handle_resonances(self, options):
        cell = self.cell(options["cell"])
        if len(options["n"]) != 1:
            raise CommandError("--n takes a single cell count here", returncode=2)
        found = find_resonances(cell, options["n"][0], options["emin"], options["emax"])
        if found.all_pass:
            self.stderr.write("free cell: every positive energy transmits perfectly")
        rows = [
            [_number(item.energy), item.origin, _number(item.reflection)]
            for item in found.resonances
        ]
        self.emit(options, ["λ", "origin", "|R|"], rows)

    def handle_sl(self, options):
        pot = self.potential(options["pot"], options["n"])
        bc = BoundaryConditions.from_tokens(options["alpha"], options["beta"])
        emin = options["emin"] if options["emin"] is not None else pot.min_value - 1
        spectrum = sl_eigenvalues(pot, bc, emin, options["emax"])
        rows = [
            [_number(energy), spectrum.first_index + position + 1]
            for position, energy in enumerate(spectrum.eigenvalues)
        ]
        self.emit(options, ["E_j", "j"], rows)

    def handle_periodic(self, options):
        pot = self.potential(options["pot"], options["n"])
        if isinstance(pot, HeteroPotential):
            raise CommandError(
                "periodic problems need an n-cell potential", returncode=2
            )
        q = build_quasimomentum(pot.cell, ceiling_for(options["emax"]))
        spectrum = periodic_eigenvalues(pot, options["flavor"], options["emax"], q)
        rows = [
            [_number(item.energy), item.multiplicity] for item in spectrum.eigenvalues
        ]
        self.emit(options, ["E_j", "multiplicity"], rows)

    def handle_count(self, options):
        pot = self.potential(options["pot"], options["n"])
        value = count_bound_states(pot, options["energy"])
        with self.output(options) as stream:
            stream.write(f"{value}\n")

    def handle_verify(self, options):
        campaign = Campaign.from_settings(
            seed=options["seed"],
            family=options["family"],
            n_list=options["n"],
            grid_points=options["grid"],
            workers=options["workers"],
            e_floor=options["emin"],
            e_ceiling=options["emax"],
        )
        report = run_suite(campaign, options["suite"])
        with self.output(options) as stream:
            if options["format"] == "csv":
                stream.write(report.to_csv())
            else:
                stream.write(report.to_json() + "\n")
        if not report.passed:
            names = sorted({record.check for record in report.failures()})
            raise CommandError(
                f"{report.summary['fail']} check record(s) failed: {', '.join(names)}",
                returncode=1,
            )
        sys.stderr.flush()
