# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.
# Copyright © NCellSpectra contributors
# project: NCellSpectra
"""Programmatic entry into the ``ncell`` management command."""
import os
import sys


def run_cli(argv=None) -> int:
    """
    Run ``ncell`` with ``argv`` and return its exit code: 0 on success,
    1 when a verification check fails, 2 on usage or domain errors.
    """
    os.environ.setdefault(
        "DJANGO_SETTINGS_MODULE", "ncell_spectra.settings.development"
    )
    import django

    django.setup()
    from .management.commands.ncell import Command

    if argv is None:
        argv = sys.argv[1:]
    try:
        Command().run_from_argv(["manage.py", "ncell", *argv])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0
