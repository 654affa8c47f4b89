"""``l1lens <subcommand>`` entry point.

Each subcommand is a management command of the ``l1lens`` app; this
module only sets Django up, dispatches and maps failures to exit codes.
"""

import logging
import os
import sys

import django
from django.core.management import load_command_class

SUBCOMMANDS = (
    "ingest",
    "annotate",
    "generate",
    "profile",
    "score",
    "report",
    "validate",
    "synth",
)

logger = logging.getLogger("l1lens")


def usage() -> str:
    return f"usage: l1lens {{{','.join(SUBCOMMANDS)}}} [options]"


def run(argv: list[str] | None = None) -> int:
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "l1lens_site.settings")
    django.setup()

    from l1lens_site.error_handlers import EXIT_OK, EXIT_USAGE, exit_status

    args = list(sys.argv[1:] if argv is None else argv)
    if args[:1] in (["-h"], ["--help"]):
        sys.stdout.write(usage() + "\n")
        return EXIT_OK
    if not args or args[0] not in SUBCOMMANDS:
        sys.stderr.write(usage() + "\n")
        if args:
            logger.error("[usage] unknown subcommand %r", args[0])
        return EXIT_USAGE

    name, *rest = args
    command = load_command_class("l1lens", name)
    try:
        command.run_from_argv(["l1lens", name, *rest])
    except SystemExit as exc:
        if exc.code is None:
            return EXIT_OK
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        return exit_status(exc)
    return EXIT_OK
