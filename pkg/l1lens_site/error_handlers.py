import logging

import pydantic_core
from django.core.management.base import CommandError

from l1lens import errors

logger = logging.getLogger("l1lens")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_MODEL = 4
EXIT_PARTIAL = 5
EXIT_ORACLE = 6
EXIT_DATA = 7

CATEGORY_EXIT = {
    "input": EXIT_INPUT,
    "model": EXIT_MODEL,
    "partial": EXIT_PARTIAL,
    "oracle": EXIT_ORACLE,
    "data": EXIT_DATA,
    "config": EXIT_DATA,
}


def handle_command_error(exc: CommandError) -> int:
    logger.error("[usage] %s", exc)
    return EXIT_USAGE


def handle_missing_file(exc: FileNotFoundError) -> int:
    logger.error("[input] missing input: %s", exc.filename or exc)
    return EXIT_INPUT


def handle_validation_error(exc: pydantic_core.ValidationError) -> int:
    logger.error("[data] invalid value: %s", exc)
    return EXIT_DATA


def handle_partial_generation(exc: errors.PartialGenerationError) -> int:
    logger.warning(
        "[partial] %d succeeded, %d failed", exc.succeeded, exc.failed
    )
    return EXIT_PARTIAL


def handle_l1lens_error(exc: errors.L1LensError) -> int:
    logger.error("[%s] %s", exc.category, exc)
    return CATEGORY_EXIT.get(exc.category, EXIT_UNEXPECTED)


def handle_unexpected_error(exc: Exception) -> int:
    logger.exception(exc)
    return EXIT_UNEXPECTED


exception_handlers = [
    (CommandError, handle_command_error),
    (FileNotFoundError, handle_missing_file),
    (pydantic_core.ValidationError, handle_validation_error),
    (errors.PartialGenerationError, handle_partial_generation),
    (errors.L1LensError, handle_l1lens_error),
    (Exception, handle_unexpected_error),
]


def exit_status(exc: Exception) -> int:
    for exception, handler in exception_handlers:
        if isinstance(exc, exception):
            return handler(exc)
    return EXIT_UNEXPECTED
