"""This module contains various functions and classes to handle errors in the framework."""

from __future__ import annotations

import json
import traceback
from typing import TYPE_CHECKING, Callable

from pslab import config

if TYPE_CHECKING:
    from pslab.connection import DegreeTask, LabConnection


class BusinessError(Exception):
    """Raised when the input breaks the rules of the domain (bad file, bad degree, bad cover)."""

    exit_code = config.EXIT_INPUT_ERROR


class PresentationError(BusinessError):
    """A presentation or expression could not be parsed or validated.

    Args:
        reason: What went wrong.
        expression: The offending expression text, if any.
        position: Zero-based character offset into the expression, if known.
    """

    def __init__(self, reason: str, expression: str | None = None, position: int | None = None):
        self.reason = reason
        self.expression = expression
        self.position = position
        message = reason
        if position is not None:
            message += f" at position {position}"
        if expression is not None:
            message += f" in '{expression}'"
        super().__init__(message)


class ResourceLimitError(Exception):
    """A Gröbner computation exceeded a configured ceiling. Partial state is discarded."""

    exit_code = config.EXIT_RESOURCE_LIMIT

    def __init__(self, message: str, basis_size: int = 0, pairs: int = 0):
        self.basis_size = basis_size
        self.pairs = pairs
        super().__init__(f"{message} (basis size {basis_size}, pairs processed {pairs})")


class InvariantViolation(Exception):
    """Two independent computations that must agree did not."""

    exit_code = config.EXIT_INVARIANT_VIOLATION


def exit_code_for(error: Exception) -> int:
    """Map an exception to the process exit code it should produce."""
    return getattr(error, "exit_code", config.EXIT_INVARIANT_VIOLATION)


def handle_error(message: str, error: Exception, task: DegreeTask | None, connection: LabConnection) -> dict:
    """Handles an error caught during a run.
    Logs an error through the connection.
    Marks the task (if any) as failed and records the error on it.

    Args:
        message: The error category, e.g. "BusinessError".
        error: The exception that should be handled.
        task: The degree task to fail, if any.
        connection: The run connection.

    Returns:
        The structured error record.
    """
    error_dict = {
        "type": message,
        "degree": task.degree if task else None,
        "message": str(error),
        "trace": traceback.format_exc()
    }
    error_msg = json.dumps(error_dict, ensure_ascii=False)
    half = config.ERROR_MESSAGE_LIMIT // 2
    error_msg = (
        f"{error_msg[:half]}  [...] {error_msg[-(half - 10):]}"
        if len(error_msg) > config.ERROR_MESSAGE_LIMIT
        else error_msg
    )

    connection.log_error(error_msg)
    if task:
        connection.fail_task(task, error_dict["type"], str(error), exit_code_for(error))

    return error_dict


def log_exception(connection: LabConnection) -> Callable:
    """Creates a function to be used as an exception hook that logs any uncaught exception.

    Args:
        connection: The run connection.

    Returns:
        callable: A function that can be assigned to sys.excepthook.
    """
    def inner(exception_type, value, traceback_string):
        connection.log_error(f"Uncaught Exception:\nType: {exception_type}\nValue: {value}\nTrace: {traceback_string}")
    return inner
