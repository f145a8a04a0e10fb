"""This module is the primary module of the framework. It collects the functionality of the rest of the framework."""

import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from pslab import initialize, process
from pslab.connection import LabConnection
from pslab.exceptions import BusinessError, exit_code_for, handle_error, log_exception


def _write_report(connection: LabConnection) -> None:
    document = process.build_report(connection).to_json()
    if connection.config.json_out is not None:
        connection.config.json_out.parent.mkdir(parents=True, exist_ok=True)
        connection.config.json_out.write_text(document, encoding="utf-8")
        connection.log_trace(f"Report written to {connection.config.json_out}.")
    else:
        sys.stdout.write(document)


def _run_parallel(connection: LabConnection, tasks) -> None:
    with ProcessPoolExecutor(max_workers=connection.config.jobs) as executor:
        futures = {
            task.degree: executor.submit(process.run_degree_isolated, connection.config, task.degree)
            for task in tasks
        }
        for task in tasks:
            try:
                result, seconds = futures[task.degree].result()
                connection.complete_task(task, result, seconds)
            # Each degree is independent; its failure is recorded and the sweep goes on.
            # pylint: disable-next = broad-exception-caught
            except Exception as error:
                handle_error(type(error).__name__, error, task, connection)


def main(argv: Sequence[str] | None = None) -> int:
    """The entry point for the framework. Returns the process exit code."""
    try:
        connection = LabConnection.create_connection_from_args(argv)
    except BusinessError as error:
        sys.stderr.write(f"pslab: {error}\n")
        return exit_code_for(error)

    sys.excepthook = log_exception(connection)
    connection.log_trace("Framework started.")

    try:
        initialize.initialize(connection)
    except BusinessError as error:
        handle_error(type(error).__name__, error, None, connection)
        return exit_code_for(error)

    tasks = process.plan_tasks(connection)
    if connection.config.jobs > 1 and len(tasks) > 1:
        _run_parallel(connection, tasks)
    else:
        for task in tasks:
            try:
                process.process(connection, task)
            # pylint: disable-next = broad-exception-caught
            except Exception as error:
                handle_error(type(error).__name__, error, task, connection)
            connection.log_trace(f"Finished degree {task.degree}: {task.status}.")

    _write_report(connection)
    connection.log_info(f"{connection.config.command}: {sum(t.status == 'ok' for t in tasks)}/{len(tasks)} tasks done.")
    return connection.exit_code
