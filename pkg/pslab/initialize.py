"""This module defines any initial processes to run when the tool starts."""

from pathlib import Path

from pslab.connection import LabConnection
from pslab.exceptions import BusinessError
from pslab.subprocesses.algebra.presentation import parse_presentation
from pslab.subprocesses.geometry.pointmodules import load_families
from pslab.subprocesses.helper_functions import content_hash
from pslab.subprocesses.initialization.run_checks import InitializationChecks


def _read(path: Path) -> str:
    if not path.is_file():
        raise BusinessError(f"input file not found: {path}")
    return path.read_text(encoding="utf-8")


def initialize(connection: LabConnection) -> None:
    """Load the inputs named by the run configuration and validate them."""
    connection.log_trace("Initializing.")
    run_config = connection.config
    if run_config.command == "normalize-formula":
        connection.input_hash = content_hash({"config": _read(run_config.config_path)})
        return

    text = _read(run_config.alg)
    connection.presentation = parse_presentation(text)
    inputs = {"algebra": text}
    if run_config.families is not None:
        connection.families = load_families(run_config.families)
        inputs["families"] = _read(run_config.families)
    connection.input_hash = content_hash(inputs)
    connection.log_trace(
        f"Loaded {connection.presentation.name or run_config.alg.name}: "
        f"{connection.presentation.num_generators} generators, {len(connection.presentation.relations)} relations.")

    InitializationChecks(connection).run_all()
