"""The run connection: parsed arguments, logging and per-degree task bookkeeping."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Any, Sequence

from pydantic import ValidationError

from pslab import config
from pslab.exceptions import BusinessError
from pslab.subprocesses.cache_utils import GroebnerCache
from pslab.subprocesses.report import RunConfig

logger = logging.getLogger("pslab")


@dataclass
class DegreeTask:
    """One unit of work in a sweep. ``degree`` is None for degree-free commands."""

    degree: int | None
    status: str = "pending"
    result: dict[str, Any] | None = None
    error: dict[str, Any] | None = None
    exit_code: int = config.EXIT_OK
    seconds: float | None = None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pslab", description="Truncated point schemes and the map τ: A → B(A).")
    parser.add_argument("command", choices=["hilbert", "ud", "tau", "bseries", "points", "normalize-formula"])
    parser.add_argument("--alg", help="algebra TOML file")
    parser.add_argument("--min-deg", type=int, dest="min_deg")
    parser.add_argument("--max-deg", type=int, dest="max_deg", default=3)
    parser.add_argument("--order", default="degrevlex", help="monomial order for K(d): degrevlex or deglex")
    parser.add_argument("--nc-order", dest="nc_order",
                        help='word order on A as a chain such as "z<y<x"; declaration order by default')
    parser.add_argument("--cech-k", type=int, dest="cech_k", default=config.DEFAULT_CECH_K)
    parser.add_argument("--cech-m", type=int, dest="cech_m", default=config.DEFAULT_CECH_M)
    parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    parser.add_argument("--trials", type=int, default=config.DEFAULT_TRIALS)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--cache-dir", dest="cache_dir", help=f"defaults to ${config.CACHE_ENV_VAR} or .cache")
    parser.add_argument("--no-cache", dest="no_cache", action="store_true")
    parser.add_argument("--json", dest="json_out", help="write the report here instead of stdout")
    parser.add_argument("--cover", action="append", default=[], help="degree-d cover element, repeatable")
    parser.add_argument("--families", help="TOML file of parametrized point families")
    parser.add_argument("--h0-method", dest="h0_method", default="presentation",
                        choices=["presentation", "ambient"])
    parser.add_argument("--timing", action="store_true")
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--config", dest="config_path", help="normalize-formula document")
    parser.add_argument("--max-basis", type=int, dest="max_basis", default=config.MAX_BASIS_SIZE)
    parser.add_argument("--max-pairs", type=int, dest="max_pairs", default=config.MAX_PAIRS)
    return parser


class LabConnection:
    """Carries the run configuration, the loaded inputs and the task list through a run."""

    def __init__(self, run_config: RunConfig):
        self.config = run_config
        self.presentation = None
        self.input_hash: str | None = None
        self.families = []
        self.tasks: list[DegreeTask] = []
        self._cache: GroebnerCache | None = None

    @classmethod
    def create_connection_from_args(cls, argv: Sequence[str] | None = None) -> LabConnection:
        """Parse and validate arguments.

        Raises:
            BusinessError: the arguments parse but break a range or dependency rule.
        """
        namespace = build_parser().parse_args(argv)
        try:
            run_config = RunConfig.model_validate(vars(namespace))
        except ValidationError as error:
            raise BusinessError(f"invalid arguments: {error}") from error
        connection = cls(run_config)
        connection.configure_logging()
        return connection

    def configure_logging(self) -> None:
        level = logging.DEBUG if self.config.verbose else logging.INFO
        if not logger.handlers:
            handler = logging.StreamHandler()
            handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
            logger.addHandler(handler)
        for handler in logger.handlers:
            if isinstance(handler, logging.StreamHandler):
                handler.setStream(sys.stderr)
        logger.setLevel(level)

    def log_trace(self, message: str) -> None:
        logger.debug(message)

    def log_info(self, message: str) -> None:
        logger.info(message)

    def log_error(self, message: str) -> None:
        logger.error(message)

    @property
    def cache(self) -> GroebnerCache | None:
        if self._cache is None:
            directory = self.config.resolved_cache_dir()
            if directory is not None:
                self._cache = GroebnerCache(directory)
        return self._cache

    def fail_task(self, task: DegreeTask, error_type: str, message: str, exit_code: int) -> None:
        task.status = "failed"
        task.error = {"type": error_type, "message": message}
        task.exit_code = exit_code

    def complete_task(self, task: DegreeTask, result: dict[str, Any], seconds: float | None = None) -> None:
        task.status = "ok"
        task.result = result
        task.seconds = seconds

    @property
    def exit_code(self) -> int:
        """The most severe exit code among the tasks."""
        return max((task.exit_code for task in self.tasks), default=config.EXIT_OK)

