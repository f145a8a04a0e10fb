"""This module contains the per-degree work of every command."""

from __future__ import annotations

import time
from typing import Any, Sequence

from pslab import config
from pslab.connection import DegreeTask, LabConnection
from pslab.subprocesses.algebra.freealg import NCOrder, algebra_dim
from pslab.subprocesses.algebra.presentation import AlgebraPresentation, load_presentation
from pslab.subprocesses.cache_utils import GroebnerCache
from pslab.subprocesses.commutative.multilin import ud_algebra, ud_presentation, verify_generation
from pslab.subprocesses.geometry.cohomlocal import h0m_degree1, nilradical_degree1, tau_report
from pslab.subprocesses.geometry.pointmodules import (
    ParametrizedFamily,
    jd_from_families,
    jd_from_points,
    enumerate_points_finite,
    load_families,
    module_annihilator,
    point_to_module,
    point_vanishing_check,
)
from pslab.subprocesses.geometry.sections import (
    cech_h0_dim,
    cover_from_words,
    evaluate_normalization,
    load_normalization_config,
)
from pslab.subprocesses.report import DegreeEntry, ReportDocument, RunConfig


def plan_tasks(connection: LabConnection) -> list[DegreeTask]:
    """One task per degree, or a single degree-free task for normalize-formula."""
    if connection.config.command == "normalize-formula":
        tasks = [DegreeTask(degree=None)]
    else:
        tasks = [DegreeTask(degree=d) for d in connection.config.degrees]
    connection.tasks = tasks[:config.MAX_TASK_COUNT]
    return connection.tasks


def _cover(run_config: RunConfig, pres: AlgebraPresentation, d: int, cache):
    if not run_config.cover:
        return None
    return cover_from_words(pres, d, run_config.cover, run_config.order, cache)


def _nc_order(run_config: RunConfig, pres: AlgebraPresentation) -> NCOrder | None:
    if run_config.nc_order is None:
        return None
    return NCOrder.from_chain(pres, run_config.nc_order)


def _hilbert(run_config, pres, d, cache, families) -> dict[str, Any]:
    return {"dim_A": algebra_dim(pres, d, _nc_order(run_config, pres), cache)}


def _ud(run_config, pres, d, cache, families) -> dict[str, Any]:
    bound = config.DEFAULT_UD_CHECK_DEGREE
    presentation = ud_presentation(pres, d, bound, run_config.order, cache, run_config.limits)
    ud = presentation.ud
    return {
        "balanced": [ud.dim(t) for t in range(bound + 1)],
        "presentation": [presentation.hilbert_function(t) for t in range(bound + 1)],
        "w_variables": len(presentation.w_names),
        "kernel_generators": len(presentation.kernel.elements),
        "generation_samples": verify_generation(ud.K, pres, seed=run_config.seed),
    }


def _tau(run_config, pres, d, cache, families) -> dict[str, Any]:
    report = tau_report(pres, d, run_config.cech_k, run_config.cech_m, _cover(run_config, pres, d, cache),
                        run_config.h0_method, True, run_config.order, cache, run_config.limits,
                        _nc_order(run_config, pres))
    return report.model_dump()


def _bseries(run_config, pres, d, cache, families) -> dict[str, Any]:
    sections = cech_h0_dim(pres, d, _cover(run_config, pres, d, cache), run_config.cech_k, run_config.cech_m,
                           True, run_config.h0_method, run_config.order, cache, run_config.limits)
    return {"dim_B": sections.dim, **sections.model_dump()}


def _points(run_config, pres, d, cache, families: Sequence[ParametrizedFamily]) -> dict[str, Any]:
    enumeration = enumerate_points_finite(pres, d, run_config.limits)
    points = []
    for point in enumeration.points:
        points.append({
            "point": point.format(),
            "annihilator_dim": module_annihilator(point_to_module(point, pres), pres, d).dim,
            "vanishing_check": point_vanishing_check(pres, d, point, run_config.order, cache),
        })
    at_degree = [family for family in families if len(family.factors) == d]
    jd, source = None, None
    if at_degree:
        jd, source = jd_from_families(pres, d, at_degree), "families"
    elif enumeration.complete:
        jd, source = jd_from_points(pres, d, enumeration.points), "points"
    nil = nilradical_degree1(pres, d, run_config.trials, run_config.seed, jd, source or "points",
                             run_config.order, cache, run_config.limits)
    ud = ud_algebra(pres, d, run_config.order, cache, run_config.limits)
    h0 = h0m_degree1(pres, d, run_config.h0_method, run_config.order, cache, run_config.limits)
    return {
        "points": points,
        "positive_dimensional": enumeration.positive_dimensional,
        "non_rational_charts": enumeration.non_rational_charts,
        "jd": None if jd is None else {"dim": jd.dim, "source": source, "family_attested": source == "families"},
        "nilradical": {
            "dim": nil.dim,
            "basis": [ud.format_vector(row, 1) for row in nil.basis.rows],
            "certainty": nil.certainty,
            "certified_by": nil.certified_by,
            "seed": nil.seed,
            "trials": nil.trials,
        },
        "h0_inside_nilradical": nil.basis.contains_subspace(h0),
    }


_COMMANDS = {
    "hilbert": _hilbert,
    "ud": _ud,
    "tau": _tau,
    "bseries": _bseries,
    "points": _points,
}


def run_degree(run_config: RunConfig, pres: AlgebraPresentation | None, d: int | None, cache: GroebnerCache | None,
               families: Sequence[ParametrizedFamily] = ()) -> dict[str, Any]:
    """Do the work of one task."""
    if run_config.command == "normalize-formula":
        return evaluate_normalization(load_normalization_config(run_config.config_path)).model_dump()
    return _COMMANDS[run_config.command](run_config, pres, d, cache, families)


def run_degree_isolated(run_config: RunConfig, d: int | None) -> tuple[dict[str, Any], float]:
    """Worker entry point: reload the inputs in this process and time the task."""
    started = time.perf_counter()
    pres = load_presentation(run_config.alg) if run_config.alg is not None else None
    families = load_families(run_config.families) if run_config.families is not None else []
    directory = run_config.resolved_cache_dir()
    cache = GroebnerCache(directory) if directory is not None else None
    result = run_degree(run_config, pres, d, cache, families)
    return result, time.perf_counter() - started


def process(connection: LabConnection, task: DegreeTask) -> None:
    """Do the primary work for one degree task in this process."""
    connection.log_trace(f"Running {connection.config.command} at degree {task.degree}.")
    started = time.perf_counter()
    result = run_degree(connection.config, connection.presentation, task.degree, connection.cache,
                        connection.families)
    connection.complete_task(task, result, time.perf_counter() - started)


def _summary(run_config: RunConfig, tasks: Sequence[DegreeTask]) -> dict[str, Any]:
    done = [task for task in tasks if task.status == "ok"]
    if run_config.command == "hilbert":
        return {"series": {task.degree: task.result["dim_A"] for task in done}}
    if run_config.command == "bseries":
        return {
            "series": {task.degree: task.result["dim_B"] for task in done},
            "stable": all(task.result["stable"] for task in done),
        }
    if run_config.command == "tau":
        return {
            "tau_injective_through_range": all(task.result["injective"] for task in done),
            "b_one_generated_through_range": all(task.result["surjective"] for task in done),
            "not_injective_at": [task.degree for task in done if not task.result["injective"]],
            "not_surjective_at": [task.degree for task in done if not task.result["surjective"]],
        }
    return {}


def build_report(connection: LabConnection) -> ReportDocument:
    """Collect the task outcomes into the report document."""
    run_config = connection.config
    entries = [
        DegreeEntry(
            degree=task.degree,
            status="ok" if task.status == "ok" else "failed",
            result=task.result,
            error=task.error,
            seconds=round(task.seconds, 3) if run_config.timing and task.seconds is not None else None,
        )
        for task in connection.tasks
    ]
    pres = connection.presentation
    return ReportDocument(
        algebra=pres.name if pres is not None else None,
        input_hash=connection.input_hash,
        config=run_config.recorded(),
        degrees=entries,
        summary=_summary(run_config, connection.tasks),
        exit_code=connection.exit_code,
    )
