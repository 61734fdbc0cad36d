from __future__ import annotations

import dataclasses
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from algorithms.apm import run_apm
from algorithms.apm_c import run_apm_c
from algorithms.baselines import run_dngd, run_extra
from algorithms.schedules import ApmcSchedule, ApmcScheduleNSC, ApmcScheduleSC, ApmSchedule
from config.settings import Settings, load_settings
from decentral_apm.errors import ApmError
from decentral_apm.models import APM_SCHEDULES, APMC_SCHEDULES, ExperimentConfig, parse_config
from harness.counters import Counters
from harness.metrics import record_run
from harness.trace import RunTrace, write_trace_csv
from network.graph import Network, build_erdos_renyi
from network.weights import WeightMatrix, lazy_metropolis_weights
from problems.base import Problem
from problems.generators import gen_hinge_svm, gen_lasso, gen_least_squares
from problems.reference import Reference

logger = logging.getLogger(__name__)

ConfigInput = Union[ExperimentConfig, dict[str, Any], str]

DEFAULT_STEP_SCALE = {"extra": 1.0, "dngd": 0.5}


@dataclass(frozen=True)
class Instance:
    network: Network
    W: WeightMatrix
    problem: Problem
    reference: Reference


def build_instance(cfg: ExperimentConfig, settings: Optional[Settings] = None) -> Instance:
    """Graph, mixing matrix, problem data and centralized reference, all from cfg.seed."""
    settings = settings or load_settings()
    net = build_erdos_renyi(cfg.m, cfg.p, cfg.seed, max_retries=cfg.max_retries)
    W = lazy_metropolis_weights(net)
    logger.info("Graph m=%d p=%g: %d edges, sigma2=%.6f gap=%.6f", cfg.m, cfg.p, len(net.edges), W.sigma2, W.gap)

    iterations = cfg.reference_iters or settings.reference_iters
    if cfg.problem == "least_squares":
        problem, reference = gen_least_squares(cfg.N, cfg.n, cfg.m, cfg.mu, cfg.seed)
    elif cfg.problem == "lasso":
        problem, reference = gen_lasso(cfg.N, cfg.n, cfg.m, cfg.mu, cfg.lam, cfg.seed, iterations=iterations)
    else:
        problem, reference = gen_hinge_svm(cfg.N, cfg.n, cfg.m, cfg.seed, iterations=iterations)
    logger.info("Reference (%s): f* = %.12g", reference.method, reference.f_star)
    return Instance(network=net, W=W, problem=problem, reference=reference)


def build_apmc_schedule(cfg: ExperimentConfig, problem: Problem, settings: Settings) -> ApmcSchedule:
    beta0 = cfg.beta0 or settings.beta0
    if cfg.schedule == "sc":
        return ApmcScheduleSC.for_problem(
            problem,
            beta0=beta0,
            inner_divisor=cfg.inner_divisor or settings.sc_inner_divisor,
            theory_mode=cfg.theory_mode,
        )
    return ApmcScheduleNSC(
        beta0=beta0,
        inner_divisor=cfg.inner_divisor or settings.nsc_inner_divisor,
        theory_mode=cfg.theory_mode,
        mu=problem.mu,
    )


def build_apm_schedule(cfg: ExperimentConfig, problem: Problem, W: WeightMatrix, settings: Settings) -> ApmSchedule:
    mode = "fixed" if cfg.schedule == "thm3" else "adaptive"
    if cfg.tuned:
        schedule = ApmSchedule.tuned(
            W,
            mode,
            cfg.K,
            beta0_scale=cfg.beta0_scale or settings.apm_beta0_scale,
            eta_scale=cfg.eta_scale or settings.apm_eta_scale,
        )
        # least squares keeps a gap-independent beta0
        if problem.kind == "least_squares" and not cfg.beta0_scale:
            schedule = dataclasses.replace(schedule, beta0=settings.apm_ls_beta0)
    else:
        schedule = ApmSchedule.theoretical(problem, W, mode, cfg.K)
        if cfg.beta0_scale:
            schedule = dataclasses.replace(schedule, beta0=cfg.beta0_scale / W.gap**0.5)
        if cfg.eta_scale:
            schedule = dataclasses.replace(schedule, eta_scale=cfg.eta_scale)
    if cfg.beta0:
        schedule = dataclasses.replace(schedule, beta0=cfg.beta0)
    return schedule


def execute(cfg: ExperimentConfig, settings: Settings, instance: Optional[Instance] = None) -> RunTrace:
    """Run the configured algorithm on a (possibly prebuilt) instance. No files, no metrics."""
    instance = instance or build_instance(cfg, settings)
    problem, W, reference = instance.problem, instance.W, instance.reference
    common = dict(
        reference=reference,
        counters=Counters(),
        metric_every=cfg.metric_every or settings.metric_every,
        record_wall_time=cfg.record_wall_time,
    )

    if cfg.algorithm == "apm-c":
        trace = run_apm_c(problem, W, build_apmc_schedule(cfg, problem, settings), cfg.K, **common)
    elif cfg.algorithm == "apm":
        schedule = build_apm_schedule(cfg, problem, W, settings)
        trace = run_apm(problem, W, schedule, cfg.K, prefer_prox=cfg.prefer_prox, **common)
    else:
        stepsize = (cfg.step_scale or DEFAULT_STEP_SCALE[cfg.algorithm]) / problem.L
        runner = run_extra if cfg.algorithm == "extra" else run_dngd
        trace = runner(problem, W, stepsize, cfg.K, **common)

    trace.metadata["seed"] = cfg.seed
    trace.metadata["graph_seed"] = instance.network.seed
    trace.metadata["edges"] = len(instance.network.edges)
    trace.metadata["f_star"] = reference.f_star
    trace.metadata["config"] = cfg.model_dump(mode="json", exclude={"out"})
    return trace


def run_experiment(
    config: ConfigInput,
    settings: Optional[Settings] = None,
    instance: Optional[Instance] = None,
) -> RunTrace:
    """
    Validate the config, run it, write the CSV trace when `out` is set and
    account the run in the prometheus metrics.
    """
    cfg = parse_config(config)
    settings = settings or load_settings()
    started = time.perf_counter()
    try:
        trace = execute(cfg, settings, instance)
        if cfg.out:
            write_trace_csv(trace, cfg.out)
    except (ApmError, OSError, ValueError):
        record_run(cfg.algorithm, "error", time.perf_counter() - started)
        raise

    _record_success(cfg.algorithm, trace, time.perf_counter() - started)
    return trace


def _record_success(algorithm: str, trace: RunTrace, seconds: float) -> None:
    last = trace.last
    record_run(
        algorithm,
        "ok",
        seconds,
        comms=last.comms,
        grads=last.grad_evals,
        subgrads=last.subgrad_evals,
    )


def _pool_run(cfg_json: str, settings: Settings) -> tuple[RunTrace, float]:
    cfg = parse_config(cfg_json)
    started = time.perf_counter()
    trace = execute(cfg, settings)
    if cfg.out:
        write_trace_csv(trace, cfg.out)
    return trace, time.perf_counter() - started


def comparison_configs(base: ConfigInput, algorithms: list[str], out_dir: Optional[str] = None) -> list[ExperimentConfig]:
    """One config per algorithm; the schedule is kept only where the algorithm takes it."""
    base_cfg = parse_config(base)
    configs = []
    for algorithm in algorithms:
        data = base_cfg.model_dump()
        schedule = base_cfg.schedule
        if algorithm == "apm-c" and schedule not in APMC_SCHEDULES:
            schedule = None
        elif algorithm == "apm" and schedule not in APM_SCHEDULES:
            schedule = None
        elif algorithm in ("extra", "dngd"):
            schedule = None
        data.update(
            algorithm=algorithm,
            schedule=schedule,
            out=str(Path(out_dir) / f"{algorithm}.csv") if out_dir else None,
        )
        configs.append(parse_config(data))
    return configs


def compare_algorithms(
    base: ConfigInput,
    algorithms: list[str],
    out_dir: Optional[str] = None,
    *,
    workers: int = 1,
    settings: Optional[Settings] = None,
) -> dict[str, RunTrace]:
    """
    Run several algorithms on the same graph and problem instance. With
    workers > 1 each run goes to a process pool and rebuilds the instance
    from the shared seed.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    configs = comparison_configs(base, algorithms, out_dir)
    settings = settings or load_settings()
    results: dict[str, RunTrace] = {}

    if workers == 1 or len(configs) == 1:
        instance = build_instance(configs[0], settings)
        for cfg in configs:
            results[cfg.algorithm] = run_experiment(cfg, settings, instance)
        return results

    logger.info("Running %d algorithms on %d worker processes", len(configs), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {cfg.algorithm: pool.submit(_pool_run, cfg.model_dump_json(), settings) for cfg in configs}
        for algorithm, future in futures.items():
            try:
                trace, seconds = future.result()
            except Exception:
                record_run(algorithm, "error", 0.0)
                raise
            _record_success(algorithm, trace, seconds)
            results[algorithm] = trace
    return results


def summarize(trace: RunTrace) -> str:
    meta = trace.metadata
    last = trace.last
    label = meta.get("algorithm", "?")
    if meta.get("schedule"):
        label += f"/{meta['schedule']}"
    return (
        f"{label} K={meta.get('K')}: obj_gap={last.obj_gap:.6e} "
        f"violation={last.consensus_violation:.6e} grads={last.grad_evals} "
        f"subgrads={last.subgrad_evals} comms={last.comms}"
    )
