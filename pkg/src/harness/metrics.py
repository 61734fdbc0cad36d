from __future__ import annotations

import logging

from prometheus_client import REGISTRY, Counter, Histogram, push_to_gateway

logger = logging.getLogger(__name__)


# repeated imports (tests, process pools) must not register twice
def get_or_create_metric(name, documentation, metric_type, **kwargs):
    try:
        return metric_type(name, documentation, **kwargs)
    except ValueError:
        return REGISTRY._names_to_collectors[name]


RUNS_TOTAL = get_or_create_metric(
    "apm_runs_total",
    "Simulator runs",
    Counter,
    labelnames=["algorithm", "status"],
)

RUN_SECONDS = get_or_create_metric(
    "apm_run_seconds",
    "Wall time of one simulator run",
    Histogram,
    labelnames=["algorithm"],
    buckets=(0.1, 0.5, 1, 5, 15, 60, 300, 1800, 7200),
)

COMMUNICATIONS_TOTAL = get_or_create_metric(
    "apm_communications_total",
    "Neighbor exchanges performed",
    Counter,
    labelnames=["algorithm"],
)

GRADIENT_EVALS_TOTAL = get_or_create_metric(
    "apm_gradient_evals_total",
    "Gradient oracle calls",
    Counter,
    labelnames=["algorithm"],
)

SUBGRADIENT_EVALS_TOTAL = get_or_create_metric(
    "apm_subgradient_evals_total",
    "Subgradient oracle calls",
    Counter,
    labelnames=["algorithm"],
)


def record_run(algorithm: str, status: str, seconds: float, comms: int = 0, grads: int = 0, subgrads: int = 0) -> None:
    RUNS_TOTAL.labels(algorithm=algorithm, status=status).inc()
    RUN_SECONDS.labels(algorithm=algorithm).observe(seconds)
    COMMUNICATIONS_TOTAL.labels(algorithm=algorithm).inc(comms)
    GRADIENT_EVALS_TOTAL.labels(algorithm=algorithm).inc(grads)
    SUBGRADIENT_EVALS_TOTAL.labels(algorithm=algorithm).inc(subgrads)


def push_metrics(url: str, job: str = "decentral_apm") -> bool:
    """Push the default registry to a pushgateway. Failures are logged, never raised."""
    if not url:
        return False
    try:
        push_to_gateway(url, job=job, registry=REGISTRY)
    except Exception as e:
        logger.warning("Metrics push to %s failed: %s", url, e)
        return False
    return True
