"""
Metrics module - Prometheus instrumentation of estimator runs and studies
"""
import logging
import time
from contextlib import contextmanager

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

logger = logging.getLogger(__name__)

registry = CollectorRegistry()

estimator_runs_total = Counter(
    'pairsurv_estimator_runs_total',
    'Total number of estimator runs',
    ['estimator', 'outcome'],
    registry=registry,
)
estimator_duration = Histogram(
    'pairsurv_estimator_duration_seconds',
    'Wall time of estimator runs',
    ['estimator'],
    registry=registry,
)
study_replications_total = Counter(
    'pairsurv_study_replications_total',
    'Study replications by estimator and status',
    ['estimator', 'status'],
    registry=registry,
)
negative_cells_total = Counter(
    'pairsurv_dabrowska_negative_cells_total',
    'Negative-mass cells found by the Dabrowska audit',
    registry=registry,
)


@contextmanager
def track_estimator(name):
    """Count the run under its outcome and time it"""
    start = time.perf_counter()
    try:
        yield
    except Exception:
        estimator_runs_total.labels(estimator=name, outcome='error').inc()
        raise
    else:
        estimator_runs_total.labels(estimator=name, outcome='success').inc()
    finally:
        estimator_duration.labels(estimator=name).observe(time.perf_counter() - start)


def export(path):
    """Write every metric in Prometheus text format"""
    write_to_textfile(str(path), registry)
    logger.info(f"Metrics written to {path}")
