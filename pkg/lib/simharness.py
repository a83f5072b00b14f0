"""
Simulation harness module - Censored samples from a known (P0, G), the exact
law they induce, and convergence studies of the estimators against P0
"""
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from lib import metrics
from lib.betaproc2d import BivariateMass, check_proper, mass_from_dict, noninformative_estimate
from lib.config import deep_merge, parse_count, parse_time
from lib.dabrowska import SurvivalSurface, dabrowska_estimate, mass_audit
from lib.errors import ConfigError, PairSurvError
from lib.report import compute_summary
from lib.survdata import Dataset, Observation, TimeGrid, counts_from_law, make_dataset, observe

logger = logging.getLogger(__name__)

STUDY_ESTIMATORS = ('noninformative', 'dabrowska')
CSV_COLUMNS = ('n', 'replication', 'estimator', 'sup_error', 'negative_cells')

# Censoring times sit between the lifetime times: a censoring time equal to
# the larger lifetime of a pair would report the pair as a tie.
DEFAULT_SCENARIO = {
    'p0': {'atoms': [[t1, t2, '1/9'] for t1 in (1, 2, 3) for t2 in (1, 2, 3)]},
    'g': {'atoms': [
        ['3.5', '3.5', '0.55'],
        ['1.5', '3.5', '0.15'],
        ['3.5', '1.5', '0.15'],
        ['2.5', '2.5', '0.15'],
    ]},
    'sample_sizes': [100, 1000, 10000],
    'replications': 50,
    'estimators': ['noninformative'],
    'workers': 1,
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Truth p0 and censoring law g, both placed on the shared grid"""
    grid: TimeGrid
    p0: BivariateMass
    g: BivariateMass
    sample_sizes: Tuple[int, ...]
    replications: int
    seed: int
    estimators: Tuple[str, ...] = ('noninformative',)
    workers: int = 1

    def __post_init__(self):
        for name, mass in (('p0', self.p0), ('g', self.g)):
            if not check_proper(mass):
                raise ConfigError(f"{name} must be a nonnegative mass totaling 1, got total {float(mass.total())}")
            if mass.defects:
                raise ConfigError(f"{name} must not carry defect records")
        if not self.sample_sizes:
            raise ConfigError("Scenario needs at least one sample size")
        for n in self.sample_sizes:
            parse_count(n, 'sample size')
        parse_count(self.replications, 'replications')
        parse_count(self.workers, 'workers')
        if not self.estimators or any(name not in STUDY_ESTIMATORS for name in self.estimators):
            raise ConfigError(f"Study estimators must be a nonempty subset of {', '.join(STUDY_ESTIMATORS)}")


def _listed(merged, key):
    value = merged[key]
    if not isinstance(value, list):
        raise ConfigError(f"Scenario {key} must be a list, got {value!r}")
    return tuple(value)


def scenario_from_dict(doc, seed: Optional[int] = None) -> ScenarioConfig:
    """
    Scenario document merged over DEFAULT_SCENARIO
    The seed comes from the document or the `seed` argument, never from a default
    """
    merged = deep_merge(DEFAULT_SCENARIO, doc)
    if seed is None:
        seed = merged.get('seed')
    if seed is None:
        raise ConfigError("Scenario needs an explicit seed")
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"Seed must be an integer, got {seed!r}")

    p0 = mass_from_dict(merged['p0'])
    g = mass_from_dict(merged['g'])
    grid = p0.grid.union(g.grid)
    if 'grid' in merged:
        grid = grid.union(parse_time(t) for t in _listed(merged, 'grid'))

    return ScenarioConfig(
        grid=grid,
        p0=BivariateMass(grid, p0.atoms),
        g=BivariateMass(grid, g.atoms),
        sample_sizes=_listed(merged, 'sample_sizes'),
        replications=merged['replications'],
        seed=seed,
        estimators=_listed(merged, 'estimators'),
        workers=merged['workers'],
    )


def _support(mass: BivariateMass):
    points = list(mass.points.items())
    weights = np.array([float(value) for _, value in points])
    return [point for point, _ in points], weights / weights.sum()


def _draw(p0: BivariateMass, g: BivariateMass, n: int, rng):
    lifetimes, p = _support(p0)
    censoring, q = _support(g)
    t_idx = rng.choice(len(lifetimes), size=n, p=p)
    c_idx = rng.choice(len(censoring), size=n, p=q)
    outcomes = [[observe(t[0], t[1], c[0], c[1]) for c in censoring] for t in lifetimes]
    return outcomes, t_idx, c_idx


def simulate_dataset(p0: BivariateMass, g: BivariateMass, n: int, rng) -> Dataset:
    """n independent draws of T ~ p0 and C ~ g, reduced to censored observations"""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    outcomes, t_idx, c_idx = _draw(p0, g, n, rng)
    observations = [outcomes[k][l] for k, l in zip(t_idx.tolist(), c_idx.tolist())]
    return make_dataset(observations, p0.grid.union(g.grid))


def _simulate_tally(p0, g, n, rng) -> Dict[Observation, int]:
    """Multiplicities of the same draws simulate_dataset makes with this stream"""
    outcomes, t_idx, c_idx = _draw(p0, g, n, rng)
    width = len(outcomes[0])
    codes, counts = np.unique(t_idx * width + c_idx, return_counts=True)
    tally = defaultdict(int)
    for code, count in zip(codes.tolist(), counts.tolist()):
        tally[outcomes[code // width][code % width]] += count
    return dict(tally)


def induced_law(p0: BivariateMass, g: BivariateMass) -> Dict[Observation, Fraction]:
    """Exact law of the censored observation, enumerated over the supports of p0 and g"""
    law = defaultdict(int)
    for (t1, t2), p in p0.points.items():
        for (c1, c2), q in g.points.items():
            law[observe(t1, t2, c1, c2)] += p * q
    return dict(law)


def sup_error(estimate: SurvivalSurface, truth: SurvivalSurface) -> float:
    """Largest absolute difference over the grid closure"""
    if estimate.grid != truth.grid:
        raise ConfigError("Surfaces compared on different grids")
    return max(
        abs(float(a - b))
        for row_a, row_b in zip(estimate.values, truth.values)
        for a, b in zip(row_a, row_b)
    )


def replication_seed(cfg: ScenarioConfig, n_index: int, replication: int) -> int:
    return cfg.seed + n_index * cfg.replications + replication


def _run_replication(task):
    cfg, n_index, n, replication = task
    rng = np.random.default_rng(replication_seed(cfg, n_index, replication))
    truth = SurvivalSurface.from_mass(cfg.p0)
    records = []

    def record(estimator, **fields):
        entry = {
            'n': n,
            'replication': replication,
            'estimator': estimator,
            'sup_error': None,
            'negative_cells': None,
            'total': None,
            'proper': None,
            'error': None,
        }
        entry.update(fields)
        records.append(entry)

    if 'dabrowska' in cfg.estimators:
        dataset = simulate_dataset(cfg.p0, cfg.g, n, rng)
        tally = defaultdict(int)
        for obs in dataset.observations:
            tally[obs] += 1
    else:
        tally = _simulate_tally(cfg.p0, cfg.g, n, rng)

    if 'noninformative' in cfg.estimators:
        try:
            mass = noninformative_estimate(counts_from_law(tally, cfg.grid))
            record(
                'noninformative',
                sup_error=sup_error(SurvivalSurface.from_mass(mass), truth),
                total=float(mass.total()),
                proper=check_proper(mass),
            )
        except PairSurvError as e:
            record('noninformative', error=str(e))

    if 'dabrowska' in cfg.estimators:
        try:
            surface = dabrowska_estimate(dataset)
            record(
                'dabrowska',
                sup_error=sup_error(surface, truth),
                negative_cells=len(mass_audit(surface).negatives),
            )
        except PairSurvError as e:
            record('dabrowska', error=str(e))

    return records


@dataclass(frozen=True)
class ConvergenceReport:
    seed: int
    sample_sizes: Tuple[int, ...]
    replications: int
    runs: Tuple[dict, ...]

    def summary(self) -> List[dict]:
        """Median and quartiles of the sup error per (n, estimator)"""
        groups = defaultdict(list)
        for run in self.runs:
            groups[(run['n'], run['estimator'])].append(run)

        rows = []
        for (n, estimator), runs in sorted(groups.items()):
            errors = [run['sup_error'] for run in runs if run['sup_error'] is not None]
            row = {'n': n, 'estimator': estimator, 'failures': sum(1 for run in runs if run['error'])}
            row.update(compute_summary(errors))
            if estimator == 'dabrowska':
                row['negative_cells'] = sum(run['negative_cells'] or 0 for run in runs)
            rows.append(row)
        return rows

    def medians(self, estimator='noninformative') -> Dict[int, float]:
        return {row['n']: row['median'] for row in self.summary() if row['estimator'] == estimator}

    def csv_rows(self):
        return [[run[column] for column in CSV_COLUMNS] for run in self.runs]

    def to_dict(self):
        return {
            'seed': self.seed,
            'sample_sizes': list(self.sample_sizes),
            'replications': self.replications,
            'runs': list(self.runs),
            'summary': self.summary(),
        }


def run_study(cfg: ScenarioConfig) -> ConvergenceReport:
    """
    Simulate every (n, replication), run the selected estimators and record
    their sup-norm errors; a failing replication is recorded, not raised
    """
    from lib.preflight import run_preflight_checks

    checks = run_preflight_checks(cfg)
    if not checks['passed']:
        failed = [check['message'] for check in checks['checks'] if not check['passed']]
        raise ConfigError(f"Scenario failed preflight checks: {'; '.join(failed)}")

    tasks = [
        (cfg, n_index, n, replication)
        for n_index, n in enumerate(cfg.sample_sizes)
        for replication in range(cfg.replications)
    ]
    logger.info(f"Running {len(tasks)} replications with {cfg.workers} worker(s)")

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            batches = list(pool.map(_run_replication, tasks))
    else:
        batches = [_run_replication(task) for task in tasks]

    runs = tuple(run for batch in batches for run in batch)
    for run in runs:
        status = 'failed' if run['error'] else 'succeeded'
        metrics.study_replications_total.labels(estimator=run['estimator'], status=status).inc()
        if run['error']:
            logger.warning(f"Replication {run['replication']} at n={run['n']} failed for {run['estimator']}: {run['error']}")
        if run['negative_cells']:
            metrics.negative_cells_total.inc(run['negative_cells'])

    report = ConvergenceReport(cfg.seed, cfg.sample_sizes, cfg.replications, runs)
    for row in report.summary():
        logger.info(f"Study n={row['n']} {row['estimator']}: median sup error {row['median']}")
    return report
