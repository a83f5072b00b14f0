"""
Pruitt module - Censored data whose Dirichlet-process Bayes estimate of
P(B) converges to 1/6 although the true value is 0

Lifetimes are uniform on A = [1,2]² ∪ [2,3]², censoring takes each of
(1,3), (3,1), (4,4) with probability 1/3, the prior guess is uniform on
[1,3]² and B = [1,2] x [2,3].
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

import numpy as np

from lib.betaproc2d import noninformative_estimate
from lib.errors import ConfigError, ConsistencyError
from lib.survdata import Observation, compute_counts, make_dataset

logger = logging.getLogger(__name__)

CENSORING = np.array([[1.0, 3.0], [3.0, 1.0], [4.0, 4.0]])
ALPHA_B = Fraction(1, 4)
TRUE_P_B = 0


@dataclass(frozen=True)
class PruittConfig:
    n: int
    m_conc: float
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"Sample size must be >= 1, got {self.n}")
        if not self.m_conc > 0:
            raise ConfigError(f"Dirichlet concentration must be > 0, got {self.m_conc}")


@dataclass(frozen=True)
class PruittSample:
    """Censored pairs held as arrays; `observations` materializes them"""
    z1: np.ndarray
    d1: np.ndarray
    z2: np.ndarray
    d2: np.ndarray

    def __len__(self):
        return len(self.z1)

    @classmethod
    def from_observations(cls, observations: Sequence[Observation]) -> 'PruittSample':
        return cls(
            z1=np.array([float(o.z1) for o in observations]),
            d1=np.array([o.d1 for o in observations], dtype=np.int64),
            z2=np.array([float(o.z2) for o in observations]),
            d2=np.array([o.d2 for o in observations], dtype=np.int64),
        )

    @property
    def observations(self) -> List[Observation]:
        return [
            Observation(z1, d1, z2, d2)
            for z1, d1, z2, d2 in zip(self.z1.tolist(), self.d1.tolist(), self.z2.tolist(), self.d2.tolist())
        ]


def generate(cfg: PruittConfig, rng=None) -> PruittSample:
    """Draw cfg.n censored pairs; the stream defaults to one seeded with cfg.seed"""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    square = rng.integers(0, 2, size=cfg.n)
    lifetimes = 1.0 + square[:, None] + rng.random((cfg.n, 2))
    censoring = CENSORING[rng.integers(0, 3, size=cfg.n)]

    observed = np.minimum(lifetimes, censoring)
    flags = (lifetimes <= censoring).astype(np.int64)
    return PruittSample(observed[:, 0], flags[:, 0], observed[:, 1], flags[:, 1])


def _within(values, lo, hi):
    return (values >= lo) & (values <= hi)


def _check_sample(sample: PruittSample):
    if np.any((sample.d1 == 0) & (sample.d2 == 0)):
        raise ConsistencyError("Doubly censored pair cannot arise from this censoring law")

    both = (sample.d1 == 1) & (sample.d2 == 1)
    in_a = (_within(sample.z1, 1, 2) & _within(sample.z2, 1, 2)) | (_within(sample.z1, 2, 3) & _within(sample.z2, 2, 3))
    if np.any(both & ~in_a):
        raise ConsistencyError("Uncensored pair outside the support [1,2]² ∪ [2,3]²")


def contributions(sample: PruittSample) -> np.ndarray:
    """Posterior expectation of the indicator of B for each observation under the uniform prior guess"""
    _check_sample(sample)
    in_b = _within(sample.z1, 1, 2) & _within(sample.z2, 2, 3)
    both = (sample.d1 == 1) & (sample.d2 == 1)
    only_second = (sample.d1 == 0) & (sample.d2 == 1)
    only_first = (sample.d1 == 1) & (sample.d2 == 0)

    return (
        np.where(both & in_b, 1.0, 0.0)
        + np.where(only_second & _within(sample.z2, 2, 3), 0.5, 0.0)
        + np.where(only_first & _within(sample.z1, 1, 2), 0.5, 0.0)
    )


def dp_estimate_B(sample: PruittSample, m_conc: float) -> float:
    """M/(M+n)·α(B) + 1/(M+n)·Σ c_i"""
    n = len(sample)
    total = float(contributions(sample).sum())
    return (m_conc * float(ALPHA_B) + total) / (m_conc + n)


def contribution_probabilities():
    """Exact probabilities of the two patterns that contribute: Δ=(0,1) with Z2 in [2,3], Δ=(1,0) with Z1 in [1,2]"""
    censor = Fraction(1, 3)
    square = Fraction(1, 2)
    return {'0,1': censor * square, '1,0': censor * square}


def expected_contribution() -> Fraction:
    return sum(Fraction(1, 2) * p for p in contribution_probabilities().values())


def asymptotic_limit() -> Fraction:
    return Fraction(1, 6)


def noninformative_estimate_B(sample: PruittSample) -> float:
    """
    The Beta-process noninformative estimate of P(B) on the same sample
    Only doubly uncensored pairs have an uncensored minimum here, so it tends to P0(B) = 0
    """
    mass = noninformative_estimate(compute_counts(make_dataset(sample.observations)), exact=False)
    return float(sum(
        value for (t1, t2), value in mass.points.items()
        if 1 <= t1 <= 2 and 2 <= t2 <= 3
    ))


def report(cfg: PruittConfig, compare: bool = False):
    sample = generate(cfg)
    estimate = dp_estimate_B(sample, cfg.m_conc)
    doc = {
        'n': cfg.n,
        'M': cfg.m_conc,
        'seed': cfg.seed,
        'estimate': estimate,
        'limit': float(asymptotic_limit()),
        'gap_to_truth': abs(estimate - TRUE_P_B),
    }
    if compare:
        doc['noninformative_estimate'] = noninformative_estimate_B(sample)

    logger.info(f"Pruitt n={cfg.n} M={cfg.m_conc} seed={cfg.seed}: Dirichlet-process estimate {estimate:.6f}")
    return doc


def replicate(cfg: PruittConfig, replications: int, compare: bool = False):
    """One report per replication, seeded seed + replication index"""
    return [
        report(PruittConfig(cfg.n, cfg.m_conc, cfg.seed + r), compare)
        for r in range(replications)
    ]
