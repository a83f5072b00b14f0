from fractions import Fraction

import numpy as np
import pytest

from lib.errors import ConfigError, ConsistencyError
from lib.pruittlab import (
    PruittConfig, PruittSample, asymptotic_limit, contribution_probabilities, contributions,
    dp_estimate_B, expected_contribution, generate, noninformative_estimate_B, replicate, report,
)
from lib.survdata import Observation


def sample_of(*rows):
    return PruittSample.from_observations([Observation(*row) for row in rows])


def test_generator_invariants():
    sample = generate(PruittConfig(n=5000, m_conc=1, seed=3))
    assert len(sample) == 5000
    assert not np.any((sample.d1 == 0) & (sample.d2 == 0))
    assert np.all(sample.z1[sample.d1 == 0] == 1.0)
    assert np.all(sample.z2[sample.d2 == 0] == 1.0)
    assert np.all((sample.z1 >= 1) & (sample.z1 <= 3))
    assert np.all((sample.z2 >= 1) & (sample.z2 <= 3))
    contributions(sample)


def test_generator_pattern_frequencies():
    sample = generate(PruittConfig(n=20_000, m_conc=1, seed=11))
    n = len(sample)
    for d1, d2 in ((1, 1), (0, 1), (1, 0)):
        share = np.count_nonzero((sample.d1 == d1) & (sample.d2 == d2)) / n
        assert abs(share - 1 / 3) < 0.015

    second_in_b = np.count_nonzero((sample.d1 == 0) & (sample.z2 >= 2)) / n
    first_in_b = np.count_nonzero((sample.d2 == 0) & (sample.z1 <= 2)) / n
    assert abs(second_in_b - 1 / 6) < 0.012
    assert abs(first_in_b - 1 / 6) < 0.012


def test_generator_is_seeded():
    cfg = PruittConfig(n=100, m_conc=1, seed=5)
    first, second = generate(cfg), generate(cfg)
    assert np.array_equal(first.z1, second.z1)
    assert np.array_equal(first.d2, second.d2)


def test_dp_estimate_hand_examples():
    contributing = sample_of((1, 0, 2.5, 1), (1.5, 1, 1, 0))
    assert list(contributions(contributing)) == [0.5, 0.5]
    assert dp_estimate_B(contributing, 2) == pytest.approx(0.375)

    silent = sample_of((1.5, 1, 1.5, 1), (2.5, 1, 2.5, 1))
    assert dp_estimate_B(silent, 2) == pytest.approx(0.125)


def test_dp_estimate_vanishing_concentration_is_mean_contribution():
    sample = sample_of((1, 0, 2.5, 1), (1, 0, 1.5, 1), (2.5, 1, 2.2, 1))
    assert dp_estimate_B(sample, 1e-12) == pytest.approx(1 / 6)


def test_doubly_censored_pair_is_rejected():
    with pytest.raises(ConsistencyError):
        contributions(sample_of((1, 0, 1, 0)))


def test_uncensored_pair_outside_support_is_rejected():
    with pytest.raises(ConsistencyError):
        contributions(sample_of((1.5, 1, 2.5, 1)))


def test_exact_limits():
    assert contribution_probabilities() == {'0,1': Fraction(1, 6), '1,0': Fraction(1, 6)}
    assert expected_contribution() == Fraction(1, 6)
    assert asymptotic_limit() == Fraction(1, 6)


def test_config_validation():
    with pytest.raises(ConfigError):
        PruittConfig(n=0, m_conc=1, seed=0)
    with pytest.raises(ConfigError):
        PruittConfig(n=10, m_conc=0, seed=0)


@pytest.mark.parametrize('seed', [1, 2, 3, 4, 5])
def test_large_sample_estimate_approaches_one_sixth(seed):
    doc = report(PruittConfig(n=100_000, m_conc=1, seed=seed))
    assert abs(doc['estimate'] - 1 / 6) < 0.01
    assert doc['gap_to_truth'] > 0.1
    assert doc['limit'] == pytest.approx(1 / 6)


def test_noninformative_estimate_of_b_is_zero():
    sample = generate(PruittConfig(n=2000, m_conc=1, seed=9))
    assert noninformative_estimate_B(sample) == 0


def test_report_with_comparison():
    doc = report(PruittConfig(n=500, m_conc=1, seed=4), compare=True)
    assert set(doc) == {'n', 'M', 'seed', 'estimate', 'limit', 'gap_to_truth', 'noninformative_estimate'}
    assert doc['noninformative_estimate'] == 0


def test_replicate_uses_consecutive_seeds():
    docs = replicate(PruittConfig(n=200, m_conc=1, seed=7), 3)
    assert [doc['seed'] for doc in docs] == [7, 8, 9]
    assert docs[0] == report(PruittConfig(n=200, m_conc=1, seed=7))
