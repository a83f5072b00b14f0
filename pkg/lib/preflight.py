"""
Preflight checks module - Validates a study scenario before any replication runs
"""
import logging

from lib.betaproc2d import check_proper, recover_distribution
from lib.errors import PairSurvError
from lib.simharness import induced_law

logger = logging.getLogger(__name__)


def run_preflight_checks(cfg):
    """
    Run preflight checks before starting a study
    Returns dict with:
      - passed: boolean indicating if all checks passed
      - checks: list of check results
    """
    checks = [
        check_masses(cfg),
        check_sizes(cfg),
        check_support(cfg),
    ]
    all_passed = all(check['passed'] for check in checks)

    for check in checks:
        if not check['passed']:
            logger.warning(f"Preflight check '{check['name']}' failed: {check['message']}")

    return {
        'passed': all_passed,
        'checks': checks
    }


def check_masses(cfg):
    """Check that p0 and g are proper distributions on the scenario grid"""
    bad = [name for name, mass in (('p0', cfg.p0), ('g', cfg.g)) if not check_proper(mass)]
    if bad:
        return {
            'name': 'Valid Masses',
            'passed': False,
            'message': f'Not a proper distribution: {", ".join(bad)}'
        }

    return {
        'name': 'Valid Masses',
        'passed': True,
        'message': f'p0 has {len(cfg.p0.points)} support points, g has {len(cfg.g.points)}'
    }


def check_sizes(cfg):
    """Check sample sizes and replication count"""
    if any(n < 1 for n in cfg.sample_sizes) or cfg.replications < 1:
        return {
            'name': 'Study Size',
            'passed': False,
            'message': f'Sample sizes {list(cfg.sample_sizes)} and replications {cfg.replications} must be positive'
        }

    return {
        'name': 'Study Size',
        'passed': True,
        'message': f'{len(cfg.sample_sizes)} sample sizes x {cfg.replications} replications'
    }


def check_support(cfg):
    """Check that the censoring law lets the exact observable law reproduce p0"""
    try:
        recovered = recover_distribution(induced_law(cfg.p0, cfg.g))
    except PairSurvError as e:
        return {
            'name': 'Support Condition',
            'passed': False,
            'message': f'p0 is not identifiable under g: {str(e)}'
        }

    if recovered.points != cfg.p0.points:
        return {
            'name': 'Support Condition',
            'passed': False,
            'message': 'Exact-law recovery does not reproduce p0 (censoring times tie with lifetimes?)'
        }

    return {
        'name': 'Support Condition',
        'passed': True,
        'message': 'Exact-law recovery reproduces p0'
    }
