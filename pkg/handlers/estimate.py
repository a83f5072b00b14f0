"""
Estimate Handler
Runs one estimator on a CSV dataset and writes the estimate as JSON
"""
import logging

from lib import metrics
from lib.betaproc2d import (
    guess_from_dict, marginal_curves, marginal_product_estimate, mass_to_dict, noninformative_estimate,
    posterior_mean_mass, prior_from_guess, update,
)
from lib.config import ESTIMATORS, load_document
from lib.dabrowska import dabrowska_estimate
from lib.report import write_json
from lib.survdata import compute_counts, load_dataset

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    """Register the estimate subcommand"""
    parser = subparsers.add_parser('estimate', help='Estimate the joint distribution of censored pairs')
    parser.add_argument('--input', help='CSV dataset with header z1,d1,z2,d2')
    parser.add_argument('--estimator', default='noninformative', choices=ESTIMATORS)
    parser.add_argument('--prior', help='Prior guess document (JSON or YAML), bayes only')
    parser.add_argument('--output', help='Path of the JSON estimate')
    parser.set_defaults(handler=handle_estimate)


def run_estimator(ds, estimator, prior_path=None):
    """Estimate document for one estimator; Dabrowska yields a surface, the others a mass"""
    with metrics.track_estimator(estimator):
        if estimator == 'noninformative':
            doc = mass_to_dict(noninformative_estimate(compute_counts(ds)))
        elif estimator == 'bayes':
            guess = guess_from_dict(load_document(prior_path), grid=ds.grid)
            ds = ds.with_grid(guess.f0.grid)
            posterior = update(prior_from_guess(guess), compute_counts(ds))
            doc = mass_to_dict(posterior_mean_mass(posterior))
        elif estimator == 'km-marginal':
            doc = mass_to_dict(marginal_product_estimate(ds))
            doc['marginals'] = [curve.to_dict() for curve in marginal_curves(ds)]
        else:
            doc = dabrowska_estimate(ds).to_dict()

    doc['estimator'] = estimator
    return doc


def handle_estimate(cfg):
    """Estimate the dataset with the configured estimator"""
    ds = load_dataset(cfg.input)
    logger.info(f"Running {cfg.estimator} estimator on {len(ds)} observations")
    doc = run_estimator(ds, cfg.estimator, cfg.prior)
    write_json(cfg.output, doc)
