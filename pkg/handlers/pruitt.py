"""
Pruitt Handler
Reports the Dirichlet-process estimate of P(B) on simulated data against its limit 1/6
"""
import logging
import sys

from lib import metrics
from lib.pruittlab import PruittConfig, replicate
from lib.report import dumps_json, write_json

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    """Register the pruitt subcommand"""
    parser = subparsers.add_parser('pruitt', help='Dirichlet-process inconsistency demonstration')
    parser.add_argument('--n', type=int, help='Sample size')
    parser.add_argument('--M', dest='m_conc', type=float, help='Dirichlet concentration')
    parser.add_argument('--seed', type=int, help='Seed of the random stream (required)')
    parser.add_argument('--replications', type=int, default=1, help='Reports for seed, seed+1, ...')
    parser.add_argument('--compare-beta', dest='compare_beta', action='store_true',
                        help='Add the Beta-process noninformative estimate of P(B)')
    parser.add_argument('--output', help='Path of the JSON report (stdout when omitted)')
    parser.set_defaults(handler=handle_pruitt)


def handle_pruitt(cfg):
    """Simulate the censoring pattern and report the Dirichlet-process estimates"""
    with metrics.track_estimator('dirichlet-process'):
        reports = replicate(PruittConfig(cfg.n, cfg.m_conc, cfg.seed), cfg.replications, cfg.compare_beta)

    doc = reports[0] if len(reports) == 1 else {'reports': reports}
    if cfg.output:
        write_json(cfg.output, doc)
    else:
        sys.stdout.write(dumps_json(doc))
