"""
Table Handler
Evaluates the Dabrowska and noninformative surfaces at query points
"""
import logging
from pathlib import Path

from lib import metrics
from lib.betaproc2d import noninformative_estimate
from lib.dabrowska import dabrowska_estimate
from lib.report import write_csv
from lib.survdata import compute_counts, load_dataset, parse_queries

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ('s', 't', 'dabrowska', 'noninformative')


def add_parser(subparsers):
    """Register the table subcommand"""
    parser = subparsers.add_parser('table', help='Compare the two estimators at query points')
    parser.add_argument('--input', help='CSV dataset with header z1,d1,z2,d2')
    parser.add_argument('--queries', help='CSV of query points with header s,t')
    parser.add_argument('--output', help='Path of the CSV table')
    parser.set_defaults(handler=handle_table)


def comparison_rows(ds, queries):
    """Rows of s, t and both survival estimates at each query point"""
    with metrics.track_estimator('dabrowska'):
        surface = dabrowska_estimate(ds)
    with metrics.track_estimator('noninformative'):
        mass = noninformative_estimate(compute_counts(ds))
    return [[s, t, surface.at(s, t), mass.survival(s, t)] for s, t in queries]


def handle_table(cfg):
    """Evaluate both estimates at the query points and write the table"""
    ds = load_dataset(cfg.input)
    queries = parse_queries(Path(cfg.queries).read_text())
    logger.info(f"Evaluating {len(queries)} query points")
    write_csv(cfg.output, TABLE_COLUMNS, comparison_rows(ds, queries))
