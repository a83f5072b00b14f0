"""
Audit Handler
Audits the rectangle masses of the Dabrowska surface next to the noninformative estimate
"""
import logging

from lib import metrics
from lib.betaproc2d import noninformative_estimate
from lib.dabrowska import SurvivalSurface, dabrowska_estimate, mass_audit
from lib.report import write_json
from lib.survdata import compute_counts, load_dataset

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    """Register the audit subcommand"""
    parser = subparsers.add_parser('audit', help='Find negative-mass cells of the Dabrowska estimate')
    parser.add_argument('--input', help='CSV dataset with header z1,d1,z2,d2')
    parser.add_argument('--output', help='Path of the JSON audit')
    parser.set_defaults(handler=handle_audit)


def handle_audit(cfg):
    """Audit both estimates of the dataset and write the cell report"""
    ds = load_dataset(cfg.input)

    with metrics.track_estimator('dabrowska'):
        surface = dabrowska_estimate(ds)
    with metrics.track_estimator('noninformative'):
        mass = noninformative_estimate(compute_counts(ds))

    dabrowska_audit = mass_audit(surface)
    noninformative_audit = mass_audit(SurvivalSurface.from_mass(mass))
    metrics.negative_cells_total.inc(len(dabrowska_audit.negatives))

    logger.info(
        f"Dabrowska surface has {len(dabrowska_audit.negatives)} negative cells, "
        f"noninformative estimate has {len(noninformative_audit.negatives)}"
    )
    write_json(cfg.output, {
        'dabrowska': dabrowska_audit.to_dict(),
        'noninformative': noninformative_audit.to_dict(),
        'surface': surface.to_dict(),
        'dataset': ds.to_dict(),
    })
