"""
Study Handler
Runs a convergence study from a scenario document
"""
import logging

from lib.config import deep_merge, load_document
from lib.report import write_csv, write_json
from lib.simharness import CSV_COLUMNS, run_study, scenario_from_dict

logger = logging.getLogger(__name__)


def add_parser(subparsers):
    """Register the study subcommand"""
    parser = subparsers.add_parser('study', help='Sup-norm error of the estimators against a known truth')
    parser.add_argument('--config', help='Scenario document (JSON or YAML)')
    parser.add_argument('--output', help='Path of the per-run CSV')
    parser.add_argument('--summary', help='Optional path of the JSON report with per-n quartiles')
    parser.add_argument('--seed', type=int, help='Overrides the scenario seed')
    parser.add_argument('--workers', type=int, help='Overrides the scenario worker count')
    parser.set_defaults(handler=handle_study)


def handle_study(cfg):
    """Run the scenario and write the per-run CSV plus the optional summary"""
    doc = load_document(cfg.config)
    if cfg.workers:
        doc = deep_merge(doc, {'workers': cfg.workers})

    scenario = scenario_from_dict(doc, seed=cfg.seed)
    logger.info(
        f"Study over n={list(scenario.sample_sizes)} with {scenario.replications} replications, "
        f"estimators {', '.join(scenario.estimators)}"
    )
    report = run_study(scenario)

    write_csv(cfg.output, CSV_COLUMNS, report.csv_rows())
    if cfg.summary:
        write_json(cfg.summary, report.to_dict())
