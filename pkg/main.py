#!/usr/bin/env python3
"""
PAIRSURV - Bivariate survival estimation from censored pairs
Main Entry Point for the command line
"""
import argparse
import logging
import sys
from pathlib import Path

from lib import metrics
from lib.config import CommandConfig, get_settings
from lib.errors import PairSurvError, UsageError

settings = get_settings()

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings['log_level'], logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Import handlers after configuration
from handlers import audit, estimate, pruitt, study, table  # noqa: E402


def build_parser():
    parser = argparse.ArgumentParser(
        prog='pairsurv',
        description='Bivariate survival estimation: Beta-process, Dabrowska and Dirichlet-process estimates',
    )
    subparsers = parser.add_subparsers(dest='subcommand', required=True)
    for handler in (estimate, audit, pruitt, study, table):
        handler.add_parser(subparsers)
    return parser


def export_metrics():
    """Write the metrics text file when metrics are enabled"""
    if not settings['metrics_enabled']:
        return
    if not settings['metrics_textfile']:
        logger.warning("METRICS_ENABLED is set but METRICS_TEXTFILE is empty; metrics not written")
        return
    try:
        metrics.export(settings['metrics_textfile'])
    except OSError as e:
        logger.error(f"Failed to write metrics to {settings['metrics_textfile']}: {e}")


def describe_os_error(cfg: CommandConfig, e: OSError) -> str:
    """One-line message for a failed read of an input or a failed write of an output"""
    inputs = {Path(p) for p in (cfg.input, cfg.queries, cfg.prior, cfg.config) if p}
    if e.filename is not None and Path(e.filename) in inputs:
        if isinstance(e, FileNotFoundError):
            logger.error(f"Input not found: {e.filename}")
            return f"input not found: {e.filename}"
        logger.error(f"Cannot read {e.filename}: {e.strerror}")
        return f"cannot read {e.filename}: {e.strerror}"

    target = e.filename if e.filename is not None else cfg.output
    logger.error(f"Cannot write {target}: {e.strerror}")
    return f"cannot write {target}: {e.strerror}"


def run(argv=None) -> int:
    """Parse argv, dispatch to the subcommand handler and return the exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        cfg = CommandConfig.from_args(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2

    try:
        args.handler(cfg)
    except OSError as e:
        print(describe_os_error(cfg, e), file=sys.stderr)
        return 1
    except PairSurvError as e:
        logger.error(f"{cfg.subcommand} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    finally:
        export_metrics()

    return 0


if __name__ == '__main__':
    sys.exit(run())
