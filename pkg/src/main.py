"""Main entry point for the centered semi-direct product toolkit"""

import argparse
import asyncio
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv
from src.commands import EXIT_USAGE, Orchestrator
from src.models.schemas import InstanceKind

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging() -> None:
    """Log to stderr at CSDP_LOG_LEVEL (default INFO); stdout is reserved for results"""
    load_dotenv()
    level_name = os.getenv("CSDP_LOG_LEVEL", "INFO").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csdp",
        description="Centered semi-direct products, Euler-Poincaré flows and 2-jets",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    verify = subparsers.add_parser("verify", help="Run the structure verification suite for an instance")
    verify.add_argument("--instance", choices=[kind.value for kind in InstanceKind], default=InstanceKind.GLMAT.value)
    verify.add_argument("--n", type=int, default=2)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--samples", type=int, default=20)

    simulate = subparsers.add_parser("simulate", help="Integrate an Euler-Poincaré flow from a JSON config")
    simulate.add_argument("--config", required=True, dest="config_path")

    jet = subparsers.add_parser("jet-compose", help="Compose two 2-jets given as JSON files")
    jet.add_argument("--left", required=True, dest="left_path")
    jet.add_argument("--right", required=True, dest="right_path")
    jet.add_argument("--oracle", action="store_true", help="Also compose as quadratic maps and report the deviation")

    return parser


async def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0

    orchestrator = Orchestrator()
    response = await orchestrator.process(vars(args))
    logger.debug(f"Audit trail: {orchestrator.get_audit_trail()}")

    if "output" in response:
        print(response["output"])
    if not response.get("success", False) and "error" in response:
        print(f"error: {response.get('message', 'failed')}: {response['error']}", file=sys.stderr)
    return response.get("exit_code", EXIT_USAGE)


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    try:
        return asyncio.run(run(argv))
    except Exception as e:
        logger.error(f"Unhandled error: {str(e)}", exc_info=True)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
