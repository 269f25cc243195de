from __future__ import annotations

import json
import logging
import sys
from typing import Sequence

from .commands import registry
from .errors import EXIT_INTERNAL, EXIT_OK, BilliardsError
from .logging_utils import setup_logging

logger = logging.getLogger(__name__)


def _report_error(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def run_command(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the chosen subcommand and return its exit status."""

    setup_logging()
    parser = registry.build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
        logger.debug("Running %s", args.command)
        return args.handler(args)
    except BilliardsError as exc:
        logger.error("%s: %s", type(exc).__name__, exc.message)
        _report_error(exc.to_dict())
        return exc.exit_code
    except SystemExit as exc:
        # --help and --version exit through argparse
        return EXIT_OK if exc.code in (None, 0) else int(exc.code)
    except Exception as exc:
        logger.exception("Unhandled error")
        _report_error({"error": "InternalError", "message": str(exc), "details": {}})
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
