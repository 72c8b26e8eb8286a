import logging
import sys
import traceback
from logging.handlers import RotatingFileHandler
from typing import List, Optional

from src.cli import build_parser
from src.config import settings
from src.errors import CalculusError

EXIT_INTERNAL = 5

# Configure logging
handlers = [logging.StreamHandler(sys.stderr)]
if settings.LOG_FILE:
    handlers.append(RotatingFileHandler(settings.LOG_FILE, maxBytes=5*1024*1024, backupCount=2, encoding='utf-8'))
logging.basicConfig(
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    level=settings.LOG_LEVEL,
    handlers=handlers,
    force=True
)
logger = logging.getLogger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    logger.info(f"Running command {args.command}")
    try:
        return args.handler(args)
    except CalculusError as e:
        print(str(e), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"Internal error while running {args.command}: {e}")
        logger.error(traceback.format_exc())
        print(f"InternalError: {e}", file=sys.stderr)
        return EXIT_INTERNAL
