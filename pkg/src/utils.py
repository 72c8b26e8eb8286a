import logging
from pathlib import Path

from src.config import settings
from src.errors import LexicalError, SourceNotFound, SourceTooLarge

MAX_SOURCE_SIZE_BYTES = settings.MAX_SOURCE_SIZE_KB * 1024

logger = logging.getLogger(__name__)


def check_source_size(size: int) -> bool:
    """Checks if a source is within limits."""
    if size > MAX_SOURCE_SIZE_BYTES:
        logger.warning(f"Source too large: {size / 1024:.1f} KB")
        return False
    return True


def looks_like_file(arg: str) -> bool:
    if arg.endswith(settings.SOURCE_EXTENSION):
        return True
    try:
        return Path(arg).is_file()
    except OSError:
        return False


def decode_source(path: Path, data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        prefix = data[:e.start]
        line = prefix.count(b"\n") + 1
        column = e.start - (prefix.rfind(b"\n") + 1) + 1
        raise LexicalError(f"{path} is not valid UTF-8 at byte {e.start}", line, column) from e


def read_source(arg: str) -> str:
    """The text of a `.lpl` file when `arg` names one, otherwise `arg` itself as inline source."""
    if not looks_like_file(arg):
        try:
            arg.encode("utf-8")
        except UnicodeEncodeError as e:
            prefix = arg[:e.start]
            line, column = prefix.count("\n") + 1, e.start - prefix.rfind("\n")
            raise LexicalError(f"source is not valid UTF-8 at character {e.start}", line, column) from e
        text = arg
    else:
        path = Path(arg)
        if not path.is_file():
            raise SourceNotFound(f"no such source file: {path}")
        if not check_source_size(path.stat().st_size):
            raise SourceTooLarge(f"{path} exceeds {settings.MAX_SOURCE_SIZE_KB} KB")
        logger.info(f"Reading source file {path}")
        text = decode_source(path, path.read_bytes())
    if not check_source_size(len(text.encode("utf-8"))):
        raise SourceTooLarge(f"source exceeds {settings.MAX_SOURCE_SIZE_KB} KB")
    return text
