"""
Loss File Utilities
Reads empirical loss samples from CSV/text files, one loss per line
"""
import logging
import math
import re
from pathlib import Path
from typing import List

from utils.distributions import LossDistribution, from_samples
from utils.errors import InputValidationError

logger = logging.getLogger(__name__)

# ASCII decimal, optional sign and exponent; no locale separators, no inf/nan
_DECIMAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
# a header line never contains digits, so a mangled first loss is not skipped silently
_DIGIT = re.compile(r"\d")


def read_losses(path: str) -> List[float]:
    """
    Extract the loss values from a text file

    Args:
        path: file with one loss per line and an optional single header line

    Returns:
        Losses in file order
    """
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as e:
        raise InputValidationError(f"cannot read loss file {path}: {e}", key="input")

    losses: List[float] = []
    header_seen = False
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if _DECIMAL.fullmatch(line):
            value = float(line)
            if not math.isfinite(value):
                raise InputValidationError(f"{path}:{number}: loss {line!r} is not finite", key="input", line=number)
            losses.append(value)
        elif line.lower().lstrip("+-") in ("inf", "infinity", "nan"):
            raise InputValidationError(f"{path}:{number}: loss {line!r} is not finite", key="input", line=number)
        elif not losses and not header_seen and not _DIGIT.search(line):
            header_seen = True
            logger.info("%s:%d: skipping header %r", path, number, line)
        else:
            raise InputValidationError(f"{path}:{number}: expected a decimal loss, got {line!r}",
                                       key="input", line=number)

    if not losses:
        raise InputValidationError(f"{path}: no losses found", key="input")
    logger.info("Read %d losses from %s", len(losses), path)
    return losses


def load_losses(path: str) -> LossDistribution:
    """Empirical distribution of the losses in `path`"""
    return from_samples(read_losses(path))
