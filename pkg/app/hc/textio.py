"""Shared helpers for the plain-text file formats."""

import re
from pathlib import Path

from app.core.errors import FormatError

# str.isdigit() also accepts superscripts and other non-decimal digits
_INDEX = re.compile(r"[0-9]+")


def is_index(field: str) -> bool:
    return _INDEX.fullmatch(field) is not None


def read_text(path: Path | str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise FormatError(f"{path}: not valid UTF-8 ({e.reason} at byte {e.start})") from e
