"""Template rendering: turn a parameter set into a simulation input file.

Placeholder grammar: ``$name`` with name = [A-Za-z_][A-Za-z0-9_]*, and
``$$`` for a literal delimiter. Values render as the shortest decimal
string that parses back to the identical binary value, so encoded
inputs round-trip exactly.
"""

from __future__ import annotations

import re

from uqpilot.errors import EncodingError

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"


def _pattern(delimiter: str) -> re.Pattern:
    d = re.escape(delimiter)
    return re.compile(f"{d}(?:{d}|({_IDENT}))")


def placeholders(text: str, delimiter: str = "$") -> list[str]:
    """Distinct placeholder names in template order (escapes excluded)."""
    seen: list[str] = []
    for m in _pattern(delimiter).finditer(text):
        name = m.group(1)
        if name is not None and name not in seen:
            seen.append(name)
    return seen


def render_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render(text: str, params: dict, delimiter: str = "$") -> str:
    """Substitute every placeholder; unknown names raise EncodingError."""

    def replace(m: re.Match) -> str:
        name = m.group(1)
        if name is None:
            return delimiter
        if name not in params:
            raise EncodingError(f"placeholder {name!r} has no value to substitute")
        return render_value(params[name])

    return _pattern(delimiter).sub(replace, text)
