"""JSON output with fixed float formatting.

Model files and API payloads must be byte-stable across identical runs, and
floats must survive a write/read round trip bit-exactly. Floats are therefore
written with up to 17 significant digits ('%.17g'), which round-trips any
IEEE-754 double. The stdlib json module does not expose float formatting on
its fast path, hence this small emitter; reading stays on json.loads.
"""

from __future__ import annotations

import json
import math
from typing import Any


def _write(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite float {obj!r}")
        out.append(format(obj, ".17g"))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be str, got {type(key).__name__}")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _write(value, out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dumps(obj: Any) -> str:
    """Serialize to compact JSON, floats formatted with '%.17g'."""
    out: list[str] = []
    _write(obj, out)
    return "".join(out)


def dump_path(obj: Any, path: str) -> None:
    """Write ``dumps(obj)`` to ``path`` as UTF-8 with a trailing newline."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
        fh.write("\n")
