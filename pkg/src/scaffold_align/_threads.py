"""Worker-thread cap shared by every parallel code path.

``SCAFFOLD_ALIGN_THREADS`` caps the workers any component may spawn;
unset or invalid values fall back to the caller's default.
"""

from __future__ import annotations

import os

ENV_VAR = "SCAFFOLD_ALIGN_THREADS"


def resolve_threads(default: int = 1) -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return max(1, default)
    try:
        cap = int(raw)
    except ValueError:
        return max(1, default)
    if cap < 1:
        return 1
    return min(max(1, default), cap)
