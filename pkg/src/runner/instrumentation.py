"""Stage timing for runner commands.

time_stage wraps a function whose first argument is a RunContext and records
duration_ms under ctx.timings[stage].
"""
from __future__ import annotations

import logging
import time
from functools import wraps
from typing import Any, Callable

logger = logging.getLogger("runner")


def time_stage(stage: str) -> Callable:
    def decorator(fn: Callable) -> Callable:
        @wraps(fn)
        def wrapper(ctx, *args: Any, **kwargs: Any):
            start = time.perf_counter()
            try:
                return fn(ctx, *args, **kwargs)
            finally:
                duration_ms = int((time.perf_counter() - start) * 1000)
                ctx.timings[stage] = duration_ms
                logger.info("stage=%s run=%s duration_ms=%d", stage, getattr(ctx, "name", "unknown"), duration_ms)

        return wrapper

    return decorator
