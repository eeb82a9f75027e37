"""Simple metrics collection for latency and operation counters."""
import asyncio
import functools
import time
from typing import Any, Callable, Dict


def _fresh() -> Dict[str, Any]:
    return {
        "latency_ms": {},
        "embeds": 0,
        "scrambles": 0,
        "boots": 0,
        "gestures": 0,
        "requests_served": 0,
    }


# Global metrics storage
METRICS: Dict[str, Any] = _fresh()


def incr(name: str, amount: int = 1) -> None:
    """Bump a counter."""
    METRICS[name] = METRICS.get(name, 0) + amount


def timed(name: str) -> Callable:
    """Decorator to time function execution.
    
    Args:
        name: Metric name
        
    Returns:
        Decorated function
    """
    def decorator(fn: Callable) -> Callable:
        @functools.wraps(fn)
        async def async_wrapper(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                return await fn(*args, **kwargs)
            finally:
                METRICS["latency_ms"][name] = round(1000 * (time.perf_counter() - t0), 2)
        
        @functools.wraps(fn)
        def sync_wrapper(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                return fn(*args, **kwargs)
            finally:
                METRICS["latency_ms"][name] = round(1000 * (time.perf_counter() - t0), 2)
        
        if asyncio.iscoroutinefunction(fn):
            return async_wrapper
        return sync_wrapper
    
    return decorator


def reset_metrics() -> None:
    """Reset all metrics in place."""
    METRICS.clear()
    METRICS.update(_fresh())

