"""Clock helpers; every time-consuming operation takes an injectable clock."""
import time
from typing import Callable, Optional

Clock = Callable[[], float]


def system_clock() -> float:
    """Wall-clock unix seconds."""
    return time.time()


def fixed_clock(unix_seconds: float) -> Clock:
    """Clock frozen at ``unix_seconds`` (deterministic runs)."""
    return lambda: float(unix_seconds)


def stepping_clock(unix_seconds: float, step_ms: int = 1) -> Clock:
    """Clock starting at ``unix_seconds`` that advances ``step_ms`` per reading."""
    state = {"now": float(unix_seconds)}

    def _tick() -> float:
        now = state["now"]
        state["now"] += step_ms / 1000.0
        return now

    return _tick


def unix_seconds(clock: Optional[Clock] = None) -> int:
    return int((clock or system_clock)())


def unix_millis(clock: Optional[Clock] = None) -> int:
    return int(round((clock or system_clock)() * 1000))


def clock_from_flag(value: Optional[int]) -> Clock:
    """Map a ``--clock`` CLI value to a clock (system clock when absent)."""
    return system_clock if value is None else fixed_clock(value)
