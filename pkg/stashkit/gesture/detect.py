"""Single-axis swipe detection over decoded input events.

A run starts at a touch sample (the anchor) and extends over every later sample
no more than ``window_ms`` after it. A run whose samples move at least
``threshold`` units away from the anchor value yields one swipe, measured to the
last such sample; detection then resumes at the first EV_SYN frame after the
run. Runs that stay below the threshold only advance the anchor by one sample.
"""
from collections import deque
from typing import Deque, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from loguru import logger

from stashkit.errors import UnorderedEvents
from stashkit.observability.metrics import incr
from stashkit.schemas import EV_ABS, EV_SYN, Gesture, GestureConfig, InputEvent


class _Sample(NamedTuple):
    t_ms: int
    value: int
    frame: int


class SwipeDetector:
    """Incremental detector; ``feed`` events in time order, then ``finish``.

    Unless ``axis`` is given, the axis is locked at the first EV_SYN frame that
    carries a touch coordinate: the configured axis if that frame has it, the
    fallback axis otherwise.
    """

    def __init__(self, config: GestureConfig, axis: Optional[int] = None):
        self.config = config
        self.axis = axis
        self._candidates = {config.axis_code}
        if config.fallback_axis_code is not None:
            self._candidates.add(config.fallback_axis_code)
        self._frame_events: List[InputEvent] = []
        self._samples: Deque[_Sample] = deque()
        self._frame = 0
        self._skip_through = -1
        self._last: Optional[Tuple[int, int]] = None

    def feed(self, event: InputEvent) -> List[Gesture]:
        """Consume one event.

        Returns:
            Swipes whose runs became complete

        Raises:
            UnorderedEvents: Timestamp earlier than the previous event's
        """
        stamp = (event.tv_sec, event.tv_usec)
        if self._last is not None and stamp < self._last:
            raise UnorderedEvents(
                f"event at {stamp[0]}.{stamp[1]:06d} precedes {self._last[0]}.{self._last[1]:06d}"
            )
        self._last = stamp

        if event.etype == EV_SYN:
            self._close_frame()
            self._frame += 1
            return self._drain(final=False)
        if event.etype == EV_ABS and event.code in self._candidates:
            self._frame_events.append(event)
        return []

    def finish(self) -> List[Gesture]:
        """Flush the trailing frame and evaluate the remaining runs."""
        self._close_frame()
        return self._drain(final=True)

    def _close_frame(self) -> None:
        if not self._frame_events:
            return
        if self.axis is None:
            codes = {e.code for e in self._frame_events}
            self.axis = self.config.axis_code if self.config.axis_code in codes \
                else self.config.fallback_axis_code
            logger.debug("gesture axis locked to {:#04x}", self.axis)
        if self._frame > self._skip_through:
            for e in self._frame_events:
                if e.code == self.axis:
                    self._samples.append(_Sample(e.millis, e.value, self._frame))
        self._frame_events = []

    def _drain(self, final: bool) -> List[Gesture]:
        window, threshold = self.config.window_ms, self.config.threshold
        found: List[Gesture] = []
        while self._samples:
            anchor = self._samples[0]
            # A run is only complete once a later sample falls outside the window
            if not final and self._samples[-1].t_ms - anchor.t_ms <= window:
                break
            run = [s for s in self._samples if s.t_ms - anchor.t_ms <= window]
            hit = None
            for s in run[1:]:
                if abs(s.value - anchor.value) >= threshold:
                    hit = s
            if hit is None:
                self._samples.popleft()
                continue

            gesture = Gesture(start_ms=anchor.t_ms, end_ms=hit.t_ms,
                              displacement=hit.value - anchor.value)
            found.append(gesture)
            incr("gestures")
            logger.info("swipe {} ({:+d} units, {} ms)", gesture.direction,
                        gesture.displacement, gesture.end_ms - gesture.start_ms)

            last_frame = run[-1].frame
            self._skip_through = max(self._skip_through, last_frame)
            while self._samples and self._samples[0].frame <= last_frame:
                self._samples.popleft()
        return found


def select_axis(events: Sequence[InputEvent], config: GestureConfig) -> int:
    """The configured axis if any event carries it, else the fallback axis."""
    if config.fallback_axis_code is None:
        return config.axis_code
    for e in events:
        if e.etype == EV_ABS and e.code == config.axis_code:
            return config.axis_code
    return config.fallback_axis_code


def detect(events: Iterable[InputEvent], config: Optional[GestureConfig] = None) -> List[Gesture]:
    """Detect swipes in a time-ordered event list.

    Args:
        events: Decoded events (non-axis and unknown types are ignored)
        config: Axis, threshold and window (defaults when None)

    Returns:
        Swipes in time order

    Raises:
        UnorderedEvents
    """
    config = config or GestureConfig()
    events = list(events)
    detector = SwipeDetector(config, axis=select_axis(events, config))
    gestures: List[Gesture] = []
    for event in events:
        gestures.extend(detector.feed(event))
    gestures.extend(detector.finish())
    return gestures
