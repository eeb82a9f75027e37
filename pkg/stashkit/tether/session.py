"""Tunnel lifecycle state machine."""
from typing import Dict, Iterable, Tuple

from loguru import logger

from stashkit.errors import InvalidTransition
from stashkit.schemas import TransitionRecord, TunnelEvent, TunnelSession, TunnelState

S, E = TunnelState, TunnelEvent

TRANSITIONS: Dict[Tuple[TunnelState, TunnelEvent], TunnelState] = {
    (S.DOWN, E.UP_CMD): S.IFACE_UP,
    (S.IFACE_UP, E.IFACE_OK): S.IFACE_UP,
    (S.IFACE_UP, E.TUNNEL_OK): S.TUNNEL_UP,
    (S.TUNNEL_UP, E.DATA): S.ACTIVE,
    (S.ACTIVE, E.DATA): S.ACTIVE,
    (S.TUNNEL_UP, E.DOWN_CMD): S.DOWN,
    (S.ACTIVE, E.DOWN_CMD): S.DOWN,
    (S.ERROR, E.DOWN_CMD): S.DOWN,
    **{(state, E.FAIL): S.ERROR for state in TunnelState},
}


def next_state(state: TunnelState, event: TunnelEvent) -> TunnelState:
    """Table lookup.

    Raises:
        InvalidTransition: The pair is not in the table
    """
    try:
        return TRANSITIONS[(state, event)]
    except KeyError:
        raise InvalidTransition(f"{event.value} is not valid in state {state.value}",
                                state=state.value, event=event.value) from None


def transition(session: TunnelSession, event: TunnelEvent) -> TunnelSession:
    """Apply ``event`` and return the updated session (input is never mutated).

    Raises:
        InvalidTransition
    """
    after = next_state(session.state, event)
    record = TransitionRecord(event=event, before=session.state, after=after)
    logger.info("tunnel {}: {} -> {}", event.value, session.state.value, after.value)
    return session.model_copy(update={"state": after, "log": session.log + (record,)})


def replay(log: Iterable[TransitionRecord]) -> TunnelState:
    """Recompute the state a transition log leads to from Down.

    Raises:
        InvalidTransition: A record disagrees with the table or with its predecessor
    """
    state = TunnelState.DOWN
    for i, record in enumerate(log):
        if record.before is not state:
            raise InvalidTransition(
                f"log entry {i} starts in {record.before.value}, expected {state.value}")
        state = next_state(state, record.event)
        if record.after is not state:
            raise InvalidTransition(
                f"log entry {i} ends in {record.after.value}, table gives {state.value}")
    return state
