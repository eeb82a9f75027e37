"""USB-tether bring-up and tear-down plans, and a recording executor.

Plans are plain values. Nothing touches a device until an executor runs them;
the bundled MockExecutor only models the state a real one would change.
"""
import ipaddress
from typing import Dict, List, Optional, Tuple

from loguru import logger

from stashkit.errors import BadCidr, BadEndpoint, NotUp
from stashkit.schemas import Action, ActionKind, ActionPlan, TunnelSession, TunnelState

TETHER_FUNCTION = "rndis"
CHARGE_ONLY = "charge_only"

DOWNABLE = frozenset({TunnelState.TUNNEL_UP, TunnelState.ACTIVE, TunnelState.ERROR})


def parse_endpoint(endpoint: str) -> Tuple[str, int]:
    """Split ``host:port`` (``[v6]:port`` accepted).

    Raises:
        BadEndpoint: Missing host, missing port or port outside 1-65535
    """
    host, sep, port = endpoint.rpartition(":")
    if not sep or not host or not port.isdigit():
        raise BadEndpoint(f"endpoint {endpoint!r} is not host:port", endpoint=endpoint)
    if host.startswith("[") and host.endswith("]"):
        host = host[1:-1]
    if not host or not 0 < int(port) < 65536:
        raise BadEndpoint(f"endpoint {endpoint!r} is not host:port", endpoint=endpoint)
    return host, int(port)


def _check_cidr(cidr: str) -> None:
    if "/" not in cidr:
        raise BadCidr(f"address {cidr!r} lacks a prefix length", cidr=cidr)
    try:
        ipaddress.ip_interface(cidr)
    except ValueError as e:
        raise BadCidr(f"invalid interface address {cidr!r}: {e}", cidr=cidr) from e


def plan_up(iface: str = "rndis0", cidr: str = "192.168.42.129/24",
            endpoint: str = "127.0.0.1:2222") -> ActionPlan:
    """Actions that expose the tether interface and open the tunnel.

    Args:
        iface: Host-visible interface name
        cidr: Address assigned to the interface
        endpoint: Tunnel peer as host:port

    Returns:
        set_usb_function rndis, iface_up, assign_addr, start_tunnel

    Raises:
        BadEndpoint, BadCidr
    """
    if not iface:
        raise ValueError("interface name must not be empty")
    parse_endpoint(endpoint)
    _check_cidr(cidr)
    return ActionPlan(actions=(
        Action(kind=ActionKind.SET_USB_FUNCTION, args=(TETHER_FUNCTION,)),
        Action(kind=ActionKind.IFACE_UP, args=(iface,)),
        Action(kind=ActionKind.ASSIGN_ADDR, args=(cidr,)),
        Action(kind=ActionKind.START_TUNNEL, args=(endpoint,)),
    ))


def plan_down(session: TunnelSession) -> ActionPlan:
    """Actions that close the tunnel and restore the charging disguise.

    Raises:
        NotUp: The session never reached TunnelUp
    """
    if session.state not in DOWNABLE:
        raise NotUp(f"no tunnel to take down (state {session.state.value})",
                    state=session.state.value)
    return ActionPlan(actions=(
        Action(kind=ActionKind.STOP_TUNNEL),
        Action(kind=ActionKind.IFACE_DOWN, args=(session.iface_name,)),
        Action(kind=ActionKind.SET_USB_FUNCTION, args=(CHARGE_ONLY,)),
    ))


class MockExecutor:
    """Applies plans to an in-memory model of the handset and records each action."""

    def __init__(self) -> None:
        self.log: List[str] = []
        self.usb_function = CHARGE_ONLY
        self.ifaces: Dict[str, Optional[str]] = {}  # up interface -> address
        self.tunnel: Optional[str] = None
        self._last_iface: Optional[str] = None

    def apply(self, action: Action) -> None:
        kind, args = action.kind, action.args
        if kind is ActionKind.SET_USB_FUNCTION:
            self.usb_function = args[0]
        elif kind is ActionKind.IFACE_UP:
            self.ifaces[args[0]] = None
            self._last_iface = args[0]
        elif kind is ActionKind.ASSIGN_ADDR:
            if self._last_iface is not None:
                self.ifaces[self._last_iface] = args[0]
        elif kind is ActionKind.START_TUNNEL:
            self.tunnel = args[0]
        elif kind is ActionKind.STOP_TUNNEL:
            self.tunnel = None
        elif kind is ActionKind.IFACE_DOWN:
            self.ifaces.pop(args[0], None)
        line = action.render()
        self.log.append(line)
        logger.debug(line)

    def execute(self, plan: ActionPlan) -> List[str]:
        """Apply every action in order.

        Returns:
            The log lines this plan produced
        """
        start = len(self.log)
        for action in plan.actions:
            self.apply(action)
        return self.log[start:]
