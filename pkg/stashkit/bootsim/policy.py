"""Two-action SELinux policy table."""
import os
from typing import Callable, Optional

from loguru import logger

from stashkit.schemas import Decision, SePolicyMode
from stashkit.utils.timebase import Clock, unix_millis

DISALLOWED_BY_DEFAULT = frozenset({"chroot_activate", "mount_tmpfs"})

AvcSink = Callable[[str], None]


def policy_check(mode: SePolicyMode, action: str, avc_sink: Optional[AvcSink] = None) -> Decision:
    """Decide an action under the given SELinux mode.

    Enforcing denies disallowed actions; Permissive allows them but records the
    would-be denial. Actions outside the table are always allowed.

    Args:
        mode: Enforcing or Permissive
        action: Action name
        avc_sink: Receives the action name of each would-be denial

    Returns:
        Allowed, Denied or AllowedLogged
    """
    if not action:
        raise ValueError("action must be non-empty")
    if action not in DISALLOWED_BY_DEFAULT:
        return Decision.ALLOWED
    if mode is SePolicyMode.ENFORCING:
        logger.info("avc: denied {}", action)
        return Decision.DENIED
    logger.warning("avc: would deny {} (permissive)", action)
    if avc_sink is not None:
        avc_sink(action)
    return Decision.ALLOWED_LOGGED


class AvcLog:
    """Appends ``<unix_millis> AVC would-deny <action>`` lines to a boot log file."""

    def __init__(self, path: str, clock: Optional[Clock] = None):
        self.path = path
        self.clock = clock

    def __call__(self, action: str) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(self.path)), exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(f"{unix_millis(self.clock)} AVC would-deny {action}\n")


def parse_mode(value: str) -> SePolicyMode:
    """Map ``enforcing`` / ``permissive`` (any case) to a mode."""
    for mode in SePolicyMode:
        if mode.value.lower() == value.lower():
            return mode
    raise ValueError(f"unknown SELinux mode {value!r}")
