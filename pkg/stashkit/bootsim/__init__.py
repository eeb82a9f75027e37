"""Boot-time extract-and-chroot simulation."""
from stashkit.bootsim.boot import BootSimulator, boot
from stashkit.bootsim.boot_types import BootSequence, BootStep, report_violations
from stashkit.bootsim.chroot import ChrootView
from stashkit.bootsim.policy import DISALLOWED_BY_DEFAULT, AvcLog, parse_mode, policy_check
from stashkit.bootsim.report import dump_boot_report, load_boot_report

__all__ = [
    "AvcLog",
    "BootSequence",
    "BootSimulator",
    "BootStep",
    "ChrootView",
    "DISALLOWED_BY_DEFAULT",
    "boot",
    "dump_boot_report",
    "load_boot_report",
    "parse_mode",
    "policy_check",
    "report_violations",
]
