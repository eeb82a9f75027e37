"""Boot step types and the userinit execution order."""
from enum import Enum
from typing import Dict, List

from stashkit.schemas import BootReport


class BootStep(Enum):
    """Steps of the simulated userinit sequence."""
    POLICY_CHECKED = "policy_checked"
    TMPFS_CREATED = "tmpfs_created"
    STASH_EXTRACTED = "stash_extracted"
    ARCHIVE_UNPACKED = "archive_unpacked"
    CHROOT_ACTIVATED = "chroot_activated"
    NONCE_SCRAMBLED = "nonce_scrambled"
    ADB_DISABLED = "adb_disabled"
    UI_GATE = "ui_gate"


class BootSequence:
    """Ordered boot steps with their prerequisites."""

    DEPENDENCIES: Dict[BootStep, List[BootStep]] = {
        BootStep.POLICY_CHECKED: [],
        BootStep.TMPFS_CREATED: [BootStep.POLICY_CHECKED],
        BootStep.STASH_EXTRACTED: [BootStep.POLICY_CHECKED],
        BootStep.ARCHIVE_UNPACKED: [BootStep.TMPFS_CREATED, BootStep.STASH_EXTRACTED],
        BootStep.CHROOT_ACTIVATED: [BootStep.ARCHIVE_UNPACKED],
        BootStep.NONCE_SCRAMBLED: [BootStep.STASH_EXTRACTED],
        BootStep.ADB_DISABLED: [BootStep.CHROOT_ACTIVATED],
        # Android's UI comes up only after the sub-system is live
        BootStep.UI_GATE: [BootStep.CHROOT_ACTIVATED, BootStep.ADB_DISABLED],
    }

    @classmethod
    def get_execution_order(cls) -> List[BootStep]:
        """Get the linear execution order.
        
        Returns:
            Steps in the order userinit runs them
        """
        return [
            BootStep.POLICY_CHECKED,
            BootStep.TMPFS_CREATED,
            BootStep.STASH_EXTRACTED,
            BootStep.ARCHIVE_UNPACKED,
            BootStep.CHROOT_ACTIVATED,
            BootStep.NONCE_SCRAMBLED,
            BootStep.ADB_DISABLED,
            BootStep.UI_GATE,
        ]

    @classmethod
    def respects_dependencies(cls, steps: List[str]) -> bool:
        """Check every recorded step appears after its prerequisites.
        
        Args:
            steps: Step names in report order
            
        Returns:
            True if the order is consistent with DEPENDENCIES
        """
        position = {name: i for i, name in enumerate(steps)}
        for step, prereqs in cls.DEPENDENCIES.items():
            if step.value not in position:
                continue
            for pre in prereqs:
                if pre.value not in position or position[pre.value] > position[step.value]:
                    return False
        return True


def report_violations(report: BootReport) -> List[str]:
    """List broken BootReport invariants (empty when the report is consistent)."""
    problems: List[str] = []
    steps = report.steps
    if report.succeeded:
        chroot, gate = BootStep.CHROOT_ACTIVATED.value, BootStep.UI_GATE.value
        if chroot not in steps or gate not in steps:
            problems.append("successful boot lacks chroot_activated or ui_gate")
        elif steps.index(chroot) >= steps.index(gate):
            problems.append("chroot_activated does not precede ui_gate")
        if report.final_flags.adb_enabled or report.final_flags.adb_root:
            problems.append("ADB left enabled after a successful boot")
    if not BootSequence.respects_dependencies(steps):
        problems.append("steps out of dependency order")
    return problems
