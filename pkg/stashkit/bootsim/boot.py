"""Simulated userinit boot: policy gate, staging, extraction, chroot, lockdown."""
import os
import shutil
import time
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from stashkit.archive.newc import unpack
from stashkit.archive.tree import extract_tree
from stashkit.bootsim.boot_types import BootSequence, BootStep
from stashkit.bootsim.chroot import ChrootView
from stashkit.bootsim.policy import AvcLog, policy_check
from stashkit.errors import StagingNotEmpty, StashkitError
from stashkit.observability.metrics import incr, timed
from stashkit.schemas import BootEvent, BootReport, Decision, DeviceFlags, SePolicyMode, StashManifest
from stashkit.stash.carve import DEFAULT_SIGNATURES, Signature
from stashkit.stash.embed import extract, scramble
from stashkit.utils.io import ImageStore
from stashkit.utils.timebase import Clock, unix_millis

GATED_ACTIONS = ("mount_tmpfs", "chroot_activate")


class BootSimulator:
    """Runs one boot over an image + manifest into a staging directory."""

    def __init__(
        self,
        image: ImageStore,
        manifest: StashManifest,
        mode: SePolicyMode,
        staging_dir: str,
        ui_gate_delay_ms: int = 0,
        *,
        entry_point: str = "init",
        device_flags: Optional[DeviceFlags] = None,
        boot_log_name: str = "boot.log",
        rng: Optional[np.random.Generator] = None,
        clock: Optional[Clock] = None,
        sleep: Callable[[float], None] = time.sleep,
        signatures: Sequence[Signature] = DEFAULT_SIGNATURES,
    ):
        self.image = image
        self.manifest = manifest
        self.mode = mode
        self.staging_dir = os.path.abspath(staging_dir)
        self.ui_gate_delay_ms = ui_gate_delay_ms
        self.entry_point = entry_point
        self.flags = device_flags or DeviceFlags()
        self.boot_log = os.path.join(os.path.dirname(self.staging_dir), boot_log_name)
        self.rng = rng if rng is not None else np.random.default_rng()
        self.clock = clock
        self.sleep = sleep
        self.signatures = signatures

        self.events: List[BootEvent] = []
        self.payload: bytes = b""
        self.chroot: Optional[ChrootView] = None
        self._created_staging = False
        self._staging_ready = False

        self._handlers: Dict[BootStep, Callable[[], str]] = {
            BootStep.POLICY_CHECKED: self._policy_checked,
            BootStep.TMPFS_CREATED: self._tmpfs_created,
            BootStep.STASH_EXTRACTED: self._stash_extracted,
            BootStep.ARCHIVE_UNPACKED: self._archive_unpacked,
            BootStep.CHROOT_ACTIVATED: self._chroot_activated,
            BootStep.NONCE_SCRAMBLED: self._nonce_scrambled,
            BootStep.ADB_DISABLED: self._adb_disabled,
            BootStep.UI_GATE: self._ui_gate,
        }

    def _record(self, step: BootStep, outcome: str) -> None:
        event = BootEvent(step=step.value, unix_millis=unix_millis(self.clock), outcome=outcome)
        self.events.append(event)
        logger.info("boot step {} -> {}", step.value, outcome)

    def _report(self, succeeded: bool) -> BootReport:
        return BootReport(events=tuple(self.events), final_flags=self.flags, succeeded=succeeded)

    # Step handlers return the outcome recorded for the step

    def _policy_checked(self) -> str:
        sink = AvcLog(self.boot_log, self.clock)
        decisions = [policy_check(self.mode, action, sink) for action in GATED_ACTIONS]
        if Decision.DENIED in decisions:
            return Decision.DENIED.value
        if Decision.ALLOWED_LOGGED in decisions:
            return Decision.ALLOWED_LOGGED.value
        return Decision.ALLOWED.value

    def _tmpfs_created(self) -> str:
        self._created_staging = not os.path.isdir(self.staging_dir)
        os.makedirs(self.staging_dir, exist_ok=True)
        self._staging_ready = True
        return "ok"

    def _stash_extracted(self) -> str:
        self.payload = extract(self.image, self.manifest)
        return f"ok {len(self.payload)} bytes"

    def _archive_unpacked(self) -> str:
        entries = unpack(self.payload)
        extract_tree(entries, self.staging_dir)
        return f"ok {len(entries)} entries"

    def _chroot_activated(self) -> str:
        self.chroot = ChrootView(self.staging_dir)
        entry = "/" + self.entry_point.lstrip("/")
        if self.entry_point and self.chroot.exists(entry):
            return f"activated {entry}"
        return "activated /"

    def _nonce_scrambled(self) -> str:
        scramble(self.image, self.manifest, self.rng, self.signatures)
        return f"ok {self.manifest.nonce_len} bytes"

    def _adb_disabled(self) -> str:
        self.flags = self.flags.model_copy(update={"adb_enabled": False, "adb_root": False})
        return "ok"

    def _ui_gate(self) -> str:
        if self.ui_gate_delay_ms > 0:
            self.sleep(self.ui_gate_delay_ms / 1000.0)
        return "ok"

    def _cleanup(self) -> None:
        # The staging tree models a memory-only filesystem: nothing survives a failed boot
        if not self._staging_ready or not os.path.isdir(self.staging_dir):
            return
        if self._created_staging:
            shutil.rmtree(self.staging_dir, ignore_errors=True)
            return
        # Caller-provided directory was empty on entry; empty it again
        for name in os.listdir(self.staging_dir):
            path = os.path.join(self.staging_dir, name)
            if os.path.isdir(path) and not os.path.islink(path):
                shutil.rmtree(path, ignore_errors=True)
            else:
                os.unlink(path)

    def run(self) -> BootReport:
        """Execute every step in order.

        Returns:
            BootReport; a Denied policy gate stops the run after the first event

        Raises:
            StagingNotEmpty: staging_dir exists and has content
            StashkitError: A later step failed (``error.report`` holds the partial report)
            OSError: Staging I/O failed; the staged tree is removed before it propagates
        """
        if os.path.isdir(self.staging_dir) and os.listdir(self.staging_dir):
            raise StagingNotEmpty(f"staging directory {self.staging_dir} is not empty")
        if os.path.exists(self.staging_dir) and not os.path.isdir(self.staging_dir):
            raise StagingNotEmpty(f"staging path {self.staging_dir} is not a directory")

        incr("boots")
        for step in BootSequence.get_execution_order():
            try:
                outcome = self._handlers[step]()
            except Exception as e:
                self._record(step, f"failed {type(e).__name__}: {e}")
                try:
                    self._cleanup()
                finally:
                    if isinstance(e, StashkitError):
                        e.report = self._report(succeeded=False)
                raise
            self._record(step, outcome)
            if step is BootStep.POLICY_CHECKED and outcome == Decision.DENIED.value:
                return self._report(succeeded=False)
        return self._report(succeeded=True)


@timed("boot")
def boot(image: ImageStore, manifest: StashManifest, mode: SePolicyMode, staging_dir: str,
         ui_gate_delay_ms: int = 0, **options) -> BootReport:
    """Simulate one boot; see :class:`BootSimulator` for the keyword options.

    Args:
        image: Mutable image store holding the stash
        manifest: Stash location
        mode: SELinux mode
        staging_dir: Empty or absent directory standing in for the tmpfs
        ui_gate_delay_ms: Delay before the Android UI gate event

    Returns:
        BootReport
    """
    return BootSimulator(image, manifest, mode, staging_dir, ui_gate_delay_ms, **options).run()
