"""Pydantic domain models shared across stashkit modules."""
import stat
from enum import Enum, IntEnum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

S_IFMT = 0o170000
S_IFREG = stat.S_IFREG
S_IFDIR = stat.S_IFDIR
U32_MAX = 0xFFFFFFFF


# Archive

class ArchiveEntry(BaseModel):
    """One newc archive member (regular file or directory)."""
    model_config = ConfigDict(frozen=True)

    name: str  # no leading "/"
    mode: int = Field(S_IFREG | 0o644, ge=0, le=U32_MAX)
    uid: int = Field(0, ge=0, le=U32_MAX)
    gid: int = Field(0, ge=0, le=U32_MAX)
    mtime: int = Field(0, ge=0, le=U32_MAX)
    body: bytes = b""

    @property
    def is_dir(self) -> bool:
        return (self.mode & S_IFMT) == S_IFDIR

    @property
    def size(self) -> int:
        return len(self.body)

    @classmethod
    def file(cls, name: str, body: bytes, perm: int = 0o644, mtime: int = 0) -> "ArchiveEntry":
        return cls(name=name, mode=S_IFREG | perm, mtime=mtime, body=body)

    @classmethod
    def directory(cls, name: str, perm: int = 0o755, mtime: int = 0) -> "ArchiveEntry":
        return cls(name=name, mode=S_IFDIR | perm, mtime=mtime)


class ListedEntry(BaseModel):
    """Archive metadata without the body."""
    model_config = ConfigDict(frozen=True)

    name: str
    size: int
    mode: int


# Stash

class StashManifest(BaseModel):
    """Off-device record of where and how a payload was hidden."""
    model_config = ConfigDict(frozen=True)

    image_size: int = Field(ge=0)
    payload_offset: int = Field(ge=0)
    payload_len: int = Field(ge=0)
    payload_crc32: int = Field(ge=0, le=0xFFFFFFFF)
    obfuscated: bool = False
    seed: Optional[int] = None  # present iff obfuscated
    nonce_offset: int = Field(ge=0)
    nonce_len: int = Field(4096, ge=0)
    created_unix: int = 0

    @model_validator(mode="after")
    def _check_seed(self) -> "StashManifest":
        if self.obfuscated and not self.seed:
            raise ValueError("obfuscated manifest requires a nonzero seed")
        if not self.obfuscated and self.seed is not None:
            raise ValueError("seed is only recorded for obfuscated payloads")
        return self

    @property
    def payload_end(self) -> int:
        return self.payload_offset + self.payload_len

    @property
    def nonce_end(self) -> int:
        return self.nonce_offset + self.nonce_len


class SignatureHit(BaseModel):
    """A carving signature found in an image."""
    model_config = ConfigDict(frozen=True)

    signature_name: str
    offset: int


# Boot simulation

class SePolicyMode(str, Enum):
    ENFORCING = "Enforcing"
    PERMISSIVE = "Permissive"


class Decision(str, Enum):
    ALLOWED = "Allowed"
    DENIED = "Denied"
    ALLOWED_LOGGED = "AllowedLogged"


class BootEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    step: str
    unix_millis: int
    outcome: str


class DeviceFlags(BaseModel):
    model_config = ConfigDict(frozen=True)

    adb_enabled: bool = True
    adb_root: bool = True
    gui_shows_adb: bool = True


class BootReport(BaseModel):
    """Ordered event log of one simulated boot."""
    model_config = ConfigDict(frozen=True)

    events: Tuple[BootEvent, ...] = ()
    final_flags: DeviceFlags = DeviceFlags()
    succeeded: bool = False

    @property
    def steps(self) -> list[str]:
        return [e.step for e in self.events]


# Gestures

EV_SYN = 0x00
EV_KEY = 0x01
EV_ABS = 0x03
ABS_X = 0x00
ABS_MT_POSITION_X = 0x35


class InputEvent(BaseModel):
    """Packed 32-bit evdev record: timeval, type, code, value."""
    model_config = ConfigDict(frozen=True)

    tv_sec: int = Field(0, ge=0, le=0xFFFFFFFF)
    tv_usec: int = Field(0, ge=0, lt=1_000_000)
    etype: int = Field(0, ge=0, le=0xFFFF)
    code: int = Field(0, ge=0, le=0xFFFF)
    value: int = Field(0, ge=-(1 << 31), lt=1 << 31)

    @property
    def millis(self) -> int:
        return self.tv_sec * 1000 + self.tv_usec // 1000


class GestureConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    axis_code: int = ABS_MT_POSITION_X
    fallback_axis_code: Optional[int] = ABS_X
    threshold: int = Field(120, gt=0)
    window_ms: int = Field(400, gt=0)


class Gesture(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: str = "swipe"
    start_ms: int
    end_ms: int
    displacement: int

    @property
    def direction(self) -> str:
        return "right" if self.displacement > 0 else "left"


class Camera(IntEnum):
    BACK = 0
    FRONT = 1


# Tether

class TunnelState(str, Enum):
    DOWN = "Down"
    IFACE_UP = "IfaceUp"
    TUNNEL_UP = "TunnelUp"
    ACTIVE = "Active"
    ERROR = "Error"


class TunnelEvent(str, Enum):
    UP_CMD = "up_cmd"
    IFACE_OK = "iface_ok"
    TUNNEL_OK = "tunnel_ok"
    DATA = "data"
    DOWN_CMD = "down_cmd"
    FAIL = "fail"


class TransitionRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    event: TunnelEvent
    before: TunnelState
    after: TunnelState


class TunnelSession(BaseModel):
    model_config = ConfigDict(frozen=True)

    state: TunnelState = TunnelState.DOWN
    iface_name: str = "rndis0"
    remote_endpoint: str = "127.0.0.1:2222"
    log: Tuple[TransitionRecord, ...] = ()


class ActionKind(str, Enum):
    SET_USB_FUNCTION = "set_usb_function"
    IFACE_UP = "iface_up"
    ASSIGN_ADDR = "assign_addr"
    START_TUNNEL = "start_tunnel"
    STOP_TUNNEL = "stop_tunnel"
    IFACE_DOWN = "iface_down"


class Action(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ActionKind
    args: Tuple[str, ...] = ()

    def render(self) -> str:
        """Executor log line: ``ACTION <name> <args...>``."""
        return " ".join(["ACTION", self.kind.value, *self.args])


class ActionPlan(BaseModel):
    model_config = ConfigDict(frozen=True)

    actions: Tuple[Action, ...] = Field(min_length=1)


class TriggerOp(IntEnum):
    PHOTO = 1
    PING = 2


class TriggerRequest(BaseModel):
    """Request body: version, op, camera, reserved (one byte each)."""
    model_config = ConfigDict(frozen=True)

    version: int = 1
    op: int = TriggerOp.PING
    camera: int = Camera.BACK
    reserved: int = 0


class TriggerResponse(BaseModel):
    """Response body: version, status, u32 payload length, payload."""
    model_config = ConfigDict(frozen=True)

    version: int = 1
    status: int = 0
    payload: bytes = b""
