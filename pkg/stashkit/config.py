"""Settings from the environment and YAML-backed defaults."""
import os
from pathlib import Path
from typing import Dict, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError

from stashkit.errors import ConfigError


class Settings:
    """Process settings read from the environment."""

    def __init__(self) -> None:
        self.LOG_LEVEL = os.getenv("STASHKIT_LOG", "info").lower()
        self.CONFIG_PATH = os.getenv("STASHKIT_CONFIG", "configs/stashkit.yaml")


settings = Settings()


class ArchiveConfig(BaseModel):
    gzip_level: int = Field(6, ge=0, le=9)


class StashConfig(BaseModel):
    nonce_len: int = Field(4096, ge=0)
    safety_margin: int = Field(1 << 20, ge=0)
    signatures: Dict[str, str] = {
        "gzip": "1f8b",
        "png": "89504e47",
        "elf": "7f454c46",
        "jpeg": "ffd8ff",
    }

    def signature_list(self) -> list[tuple[str, bytes]]:
        """Signatures as (name, pattern) pairs in declaration order."""
        return [(name, bytes.fromhex(pattern)) for name, pattern in self.signatures.items()]


class DeviceFlagsConfig(BaseModel):
    adb_enabled: bool = True
    adb_root: bool = True
    gui_shows_adb: bool = True


class BootConfig(BaseModel):
    entry_point: str = "init"
    ui_gate_delay_ms: int = Field(0, ge=0)
    boot_log: str = "boot.log"
    device_flags: DeviceFlagsConfig = DeviceFlagsConfig()


class GestureSettings(BaseModel):
    axis_code: int = 0x35
    fallback_axis_code: int = 0x00
    threshold: int = Field(120, gt=0)
    window_ms: int = Field(400, gt=0)
    bindings: Dict[str, str] = {"right": "back", "left": "front"}


class TetherConfig(BaseModel):
    iface: str = "rndis0"
    cidr: str = "192.168.42.129/24"
    endpoint: str = "127.0.0.1:2222"
    max_frame: int = Field(64 << 20, gt=0)
    timeout_ms: int = Field(5000, gt=0)


class StashkitConfig(BaseModel):
    """Every tunable default, grouped by module."""
    archive: ArchiveConfig = ArchiveConfig()
    stash: StashConfig = StashConfig()
    bootsim: BootConfig = BootConfig()
    gesture: GestureSettings = GestureSettings()
    tether: TetherConfig = TetherConfig()


def load_config(path: Optional[str] = None) -> StashkitConfig:
    """Load configuration from YAML.

    Args:
        path: YAML file; defaults to ``STASHKIT_CONFIG``

    Returns:
        Validated configuration (built-in defaults when the file is absent)

    Raises:
        ConfigError: The file is not YAML or does not match the schema
    """
    cfg_path = Path(path or Settings().CONFIG_PATH)
    if not cfg_path.exists():
        return StashkitConfig()
    try:
        with open(cfg_path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{cfg_path}: not valid YAML: {e}", path=str(cfg_path)) from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{cfg_path}: top level must be a mapping", path=str(cfg_path))
    try:
        return StashkitConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"{cfg_path}: {e}", path=str(cfg_path)) from e
