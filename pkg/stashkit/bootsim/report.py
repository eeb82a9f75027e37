"""BootReport text form: the manifest's ``key = value`` layout plus ``event.N`` lines."""
from typing import List, Tuple

from stashkit.errors import ManifestFormatError
from stashkit.schemas import BootEvent, BootReport, DeviceFlags
from stashkit.utils.io import dump_kv, parse_kv

_FLAG_KEYS = ("adb_enabled", "adb_root", "gui_shows_adb")


def _bool(value: bool) -> str:
    return "true" if value else "false"


def dump_boot_report(report: BootReport) -> str:
    pairs: List[Tuple[str, str]] = [("succeeded", _bool(report.succeeded))]
    for key in _FLAG_KEYS:
        pairs.append((key, _bool(getattr(report.final_flags, key))))
    pairs.append(("events", str(len(report.events))))
    for i, event in enumerate(report.events):
        pairs.append((f"event.{i}", f"{event.step} {event.unix_millis} {event.outcome}"))
    return dump_kv(pairs)


def load_boot_report(text: str) -> BootReport:
    """Parse the text form back into a BootReport.

    Raises:
        ManifestFormatError: Missing keys or malformed event lines
    """
    try:
        raw = parse_kv(text)
        flags = DeviceFlags(**{key: raw[key] == "true" for key in _FLAG_KEYS})
        count = int(raw["events"])
        events = []
        for i in range(count):
            step, millis, outcome = raw[f"event.{i}"].split(" ", 2)
            events.append(BootEvent(step=step, unix_millis=int(millis), outcome=outcome))
        return BootReport(events=tuple(events), final_flags=flags,
                          succeeded=raw["succeeded"] == "true")
    except (KeyError, ValueError) as e:
        raise ManifestFormatError(f"malformed boot report: {e}") from e
