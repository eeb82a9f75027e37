"""Chroot simulated as root-directory rebinding of path resolution."""
from pathlib import Path, PurePosixPath

from stashkit.errors import ChrootEscape


class ChrootView:
    """Resolves in-chroot absolute paths against a staging tree."""

    def __init__(self, root: str):
        self.root = Path(root).resolve()

    def resolve(self, path: str) -> Path:
        """Map ``path`` (as seen inside the chroot) to a host path.

        Raises:
            ChrootEscape: The path (after symlinks) leaves the root
        """
        inner = PurePosixPath("/") / path
        target = (self.root / inner.relative_to("/")).resolve()
        if target != self.root and self.root not in target.parents:
            raise ChrootEscape(f"{path!r} escapes chroot {self.root}", path=path)
        return target

    def exists(self, path: str) -> bool:
        return self.resolve(path).exists()

    def __repr__(self) -> str:
        return f"ChrootView({str(self.root)!r})"
