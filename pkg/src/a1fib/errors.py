"""Error types shared by every module.

Each failure carries a short machine-readable ``code`` so the command line
front end can map it to an exit status without string matching.
"""

from __future__ import annotations

from typing import Any


class ToolkitError(Exception):
    def __init__(self, code: str, detail: Any = None):
        super().__init__(f"{code}: {detail}" if detail is not None else code)
        self.code = code
        self.detail = detail


class ExtensionRequired(ToolkitError):
    """A k-th root is missing from the active field."""

    def __init__(self, k: int, constant: Any):
        super().__init__("extension_required", {"k": k, "radicand": str(constant)})
        self.k = k
        self.constant = constant
