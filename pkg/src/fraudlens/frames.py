"""Frame ordering, the frame manifest, and saved visualizations.

A frame shows one client; frames play highest-ranked first unless the
auditor supplies an explicit override prefix. The manifest ties the frame
order to the exact configuration and window it was computed from, via
content digests over canonical JSON.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .events import Window, format_timestamp
from .ranking import ClientRanking, EmployeeRanking


def canonical_digest(obj) -> str:
    """sha256 over compact, key-sorted JSON; the one digest rule everywhere."""
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def rankings_digest(
    clients: Sequence[ClientRanking],
    employees: Sequence[EmployeeRanking] = (),
) -> str:
    return canonical_digest(
        {
            "clients": [[r.client_id, str(r.score)] for r in clients],
            "employees": [[r.employee_id, str(r.score)] for r in employees],
        }
    )


@dataclass(frozen=True)
class FrameEntry:
    client_id: str
    score: Fraction
    path: str | None = None
    layout_digest: str | None = None

    def to_dict(self) -> dict:
        return {
            "client_id": self.client_id,
            "score": float(self.score),
            "score_exact": str(self.score),
            "path": self.path,
            "layout_digest": self.layout_digest,
        }


@dataclass(frozen=True)
class FrameManifest:
    window: Window | None
    config_digest: str
    frames: tuple[FrameEntry, ...]

    @property
    def digest(self) -> str:
        return canonical_digest(
            {
                "window": self.window.isoformat() if self.window else None,
                "config_digest": self.config_digest,
                "frames": [[f.client_id, str(f.score), f.path] for f in self.frames],
            }
        )

    def to_dict(self) -> dict:
        return {
            "window": {
                "start": format_timestamp(self.window.start),
                "end": format_timestamp(self.window.end),
            }
            if self.window
            else None,
            "config_digest": self.config_digest,
            "digest": self.digest,
            "frames": [entry.to_dict() | {"index": i} for i, entry in enumerate(self.frames)],
        }

    def with_paths(self, paths: Mapping[str, str]) -> "FrameManifest":
        frames = tuple(
            replace(entry, path=paths.get(entry.client_id, entry.path)) for entry in self.frames
        )
        return FrameManifest(self.window, self.config_digest, frames)


def order_frames(
    rankings: Sequence[ClientRanking],
    override: Sequence[str] | None = None,
) -> list[ClientRanking]:
    """Ranking order, with the auditor's override clients moved to the front."""
    if not override:
        return list(rankings)
    seen: set[str] = set()
    for client_id in override:
        if client_id in seen:
            raise ValueError(f"override lists client {client_id!r} twice")
        seen.add(client_id)
    by_id = {r.client_id: r for r in rankings}
    unknown = [c for c in override if c not in by_id]
    if unknown:
        raise ValueError(f"override references unknown client {unknown[0]!r}")
    head = [by_id[client_id] for client_id in override]
    tail = [r for r in rankings if r.client_id not in seen]
    return head + tail


def build_manifest(
    rankings: Sequence[ClientRanking],
    window: Window | None,
    config_digest: str,
    override: Sequence[str] | None = None,
) -> FrameManifest:
    ordered = order_frames(rankings, override)
    frames = tuple(FrameEntry(r.client_id, r.score) for r in ordered)
    return FrameManifest(window, config_digest, frames)


def save_visualization(
    path: str | Path,
    manifest: FrameManifest,
    layouts_by_client: Mapping[str, dict],
) -> None:
    """Persist a produced visualization (manifest + layout JSON) for later."""
    document = {
        "format": "fraudlens-visualization",
        "version": 1,
        "manifest": manifest.to_dict(),
        "layouts": dict(sorted(layouts_by_client.items())),
    }
    Path(path).write_text(json.dumps(document, indent=2, sort_keys=True), encoding="utf-8")


def load_visualization(path: str | Path) -> dict:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    if document.get("format") != "fraudlens-visualization":
        raise ValueError(f"{path}: not a saved visualization file")
    for key in ("manifest", "layouts"):
        if key not in document:
            raise ValueError(f"{path}: missing {key!r} section")
    return document
