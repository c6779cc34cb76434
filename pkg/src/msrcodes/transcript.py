"""Symbol accounting for one centralized repair."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class RepairTranscript:
    construction: str
    params: tuple
    failed: list[int]
    helpers: list[int]
    downloaded: dict[int, int] = field(default_factory=dict)
    accessed: dict[int, int] = field(default_factory=dict)
    per_group: dict[int, list[int]] = field(default_factory=dict)
    corrupted: list[int] = field(default_factory=list)
    flagged: list[int] = field(default_factory=list)
    outcome: str = "pending"
    wall_time: float = 0.0
    note: str = ""

    @property
    def total_download(self) -> int:
        return sum(self.downloaded.values())

    @property
    def total_access(self) -> int:
        return sum(self.accessed.values())

    def record_group(self, helper: int, downloaded: int, accessed: int):
        self.per_group.setdefault(helper, []).append(downloaded)
        self.downloaded[helper] = self.downloaded.get(helper, 0) + downloaded
        self.accessed[helper] = self.accessed.get(helper, 0) + accessed

    def to_record(self, include_timing: bool = False) -> dict:
        rec = {
            "kind": "transcript",
            "construction": self.construction,
            "params": list(self.params),
            "failed": list(self.failed),
            "helpers": list(self.helpers),
            "downloaded": {str(k): v for k, v in sorted(self.downloaded.items())},
            "accessed": {str(k): v for k, v in sorted(self.accessed.items())},
            "per_group": {str(k): v for k, v in sorted(self.per_group.items())},
            "corrupted": sorted(self.corrupted),
            "flagged": sorted(self.flagged),
            "total_download": self.total_download,
            "total_access": self.total_access,
            "outcome": self.outcome,
        }
        if self.note:
            rec["note"] = self.note
        if include_timing:
            rec["wall_time"] = round(self.wall_time, 6)
        return rec

    def to_line(self, include_timing: bool = False) -> str:
        """One line of JSON with a stable key order."""
        return json.dumps(self.to_record(include_timing), sort_keys=True)

    @classmethod
    def from_record(cls, rec: dict) -> "RepairTranscript":
        ints = lambda m: {int(k): v for k, v in m.items()}  # noqa: E731
        return cls(
            construction=rec["construction"],
            params=tuple(rec["params"]),
            failed=list(rec["failed"]),
            helpers=list(rec["helpers"]),
            downloaded=ints(rec["downloaded"]),
            accessed=ints(rec["accessed"]),
            per_group=ints(rec["per_group"]),
            corrupted=list(rec.get("corrupted", [])),
            flagged=list(rec.get("flagged", [])),
            outcome=rec.get("outcome", "pending"),
            wall_time=rec.get("wall_time", 0.0),
            note=rec.get("note", ""),
        )
