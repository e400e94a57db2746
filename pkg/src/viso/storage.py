"""JSON / JSON-Lines readers and writers for benchmarks, memories and outcomes."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Sequence

from .model import Instance
from .orchestrator import OrchestrationOutcome
from .router import MemoryEntry


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def manifest_path(bench_path: str | Path) -> Path:
    p = Path(bench_path)
    return p.with_name(p.stem + ".manifest.json")


def save_benchmark(path: str | Path, instances: Sequence[Instance], manifest: dict[str, Any]) -> None:
    Path(path).write_text(_dump([i.to_dict() for i in instances]))
    manifest_path(path).write_text(_dump(manifest))


def load_benchmark(path: str | Path) -> list[Instance]:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list):
        raise ValueError(f"{path}: benchmark file must hold a JSON array")
    return [Instance.from_dict(d) for d in data]


def save_memory(path: str | Path, memory: Sequence[MemoryEntry]) -> None:
    Path(path).write_text(_dump([e.to_dict() for e in memory]))


def load_memory(path: str | Path) -> list[MemoryEntry]:
    return [MemoryEntry.from_dict(d) for d in json.loads(Path(path).read_text())]


def save_outcomes(path: str | Path, outcomes: Iterable[OrchestrationOutcome], audit: bool = False) -> None:
    with open(path, "w") as fh:
        for o in outcomes:
            fh.write(json.dumps(o.to_dict(audit)) + "\n")


def load_outcomes(path: str | Path) -> list[OrchestrationOutcome]:
    with open(path) as fh:
        return [OrchestrationOutcome.from_dict(json.loads(line)) for line in fh if line.strip()]
