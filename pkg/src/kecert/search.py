"""Sweep weight systems, certify each candidate and persist the rows.

The output is a list of candidates with verdicts. It makes no claim to be a
complete classification.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from .certify import ConsistencyError, certify
from .wps import Surface, WeightSystem, bad_triples

SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "q0", "q1", "q2", "q3", "d", "quasismooth",
    "verdict_tiger", "verdict_ke", "tiger_witness", "borderline", "notes",
)
_LIST_SEP = " | "


class SchemaError(ValueError):
    pass


class PersistError(OSError):
    pass


@dataclass(frozen=True)
class SearchResult:
    weights: tuple[int, int, int, int]
    d: int
    quasismooth: str  # "YYY": conditions I, II, III
    verdict_tiger: str
    verdict_ke: str
    tiger_witness: str | None
    borderline: tuple[str, ...]
    notes: str
    trace: tuple[dict, ...] = field(default=(), compare=False, repr=False)
    seconds: float = field(default=0.0, compare=False, repr=False)

    @property
    def passes_conditions(self) -> bool:
        return self.quasismooth == "YYY"


def enumerate_weight_systems(max_weight: int) -> Iterator[WeightSystem]:
    """Sorted quadruples with q3 <= max_weight and coprime triples, in lexicographic order."""
    if max_weight < 1:
        raise ValueError(f"max_weight must be >= 1, got {max_weight}")
    for q in itertools.combinations_with_replacement(range(1, max_weight + 1), 4):
        if not bad_triples(q):
            yield WeightSystem(q, sum(q) - 1)  # type: ignore[arg-type]


def analyze_weights(ws: WeightSystem) -> SearchResult:
    """Certify one generic surface; failures are reported in the row, never raised."""
    start = time.perf_counter()
    try:
        report = certify(Surface(ws))
    except ConsistencyError as exc:
        return SearchResult(ws.q, ws.d, "???", "error", "error", None, (), f"consistency failure: {exc}",
                            seconds=time.perf_counter() - start)
    except (ValueError, ArithmeticError) as exc:
        return SearchResult(ws.q, ws.d, "???", "error", "error", None, (), f"analysis failed: {exc}",
                            seconds=time.perf_counter() - start)
    v = report.verdict
    return SearchResult(
        ws.q,
        ws.d,
        report.quasismooth.summary(),
        v.tiger_free,
        v.ke,
        v.tiger_witness,
        v.borderline,
        "; ".join(v.reasons),
        tuple(t.as_dict() for t in report.trace),
        time.perf_counter() - start,
    )


def run_batch(max_weight: int, quasismooth_only: bool = False, jobs: int | None = None) -> list[SearchResult]:
    """Certify every weight system up to ``max_weight``; output is sorted by weights."""
    systems = list(enumerate_weight_systems(max_weight))
    jobs = jobs or os.cpu_count() or 1
    if jobs == 1:
        results = [analyze_weights(ws) for ws in systems]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(analyze_weights, systems, chunksize=max(1, len(systems) // (8 * jobs))))
    if quasismooth_only:
        results = [r for r in results if r.passes_conditions]
    return sorted(results, key=lambda r: (r.weights, r.d))


def _row(r: SearchResult) -> list[str]:
    return [*map(str, r.weights), str(r.d), r.quasismooth, r.verdict_tiger, r.verdict_ke,
            r.tiger_witness or "", _LIST_SEP.join(r.borderline), r.notes]


def _as_json(r: SearchResult) -> dict:
    return {
        "weights": list(r.weights),
        "d": r.d,
        "quasismooth": r.quasismooth,
        "verdict_tiger": r.verdict_tiger,
        "verdict_ke": r.verdict_ke,
        "tiger_witness": r.tiger_witness,
        "borderline": list(r.borderline),
        "notes": r.notes,
        "trace": list(r.trace),
    }


def dumps(results: Sequence[SearchResult], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# kecert search, schema {SCHEMA_VERSION}: candidates with verdicts\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(_row(r) for r in results)
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "description": "candidates with verdicts",
            "results": [_as_json(r) for r in results],
        }
        return json.dumps(doc, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def loads(text: str, fmt: str) -> list[SearchResult]:
    if fmt == "csv":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# kecert search, schema "):
            raise SchemaError("missing schema line")
        version = lines[0].split("schema ", 1)[1].split(":", 1)[0]
        if version != str(SCHEMA_VERSION):
            raise SchemaError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
        rows = list(csv.reader(lines[1:]))
        if not rows or tuple(rows[0]) != CSV_COLUMNS:
            raise SchemaError("unexpected CSV header")
        out = []
        for row in rows[1:]:
            q0, q1, q2, q3, d, qs, vt, vk, tw, bl, notes = row
            out.append(SearchResult(
                (int(q0), int(q1), int(q2), int(q3)), int(d), qs, vt, vk, tw or None,
                tuple(bl.split(_LIST_SEP)) if bl else (), notes,
            ))
        return out
    if fmt == "json":
        doc = json.loads(text)
        version = doc.get("schema_version") if isinstance(doc, dict) else None
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
        return [
            SearchResult(
                tuple(o["weights"]), o["d"], o["quasismooth"], o["verdict_tiger"], o["verdict_ke"],
                o["tiger_witness"], tuple(o["borderline"]), o["notes"], tuple(o["trace"]),
            )
            for o in doc["results"]
        ]
    raise ValueError(f"unknown format {fmt!r}")


def persist(results: Sequence[SearchResult], path: str | Path, fmt: str) -> None:
    text = dumps(results, fmt)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise PersistError(f"cannot write {path}: {exc}") from exc


def load(path: str | Path, fmt: str | None = None) -> list[SearchResult]:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".").lower()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PersistError(f"cannot read {path}: {exc}") from exc
    return loads(text, fmt)
