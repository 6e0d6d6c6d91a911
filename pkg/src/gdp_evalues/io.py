"""Text formats: e-value CSV, GWAS z-score TSV, result tables and run manifests.

Floats are written with ``repr`` (shortest round-trip form); output is UTF-8
with ``\\n`` line endings.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError


@dataclass(frozen=True)
class EValueTable:
    indices: tuple[int, ...]
    values: tuple[float, ...]


@dataclass(frozen=True)
class GwasRecord:
    snp_id: str
    z: float


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: Mapping[str, object] = field(default_factory=dict)
    seed: int | None = None
    tool_version: str = ""

    def to_json(self) -> str:
        payload = {"command": self.command, "config": dict(self.config), "seed": self.seed,
                   "tool_version": self.tool_version}
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _text(data: bytes | str) -> str:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    return data


def _lines(data: bytes | str) -> list[str]:
    lines = _text(data).splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError("input is empty", row=1)
    return lines


def _float(token: str, row: int, what: str) -> float:
    try:
        x = float(token)
    except ValueError:
        raise ParseError(f"cannot parse {what} {token!r} as a number", row=row) from None
    if math.isnan(x):
        raise ParseError(f"{what} is NaN", row=row)
    return x


def parse_evalue_csv(data: bytes | str) -> EValueTable:
    """Parse a ``evalue`` or ``index,evalue`` CSV; rows are numbered from 1 at the header."""
    lines = _lines(data)
    header = [h.strip() for h in lines[0].split(",")]
    if header == ["evalue"]:
        with_index = False
    elif header == ["index", "evalue"]:
        with_index = True
    else:
        raise ParseError(f"unexpected header {lines[0]!r}; want 'evalue' or 'index,evalue'",
                         row=1)
    indices, values = [], []
    for row, line in enumerate(lines[1:], start=2):
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != len(header):
            raise ParseError(f"expected {len(header)} field(s), got {len(fields)}", row=row)
        if with_index:
            try:
                idx = int(fields[0])
            except ValueError:
                raise ParseError(f"index {fields[0]!r} is not an integer", row=row) from None
        else:
            idx = row - 2
        value = _float(fields[-1], row, "e-value")
        if not value >= 0.0 or math.isinf(value):
            raise ParseError(f"e-value must be finite and nonnegative, got {fields[-1]!r}",
                             row=row)
        indices.append(idx)
        values.append(value)
    if len(set(indices)) != len(indices):
        raise ParseError("duplicate index values")
    return EValueTable(tuple(indices), tuple(values))


def parse_gwas_tsv(data: bytes | str) -> list[GwasRecord]:
    lines = _lines(data)
    if lines[0].rstrip("\r").split("\t") != ["snp_id", "z"]:
        raise ParseError(f"unexpected header {lines[0]!r}; want 'snp_id<TAB>z'", row=1)
    seen: dict[str, int] = {}
    records = []
    for row, line in enumerate(lines[1:], start=2):
        fields = line.rstrip("\r").split("\t")
        if len(fields) != 2:
            raise ParseError(f"expected 2 tab-separated fields, got {len(fields)}", row=row)
        snp, token = fields[0].strip(), fields[1].strip()
        if not snp:
            raise ParseError("empty snp_id", row=row)
        if snp in seen:
            raise ParseError(f"duplicate snp_id {snp!r} (first seen on row {seen[snp]})",
                             row=row)
        z = _float(token, row, "z-score")
        if math.isinf(z):
            raise ParseError("z-score must be finite", row=row)
        seen[snp] = row
        records.append(GwasRecord(snp, z))
    return records


def format_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def format_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def format_evalue_csv(indices: Sequence[int], values: Sequence[float]) -> str:
    return format_csv(("index", "evalue"), zip(indices, (float(v) for v in values)))


def manifest_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def write_output(out: str | Path, text: str, manifest: RunManifest) -> None:
    """Write ``text`` to ``out`` and the manifest to ``<out>.manifest.json``."""
    out = Path(out)
    out.write_text(text, encoding="utf-8", newline="\n")
    manifest_path(out).write_text(manifest.to_json(), encoding="utf-8", newline="\n")
