"""ParticleCloud CSV files: ``dim=<d>,tag=<tag>`` header, one point per row."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from latent_transport.common.errors import CloudFormatError
from latent_transport.common.types import DOMAIN_TAGS
from latent_transport.measures.cloud import ParticleCloud


def format_float(value: float) -> str:
    """17 significant digits: exact round trip for 64-bit floats."""
    return format(float(value), ".17g")


def cloud_to_text(cloud: ParticleCloud) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([f"dim={cloud.dim}", f"tag={cloud.domain_tag}"])
    for row in cloud.points:
        writer.writerow([format_float(x) for x in row])
    return buffer.getvalue()


def write_cloud(cloud: ParticleCloud, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(cloud_to_text(cloud), encoding="utf-8")
    return path


def _parse_header(row: list[str]) -> tuple[int, str]:
    fields: dict[str, str] = {}
    for cell in row:
        key, sep, value = cell.strip().partition("=")
        if not sep:
            raise CloudFormatError(f"header cell {cell!r} is not key=value", line=1)
        fields[key.strip()] = value.strip()
    if "dim" not in fields or "tag" not in fields:
        raise CloudFormatError("header must be 'dim=<d>,tag=<tag>'", line=1)
    try:
        dim = int(fields["dim"])
    except ValueError as exc:
        raise CloudFormatError(f"dim {fields['dim']!r} is not an integer", line=1) from exc
    if dim < 1:
        raise CloudFormatError(f"dim must be >= 1, got {dim}", line=1)
    if fields["tag"] not in DOMAIN_TAGS:
        raise CloudFormatError(f"tag must be one of {DOMAIN_TAGS}, got {fields['tag']!r}", line=1)
    return dim, fields["tag"]


def cloud_from_text(text: str) -> ParticleCloud:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise CloudFormatError("file is empty", line=1)
    dim, tag = _parse_header(rows[0])
    points: list[list[float]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != dim:
            raise CloudFormatError(f"expected {dim} values, got {len(row)}", line=lineno)
        try:
            values = [float(cell) for cell in row]
        except ValueError as exc:
            raise CloudFormatError(f"non-numeric value in {row!r}", line=lineno) from exc
        if not all(np.isfinite(values)):
            raise CloudFormatError("non-finite value", line=lineno)
        points.append(values)
    if not points:
        raise CloudFormatError("no points after header", line=2)
    return ParticleCloud(np.array(points), tag)


def read_cloud(path: str | Path) -> ParticleCloud:
    path = Path(path)
    if not path.is_file():
        raise CloudFormatError(f"cloud file not found: {path}")
    return cloud_from_text(path.read_text(encoding="utf-8"))


__all__ = ["format_float", "cloud_to_text", "cloud_from_text", "write_cloud", "read_cloud"]
