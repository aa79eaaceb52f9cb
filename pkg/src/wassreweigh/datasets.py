"""Dataset (TSV) and weights (JSONL) files.

Dataset files::

    #dim=<d>
    <id>\\t<bits>[\\t<weight>]

``bits`` is a 0/1 string of length d or a hex string of length ceil(d/4).
Either every record carries a weight or none does (uniform).  Weights are
normalized on load.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable

from wassreweigh.distribution import DistributionError, WeightedDistribution, normalize
from wassreweigh.hypercube import PointParseError, parse_point


class DatasetError(ValueError):
    """A dataset or weights file is unreadable or malformed."""


def parse_dataset(lines: Iterable[str], source: str = "<input>") -> WeightedDistribution:
    it = iter(lines)
    try:
        header = next(it).rstrip("\n")
    except StopIteration:
        raise DatasetError(f"{source}: empty file") from None
    if not header.startswith("#dim="):
        raise DatasetError(f"{source}:1: expected '#dim=<d>' header, got {header!r}")
    try:
        d = int(header[len("#dim=") :])
    except ValueError:
        raise DatasetError(f"{source}:1: bad dimension in header {header!r}") from None
    if d < 1:
        raise DatasetError(f"{source}:1: dimension must be >= 1")

    ids, points, weights = [], [], []
    for lineno, raw in enumerate(it, start=2):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3):
            raise DatasetError(f"{source}:{lineno}: expected 2 or 3 tab-separated fields, got {len(fields)}")
        try:
            points.append(parse_point(fields[1], d))
        except PointParseError as exc:
            raise DatasetError(f"{source}:{lineno}: {exc}") from None
        ids.append(fields[0])
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise DatasetError(f"{source}:{lineno}: bad weight {fields[2]!r}") from None
            if not math.isfinite(w) or w < 0:
                raise DatasetError(f"{source}:{lineno}: weight must be finite and >= 0")
            weights.append(w)
        else:
            weights.append(None)

    if not points:
        raise DatasetError(f"{source}: no records")
    given = [w is not None for w in weights]
    if any(given) and not all(given):
        raise DatasetError(f"{source}: either every record has a weight or none does")
    try:
        w = normalize(weights) if all(given) else [1.0 / len(points)] * len(points)
        return WeightedDistribution(tuple(points), tuple(ids), w)
    except DistributionError as exc:
        raise DatasetError(f"{source}: {exc}") from None


def read_dataset(path: str | Path) -> WeightedDistribution:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_dataset(fh, str(path))
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise DatasetError(f"{path}: not UTF-8 text") from None


def format_dataset(dist: WeightedDistribution, with_weights: bool = True) -> str:
    out = [f"#dim={dist.d}\n"]
    for i, p, w in zip(dist.ids, dist.points, dist.weights.tolist()):
        out.append(f"{i}\t{p.encode()}\t{w!r}\n" if with_weights else f"{i}\t{p.encode()}\n")
    return "".join(out)


def write_dataset(path: str | Path, dist: WeightedDistribution, with_weights: bool = True) -> None:
    Path(path).write_text(format_dataset(dist, with_weights), encoding="utf-8")


def format_weights(dist: WeightedDistribution) -> str:
    return "".join(json.dumps({"id": i, "w": w}) + "\n" for i, w in zip(dist.ids, dist.weights.tolist()))


def write_weights(path: str | Path, dist: WeightedDistribution) -> None:
    Path(path).write_text(format_weights(dist), encoding="utf-8")


def read_weights(path: str | Path) -> list[tuple[str, float]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                out.append((str(rec["id"]), float(rec["w"])))
            except (ValueError, KeyError, TypeError):
                raise DatasetError(f"{path}:{lineno}: malformed weights record") from None
    return out
