# Copyright 2025 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
import csv
import hashlib
import json
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel

log = logging.getLogger(__name__)


def create_dir_if_not_exists(path: str | Path) -> Path:
    """Creates an output directory if it doesn't already exist.

    Args:
        path: Directory to create; parents are created as needed.

    Returns:
        The directory as a Path.
    """
    directory = Path(path)
    if directory.is_dir():
        log.info(f"Output directory {directory} already exists")
    else:
        directory.mkdir(parents=True, exist_ok=True)
        log.info(f"Created output directory {directory}")
    return directory


def format_number(value: Any) -> str:
    """Shortest round-trip text for numbers; everything else via str()."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    try:
        # numpy scalars
        return format_number(value.item())
    except AttributeError:
        return str(value)


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Writes a CSV file with round-trip float formatting and returns its digest."""
    path = Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) for v in row])
    log.info(f"Wrote {path}")
    return sha256_file(path)


def write_json(path: str | Path, payload: BaseModel | dict | list) -> str:
    """Writes a pydantic model or plain JSON payload and returns its digest."""
    path = Path(path)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    path.write_text(text + "\n")
    log.info(f"Wrote {path}")
    return sha256_file(path)


def canonical_digest(payload: BaseModel | dict) -> str:
    """SHA-256 of the canonical (sorted-key, compact) JSON form of a payload."""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()
