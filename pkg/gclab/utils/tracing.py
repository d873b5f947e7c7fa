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
import json
import logging
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from gclab.utils.typing import SweepRecord

log = logging.getLogger(__name__)


class JsonLinesSink:
    """
    Writes sweep evidence as JSON lines and keeps a pass/fail tally.

    Records that fail are also logged at WARNING level so a failed sweep is
    visible without opening the file. Used as a context manager; the summary
    line is logged on close.
    """

    def __init__(self, path: str | Path | None, label: str = "sweep") -> None:
        """
        :param path: target file, or None to keep only the tally
        :param label: name used in the summary log line
        """
        self.path = Path(path) if path is not None else None
        self.label = label
        self.count = 0
        self.failures = 0
        self._handle = None

    def __enter__(self) -> "JsonLinesSink":
        if self.path is not None:
            self._handle = open(self.path, "w")
        return self

    def __exit__(self, *exc_info: Any) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None
        log.info(
            json.dumps(
                {"type": "sweep_summary", "label": self.label, "records": self.count, "failures": self.failures}
            )
        )

    def export(self, payload: BaseModel | dict, passed: bool = True) -> None:
        """Appends one record to the sink."""
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        record = SweepRecord(case=self.count, payload=payload)
        self.count += 1
        if not passed:
            self.failures += 1
            log.warning(f"{self.label}: case {record.case} failed: {payload}")
        if self._handle is not None:
            self._handle.write(record.model_dump_json() + "\n")
