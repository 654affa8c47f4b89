"""Line-delimited JSON records: one object per line, UTF-8, LF."""

import json
from collections.abc import Iterable, Iterator
from pathlib import Path

from l1lens.errors import MalformedRecordError


def dump_record(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False)


def try_load_json(text: str) -> tuple[dict | None, str | None]:
    try:
        value = json.loads(text)
    except (ValueError, json.JSONDecodeError) as exc:
        return None, str(exc)
    if not isinstance(value, dict):
        return None, "record is not an object"
    return value, None


def write_records(path: Path, records: Iterable[dict]) -> int:
    count = 0
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(dump_record(record))
            f.write("\n")
            count += 1
    return count


def read_records(path: Path) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, record)``; blank lines are skipped."""
    with path.open("r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            record, error = try_load_json(line)
            if record is None:
                raise MalformedRecordError(error, path=path, line=number)
            yield number, record
