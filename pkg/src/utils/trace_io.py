"""JSON Lines trace format shared by every command.

One packet per line: ``{"index": ..., "ts_us": ..., "truth": ..., "som": <base64 datagram>}``.
"""

import base64
import json
from collections.abc import Iterable
from pathlib import Path

from models.errors import MalformedMessageError
from models.traffic import PacketRecord, Truth

from .som_codec import decode_som, encode_som


def record_to_line(record: PacketRecord) -> str:
    payload = base64.b64encode(encode_som(record.message)).decode("ascii")
    return json.dumps(
        {"index": record.index, "ts_us": record.timestamp, "truth": record.truth.value, "som": payload},
        separators=(",", ":"),
    )


def line_to_record(line: str) -> PacketRecord:
    """Parse one trace line.

    Raises:
        MalformedMessageError: If the line is not a valid trace entry.
    """
    try:
        entry = json.loads(line)
        datagram = base64.b64decode(entry["som"], validate=True)
        return PacketRecord(
            index=int(entry["index"]),
            timestamp=int(entry["ts_us"]),
            message=decode_som(datagram),
            truth=Truth(entry["truth"]),
        )
    except MalformedMessageError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedMessageError(f"bad trace line: {exc}") from exc


def write_trace(path: str | Path, records: Iterable[PacketRecord]) -> int:
    """Write records to ``path``; returns the number of lines written."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(record_to_line(record))
            handle.write("\n")
            count += 1
    return count


def read_trace(path: str | Path) -> list[PacketRecord]:
    with open(path, encoding="utf-8") as handle:
        return [line_to_record(line) for line in handle if line.strip()]
