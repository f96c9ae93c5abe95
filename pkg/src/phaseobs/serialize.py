"""JSON and CSV interchange.

Complex entries are always [re, im] pairs.  CSV output is RFC 4180 (CRLF
line endings) with floats printed by repr-shortest formatting, so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence, Union

from .circle import CircleSet
from .discrete import DiscretePhasePOM
from .fock import Operator, StateVector
from .matrices import PhaseMatrix

__all__ = [
    "to_json",
    "dump_json",
    "load_phase_matrix",
    "load_state_vector",
    "load_operator",
    "csv_text",
    "write_csv",
]

Serializable = Union[Operator, StateVector, PhaseMatrix, CircleSet, DiscretePhasePOM, dict, list]


def to_json(obj: Serializable) -> str:
    data = obj.to_dict() if hasattr(obj, "to_dict") else obj
    return json.dumps(data, indent=2, sort_keys=True)


def dump_json(obj: Serializable, path) -> None:
    Path(path).write_text(to_json(obj) + "\n", encoding="utf-8")


def load_phase_matrix(path) -> PhaseMatrix:
    return PhaseMatrix.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def load_state_vector(path) -> StateVector:
    return StateVector.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def load_operator(path) -> Operator:
    return Operator.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)  # RFC 4180: the default dialect emits CRLF
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    Path(path).write_text(csv_text(header, rows), encoding="utf-8", newline="")
