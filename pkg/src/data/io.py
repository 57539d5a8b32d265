"""
I/O Module

Đọc/ghi structure và trace saturation ở dạng JSON-lines.

Structure:
    dòng 1: {"domain": n, "constants": {...}, "signature": {...}}
    các dòng sau: {"rel": "R", "tuple": [0, 1]}

Trace:
    dòng 1: {"trace": header}
    mỗi bước một dòng: {"step", "pair", "coordinates", "block", "entry", "added", "u_pairs"}

Mọi file được ghi qua file tạm rồi os.replace (không để lại file dở).
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, Iterator, List, Tuple, Union

from src.exceptions import StructureError
from src.logic.signature import Signature
from src.models.saturation import SaturationTrace, StepRecord
from src.structures.structure import Structure

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def write_atomic(path: PathLike, lines: Iterable[str]) -> Path:
    """Ghi các dòng vào path qua file tạm cùng thư mục"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            for line in lines:
                handle.write(line)
                handle.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return path


def _records(path: PathLike) -> Iterator[Tuple[int, dict]]:
    with open(path, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise StructureError(f"{path}:{number}: invalid JSON ({e.msg})")
            if not isinstance(record, dict):
                raise StructureError(f"{path}:{number}: expected a JSON object")
            yield number, record


# ---------------------------------------------------------------------------
# Signatures and structures
# ---------------------------------------------------------------------------

def signature_to_dict(sig: Signature) -> dict:
    return {
        "relations": dict(sig.relations),
        "constants": list(sig.constants),
        "universal": sig.universal_symbol,
        "transitive": sorted(sig.transitive_symbols),
        "aux": sig.aux_symbol,
    }


def signature_from_dict(data: dict) -> Signature:
    return Signature.build(
        data.get("relations", {}),
        constants=data.get("constants", ()),
        universal=data.get("universal"),
        transitive=data.get("transitive", ()),
        aux=data.get("aux"),
    )


def structure_lines(s: Structure) -> List[str]:
    header = {
        "domain": s.size,
        "constants": dict(sorted(s.constants.items())),
        "signature": signature_to_dict(s.signature),
    }
    lines = [json.dumps(header, sort_keys=True)]
    for name, t in s.iter_facts():
        lines.append(json.dumps({"rel": name, "tuple": list(t)}, sort_keys=True))
    return lines


def write_structure(s: Structure, path: PathLike) -> Path:
    """Ghi structure ra file JSON-lines"""
    written = write_atomic(path, structure_lines(s))
    logger.debug("Wrote structure of size %d to %s", s.size, written)
    return written


def read_structure(path: PathLike, signature: Signature = None) -> Structure:
    """
    Đọc structure từ file JSON-lines

    Args:
        path: Đường dẫn file
        signature: Signature dùng thay cho signature trong header (vd. khi
            kiểm tra với một câu đã parse)

    Raises:
        StructureError: File sai định dạng (kèm số dòng)
    """
    records = _records(path)
    first = next(records, None)
    if first is None:
        raise StructureError(f"{path}: empty structure file")
    number, header = first
    if "domain" not in header:
        raise StructureError(f"{path}:{number}: header needs a 'domain' field")
    if signature is None:
        if "signature" not in header:
            raise StructureError(f"{path}:{number}: header needs a 'signature' field")
        signature = signature_from_dict(header["signature"])
    try:
        s = Structure(signature, int(header["domain"]), constants=header.get("constants", {}))
    except (StructureError, TypeError) as e:
        raise StructureError(f"{path}:{number}: {e}")
    for number, record in records:
        if "rel" not in record or "tuple" not in record:
            raise StructureError(f"{path}:{number}: expected 'rel' and 'tuple' fields")
        try:
            s.add(record["rel"], tuple(record["tuple"]))
        except (StructureError, KeyError, TypeError) as e:
            raise StructureError(f"{path}:{number}: {e}")
    return s


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------

def _record_to_dict(r: StepRecord) -> dict:
    return {
        "step": r.step,
        "pair": list(r.pair),
        "coordinates": [list(c) for c in r.coordinates],
        "block": r.block,
        "entry": list(r.entry),
        "added": [[name, list(t)] for name, t in r.added],
        "u_pairs": r.u_pairs,
    }


def _record_from_dict(data: dict) -> StepRecord:
    return StepRecord(
        step=int(data["step"]),
        pair=tuple(data["pair"]),
        coordinates=tuple(tuple(c) for c in data["coordinates"]),
        block=int(data["block"]),
        entry=tuple(data["entry"]),
        added=tuple((name, tuple(t)) for name, t in data.get("added", [])),
        u_pairs=int(data.get("u_pairs", 0)),
    )


def write_trace(trace: SaturationTrace, path: PathLike) -> Path:
    """Ghi trace ra file JSON-lines"""
    lines = [json.dumps({"trace": trace.header()}, sort_keys=True)]
    lines += [json.dumps(_record_to_dict(r), sort_keys=True) for r in trace.records]
    return write_atomic(path, lines)


def read_trace(path: PathLike) -> SaturationTrace:
    """
    Đọc trace từ file JSON-lines

    Raises:
        StructureError: File sai định dạng (kèm số dòng)
    """
    records = _records(path)
    first = next(records, None)
    if first is None or "trace" not in first[1]:
        raise StructureError(f"{path}:1: expected a trace header")
    header = first[1]["trace"]
    try:
        positions = {(k, l): (p1, p2) for k, l, p1, p2 in header["entry_positions"]}
        trace = SaturationTrace(
            block_size=int(header["block_size"]),
            named_count=int(header["named_count"]),
            size=int(header["size"]),
            tg_mode=bool(header.get("tg_mode", False)),
            entry_positions=positions,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise StructureError(f"{path}:1: malformed trace header ({e})")
    for number, data in records:
        try:
            trace.records.append(_record_from_dict(data))
        except (KeyError, TypeError, ValueError) as e:
            raise StructureError(f"{path}:{number}: malformed step ({e})")
    return trace
