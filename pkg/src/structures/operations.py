"""
Operations Module

Các phép dựng structure giữ tính chất là mô hình của câu dạng chuẩn:
    - disjoint_union / doubling (không có hằng)
    - harmonized_union / harmonized_doubling (phần có tên dùng chung)
    - strip_transitive_cross_facts (𝔄⁻)

Bố trí phần tử (deterministic):
    - disjoint_union: các block nối tiếp, nhãn (block, id cũ)
    - harmonized_*: phần có tên trước, sau đó các phần không tên;
      nhãn phần có tên là ("named", id cũ)
    - doubling: (a, 0) cho mọi a, rồi (a, 1); nhãn (a, t)
"""

import itertools
import logging
from typing import Dict, List, Sequence, Tuple

from src.exceptions import StructureError
from src.structures.structure import Structure

logger = logging.getLogger(__name__)


def _same_signature(structures: Sequence[Structure]) -> None:
    if not structures:
        raise StructureError("Expected at least one structure")
    first = structures[0].signature
    for s in structures[1:]:
        if s.signature.arities != first.arities or s.signature.constants != first.constants:
            raise StructureError("All structures must share the same signature")


def disjoint_union(structures: Sequence[Structure]) -> Structure:
    """
    Disjoint union của một họ structure không có hằng

    Returns:
        Structure với phần tử của block i nằm liên tiếp, nhãn (i, id cũ)
    """
    _same_signature(structures)
    if structures[0].signature.constants:
        raise StructureError("disjoint_union needs a constant-free signature; use harmonized_union")
    labels = [(i, e) for i, s in enumerate(structures) for e in s.domain]
    result = Structure(structures[0].signature, len(labels), labels=labels)
    offset = 0
    for s in structures:
        for name, t in s.iter_facts():
            result.add(name, tuple(offset + e for e in t))
        offset += s.size
    return result


def doubling(s: Structure) -> Structure:
    """
    Doubling: domain A × {0,1}, P[(a1,l1),…,(ak,lk)] ⇔ P[a1,…,ak]

    Raises:
        StructureError: signature có hằng (dùng harmonized_doubling)
    """
    if s.signature.constants:
        raise StructureError("doubling needs a constant-free signature; use harmonized_doubling")
    return harmonized_doubling(s)


def _named_part(s: Structure) -> Tuple[Tuple[int, ...], Dict[Tuple[str, ...], int]]:
    """Phần tử có tên theo thứ tự tên hằng, cùng chỉ số theo tên"""
    named = tuple(sorted(s.named, key=s.constant_names))
    return named, {s.constant_names(e): i for i, e in enumerate(named)}


def _check_harmonized(structures: Sequence[Structure]) -> None:
    """Mọi structure có cùng phần có tên (cùng hằng, cùng substructure cảm sinh)"""
    first = structures[0]
    named, keys = _named_part(first)
    reference = _named_facts(first, named)
    for s in structures[1:]:
        other, other_keys = _named_part(s)
        if other_keys != keys:
            raise StructureError("Named parts interpret the constants differently")
        if _named_facts(s, other) != reference:
            raise StructureError("Named parts induce different substructures")


def _named_facts(s: Structure, named: Sequence[int]) -> frozenset:
    position = {e: i for i, e in enumerate(named)}
    facts = set()
    for e in named:
        for name, t in s.facts_containing(e):
            if all(x in position for x in t):
                facts.add((name, tuple(position[x] for x in t)))
    return frozenset(facts)


def harmonized_union(structures: Sequence[Structure]) -> Structure:
    """
    Harmonized union: một bản sao chung của phần có tên, các phần không tên
    rời nhau; không có fact nối hai phần không tên khác nhau

    Raises:
        StructureError: các phần có tên không trùng nhau
    """
    _same_signature(structures)
    _check_harmonized(structures)
    first = structures[0]
    named, _ = _named_part(first)
    labels: List = [("named", e) for e in named]
    maps: List[Dict[int, int]] = []
    for i, s in enumerate(structures):
        # named elements are matched by constant name
        mapping = {e: j for j, e in enumerate(_named_part(s)[0])}
        for e in s.unnamed:
            mapping[e] = len(labels)
            labels.append((i, e))
        maps.append(mapping)
    constants = {c: maps[0][e] for c, e in first.constants.items()}
    result = Structure(first.signature, len(labels), constants=constants, labels=labels)
    for s, mapping in zip(structures, maps):
        for name, t in s.iter_facts():
            result.add(name, tuple(mapping[e] for e in t))
    logger.debug("harmonized union of %d structures: %d elements", len(structures), result.size)
    return result


def harmonized_doubling(s: Structure) -> Structure:
    """
    Harmonized doubling: phần tử có tên giữ nguyên (tag 0), phần tử không
    tên được nhân đôi; P[(a1,l1),…,(ak,lk)] ⇔ P[a1,…,ak]
    """
    named = s.named
    unnamed = s.unnamed
    labels = [(e, 0) for e in named] + [(e, 0) for e in unnamed] + [(e, 1) for e in unnamed]
    index = {label: i for i, label in enumerate(labels)}
    constants = {c: index[(e, 0)] for c, e in s.constants.items()}
    result = Structure(s.signature, len(labels), constants=constants, labels=labels)
    named_set = set(named)
    for name, t in s.iter_facts():
        choices = [((e, 0),) if e in named_set else ((e, 0), (e, 1)) for e in t]
        for tagged in itertools.product(*choices):
            result.add(name, tuple(index[x] for x in tagged))
    return result


def strip_transitive_cross_facts(s: Structure) -> Structure:
    """𝔄⁻: bỏ mọi fact T[a,b] với T transitive và a ≠ b"""
    result = s.copy()
    for name in sorted(s.signature.transitive_symbols):
        for a, b in s.relation(name).tuples():
            if a != b:
                result.discard(name, (a, b))
    return result
