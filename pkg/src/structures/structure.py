"""
Structure Module

Structure hữu hạn trên signature quan hệ: domain {0,…,n−1}, các fact
(relation, tuple) và interpretation của hằng.

Các phép dựng (union, doubling, saturation, …) luôn trả về structure mới;
add/discard chỉ được dùng khi đang dựng một structure.
"""

from typing import Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from src.exceptions import StructureError
from src.logic.signature import Signature
from src.structures.relations import make_relation

Fact = Tuple[str, Tuple[int, ...]]


class Structure:
    """
    Structure hữu hạn

    Attributes:
        signature: Signature
        size: Số phần tử |A|
        constants: Tên hằng → phần tử
        labels: Nhãn của từng phần tử (vd. (a, t) sau doubling), dùng để
            truy lại nguồn gốc qua các phép dựng
    """

    def __init__(
        self,
        signature: Signature,
        size: int,
        facts: Iterable[Fact] = (),
        constants: Optional[Mapping[str, int]] = None,
        labels: Optional[Sequence[Hashable]] = None,
    ):
        if not isinstance(signature, Signature):
            raise TypeError("signature must be a Signature")
        if size < 0:
            raise StructureError(f"Domain size must be non-negative, got {size}")
        self.signature = signature
        self.size = size
        self.constants: Dict[str, int] = {name: int(e) for name, e in (constants or {}).items()}
        missing = set(signature.constants) - set(self.constants)
        if missing:
            raise StructureError(f"Constants without interpretation: {sorted(missing)}")
        for name, element in self.constants.items():
            if name not in signature.constants:
                raise StructureError(f"Unknown constant {name}")
            self._check_element(element)
        self.labels: Tuple[Hashable, ...] = tuple(labels) if labels is not None else tuple(range(size))
        if len(self.labels) != size:
            raise StructureError("labels must have one entry per element")
        self._relations = {name: make_relation(arity, size) for name, arity in signature.relations}
        self._label_index: Optional[Dict[Hashable, int]] = None
        for relation, t in facts:
            self.add(relation, t)

    # ------------------------------------------------------------------
    # Access
    # ------------------------------------------------------------------

    @property
    def domain(self) -> range:
        return range(self.size)

    def _check_element(self, element: int) -> None:
        if not 0 <= element < self.size:
            raise StructureError(f"Element {element} is outside the domain of size {self.size}")

    def _check_tuple(self, relation: str, t: Tuple[int, ...]) -> Tuple[int, ...]:
        if relation not in self._relations:
            raise StructureError(f"Unknown relation {relation}")
        t = tuple(int(e) for e in t)
        if len(t) != self.signature.arity(relation):
            raise StructureError(
                f"Fact {relation}{t} does not match arity {self.signature.arity(relation)}"
            )
        for e in t:
            self._check_element(e)
        return t

    def relation(self, name: str):
        try:
            return self._relations[name]
        except KeyError:
            raise StructureError(f"Unknown relation {name}")

    def holds(self, relation: str, t: Tuple[int, ...]) -> bool:
        return self._relations[relation].holds(tuple(t))

    def add(self, relation: str, t: Tuple[int, ...]) -> bool:
        t = self._check_tuple(relation, t)
        return self._relations[relation].add(t)

    def discard(self, relation: str, t: Tuple[int, ...]) -> bool:
        t = self._check_tuple(relation, t)
        return self._relations[relation].discard(t)

    def facts(self, relation: Optional[str] = None) -> List[Fact]:
        names = [relation] if relation is not None else list(self._relations)
        return [(name, t) for name in sorted(names) for t in self._relations[name].tuples()]

    def fact_set(self) -> frozenset:
        return frozenset(self.facts())

    def facts_containing(self, element: int) -> List[Fact]:
        return [(name, t) for name in sorted(self._relations) for t in self._relations[name].containing(element)]

    def facts_among(self, elements: Iterable[int], containing: Optional[Iterable[int]] = None) -> List[Fact]:
        """Fact có mọi phần tử thuộc elements và, nếu có containing, chứa một phần tử của nó"""
        keep = sorted({int(e) for e in elements})
        touch = None if containing is None else {int(e) for e in containing}
        return [
            (name, t) for name in sorted(self._relations) for t in self._relations[name].among(keep, touch)
        ]

    def iter_facts(self) -> Iterator[Fact]:
        for name in sorted(self._relations):
            for t in self._relations[name].tuples():
                yield name, t

    @property
    def fact_count(self) -> int:
        return sum(r.count() for r in self._relations.values())

    # ------------------------------------------------------------------
    # Named / unnamed parts
    # ------------------------------------------------------------------

    @property
    def named(self) -> Tuple[int, ...]:
        """Â: các phần tử là interpretation của hằng"""
        return tuple(sorted(set(self.constants.values())))

    @property
    def unnamed(self) -> Tuple[int, ...]:
        named = set(self.constants.values())
        return tuple(e for e in self.domain if e not in named)

    def constant_names(self, element: int) -> Tuple[str, ...]:
        return tuple(sorted(name for name, e in self.constants.items() if e == element))

    def is_named(self, element: int) -> bool:
        return element in set(self.constants.values())

    def index_of(self, label: Hashable) -> int:
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._label_index[label]
        except KeyError:
            raise StructureError(f"No element labelled {label!r}")

    # ------------------------------------------------------------------
    # Derived structures
    # ------------------------------------------------------------------

    def copy(self) -> "Structure":
        clone = Structure(self.signature, self.size, constants=self.constants, labels=self.labels)
        clone._relations = {name: r.copy() for name, r in self._relations.items()}
        return clone

    def restrict(self, elements: Iterable[int]) -> Tuple["Structure", Dict[int, int]]:
        """
        Substructure 𝔄↾X (X phải chứa mọi phần tử có tên)

        Returns:
            (substructure, mapping phần tử cũ → phần tử mới)
        """
        keep = sorted(set(elements))
        mapping = {old: new for new, old in enumerate(keep)}
        if any(e not in mapping for e in self.constants.values()):
            raise StructureError("Restriction must keep every named element")
        sub = Structure(
            self.signature,
            len(keep),
            constants={c: mapping[e] for c, e in self.constants.items()},
            labels=[self.labels[e] for e in keep],
        )
        for name, relation in self._relations.items():
            for t in relation.among(keep):
                sub._relations[name].add(tuple(mapping[e] for e in t))
        return sub, mapping

    def reduct(self, signature: Signature) -> "Structure":
        """Bỏ các quan hệ không thuộc signature (vd. ký hiệu fresh)"""
        result = Structure(signature, self.size, constants=self.constants, labels=self.labels)
        for name in signature.relation_names:
            if name in self._relations:
                result._relations[name] = self._relations[name].copy()
        return result

    def expand(self, signature: Signature) -> "Structure":
        """Thêm các quan hệ rỗng cho ký hiệu mới của signature"""
        result = Structure(signature, self.size, constants=self.constants, labels=self.labels)
        for name, relation in self._relations.items():
            if name not in result._relations:
                raise StructureError(f"Relation {name} is missing from the expanded signature")
            result._relations[name] = relation.copy()
        return result

    # ------------------------------------------------------------------
    # Semantics helpers
    # ------------------------------------------------------------------

    def u_pair_count(self) -> int:
        symbol = self.signature.universal_symbol
        if symbol is None:
            raise StructureError("Signature has no universal symbol")
        return self._relations[symbol].count()

    def is_ubiquitous(self) -> bool:
        """U-biquitous: U đúng trên mọi cặp phần tử"""
        return self.u_pair_count() == self.size * self.size

    def fact_counts(self) -> pd.Series:
        """Số fact theo từng quan hệ"""
        return pd.Series({name: r.count() for name, r in sorted(self._relations.items())}, name="facts")

    def to_frame(self) -> pd.DataFrame:
        rows = [{"relation": name, "tuple": t} for name, t in self.iter_facts()]
        return pd.DataFrame(rows, columns=["relation", "tuple"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        return (
            self.size == other.size
            and self.constants == other.constants
            and self.signature.arities == other.signature.arities
            and self.fact_set() == other.fact_set()
        )

    def __repr__(self) -> str:
        return f"Structure(size={self.size}, facts={self.fact_count}, constants={self.constants})"
