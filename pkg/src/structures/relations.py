"""
Relations Module

Lưu trữ một quan hệ trên domain {0,…,n−1}:
    - arity 1, 2: numpy boolean vector / matrix (DenseRelation)
    - arity ≥ 3: set các tuple kèm index theo phần tử (SparseRelation)

Cả hai có chung interface: holds, add, discard, tuples, containing, among, match,
count, copy.
"""

from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

Pattern = Sequence[Optional[int]]


class DenseRelation:
    """Quan hệ unary/binary dạng numpy boolean array"""

    def __init__(self, arity: int, size: int, data: Optional[np.ndarray] = None):
        if arity not in (1, 2):
            raise ValueError(f"DenseRelation supports arity 1 or 2, got {arity}")
        self.arity = arity
        self.size = size
        shape = (size,) * arity
        self.data = np.zeros(shape, dtype=bool) if data is None else data

    def holds(self, t: Tuple[int, ...]) -> bool:
        return bool(self.data[t])

    def add(self, t: Tuple[int, ...]) -> bool:
        """Thêm tuple; trả về True nếu tuple chưa có"""
        if self.data[t]:
            return False
        self.data[t] = True
        return True

    def discard(self, t: Tuple[int, ...]) -> bool:
        if not self.data[t]:
            return False
        self.data[t] = False
        return True

    def tuples(self) -> List[Tuple[int, ...]]:
        return [tuple(int(i) for i in row) for row in np.argwhere(self.data)]

    def containing(self, element: int) -> List[Tuple[int, ...]]:
        if self.arity == 1:
            return [(element,)] if self.data[element] else []
        result = [(element, int(j)) for j in np.flatnonzero(self.data[element])]
        result += [(int(i), element) for i in np.flatnonzero(self.data[:, element]) if i != element]
        return result

    def among(self, elements: Sequence[int], containing: Optional[Iterable[int]] = None) -> List[Tuple[int, ...]]:
        """Các tuple nằm trong elements, chứa một phần tử của containing (nếu có)"""
        idx = np.unique(np.asarray(elements, dtype=np.int64))
        if self.arity == 1:
            found = [(int(i),) for i in idx[self.data[idx]]]
        else:
            rows, cols = np.nonzero(self.data[np.ix_(idx, idx)])
            found = [(int(idx[r]), int(idx[c])) for r, c in zip(rows, cols)]
        if containing is not None:
            keep = set(containing)
            found = [t for t in found if not keep.isdisjoint(t)]
        return found

    def match(self, pattern: Pattern) -> Iterator[Tuple[int, ...]]:
        """Các tuple khớp pattern (None = vị trí tự do)"""
        if self.arity == 1:
            if pattern[0] is not None:
                if self.data[pattern[0]]:
                    yield (pattern[0],)
                return
            for i in np.flatnonzero(self.data):
                yield (int(i),)
            return
        a, b = pattern
        if a is not None and b is not None:
            if self.data[a, b]:
                yield (a, b)
        elif a is not None:
            for j in np.flatnonzero(self.data[a]):
                yield (a, int(j))
        elif b is not None:
            for i in np.flatnonzero(self.data[:, b]):
                yield (int(i), b)
        else:
            yield from self.tuples()

    def count(self) -> int:
        return int(self.data.sum())

    def copy(self) -> "DenseRelation":
        return DenseRelation(self.arity, self.size, self.data.copy())

    def __eq__(self, other) -> bool:
        if isinstance(other, (DenseRelation, SparseRelation)):
            return self.arity == other.arity and set(self.tuples()) == set(other.tuples())
        return NotImplemented


class SparseRelation:
    """Quan hệ arity ≥ 3: set các tuple, index theo từng phần tử"""

    def __init__(self, arity: int, size: int):
        self.arity = arity
        self.size = size
        self._tuples: Set[Tuple[int, ...]] = set()
        self._index: Dict[int, Set[Tuple[int, ...]]] = {}

    def holds(self, t: Tuple[int, ...]) -> bool:
        return t in self._tuples

    def add(self, t: Tuple[int, ...]) -> bool:
        if t in self._tuples:
            return False
        self._tuples.add(t)
        for e in set(t):
            self._index.setdefault(e, set()).add(t)
        return True

    def discard(self, t: Tuple[int, ...]) -> bool:
        if t not in self._tuples:
            return False
        self._tuples.remove(t)
        for e in set(t):
            self._index[e].discard(t)
        return True

    def tuples(self) -> List[Tuple[int, ...]]:
        return sorted(self._tuples)

    def containing(self, element: int) -> List[Tuple[int, ...]]:
        return sorted(self._index.get(element, ()))

    def among(self, elements: Sequence[int], containing: Optional[Iterable[int]] = None) -> List[Tuple[int, ...]]:
        inside = set(elements)
        found = set()
        for e in (inside if containing is None else set(containing)):
            found.update(t for t in self._index.get(e, ()) if inside.issuperset(t))
        return sorted(found)

    def match(self, pattern: Pattern) -> Iterator[Tuple[int, ...]]:
        fixed = [(i, v) for i, v in enumerate(pattern) if v is not None]
        if not fixed:
            yield from self.tuples()
            return
        pool = min((self._index.get(v, set()) for _, v in fixed), key=len)
        for t in sorted(pool):
            if all(t[i] == v for i, v in fixed):
                yield t

    def count(self) -> int:
        return len(self._tuples)

    def copy(self) -> "SparseRelation":
        clone = SparseRelation(self.arity, self.size)
        clone._tuples = set(self._tuples)
        clone._index = {e: set(ts) for e, ts in self._index.items()}
        return clone

    def __eq__(self, other) -> bool:
        if isinstance(other, (DenseRelation, SparseRelation)):
            return self.arity == other.arity and set(self.tuples()) == set(other.tuples())
        return NotImplemented


def make_relation(arity: int, size: int, tuples: Iterable[Tuple[int, ...]] = ()):
    """Chọn kiểu lưu trữ theo arity"""
    relation = DenseRelation(arity, size) if arity <= 2 else SparseRelation(arity, size)
    for t in tuples:
        relation.add(t)
    return relation
