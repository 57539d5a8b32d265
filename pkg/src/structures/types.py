"""
Types Module

Atomic ℓ-type của một tuple: tập literal cực đại, nhất quán trên các biến
x1…xℓ và các hằng. Dạng canonical:
    - phần tử lặp lại được biểu diễn bằng biến có chỉ số nhỏ nhất
      (kèm đẳng thức xj = xi)
    - phần tử có tên không thuộc tuple được biểu diễn bằng tên hằng nhỏ nhất
    - chỉ lưu atom dương; atom âm được suy ra từ signature

Hai type bằng nhau ⇔ bằng nhau về cú pháp.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from src.exceptions import StructureError
from src.logic.signature import Signature
from src.logic.syntax import Atom, Const, Eq, Formula, Not, Term, Var, conj, substitute
from src.structures.structure import Structure


def type_variables(arity: int) -> Tuple[Var, ...]:
    return tuple(Var(f"x{i + 1}") for i in range(arity))


@dataclass(frozen=True)
class AtomicType:
    """
    Atomic type

    Attributes:
        arity: ℓ
        positives: Các atom dương (trên biến canonical và hằng)
        equalities: Đẳng thức dương: xj = xi (i < j) và xi = c
        unspecified: Atom không xác định polarity (type rút gọn β⁻)
        external: Tên hằng (nhỏ nhất) của các phần tử có tên ngoài tuple
        signature: Signature sinh ra type (không tham gia so sánh)
    """

    arity: int
    positives: FrozenSet[Atom]
    equalities: FrozenSet[Eq] = frozenset()
    unspecified: FrozenSet[Atom] = frozenset()
    external: Tuple[str, ...] = ()
    signature: Signature = field(default=None, compare=False, hash=False, repr=False)

    # --------------------------------------------------------------
    # Terms
    # --------------------------------------------------------------

    @property
    def variables(self) -> Tuple[Var, ...]:
        return type_variables(self.arity)

    def representative(self, i: int) -> Var:
        """Biến canonical cho vị trí i (0-based)"""
        v = Var(f"x{i + 1}")
        for eq in self.equalities:
            if eq.left == v and isinstance(eq.right, Var):
                return eq.right
        return v

    @property
    def canonical_variables(self) -> Tuple[Var, ...]:
        return tuple(dict.fromkeys(self.representative(i) for i in range(self.arity)))

    def _external_constants(self) -> List[Const]:
        return [Const(c) for c in self.external]

    def admissible_atoms(self, constant_terms: Optional[Sequence[Const]] = None) -> List[Atom]:
        """Mọi atom trên biến canonical và các hằng bên ngoài"""
        if self.signature is None:
            raise StructureError("Type has no signature attached; negative literals are unknown")
        terms: List[Term] = list(self.canonical_variables)
        terms += list(constant_terms) if constant_terms is not None else self._external_constants()
        result = []
        for name, arity in self.signature.relations:
            for args in itertools.product(terms, repeat=arity):
                result.append(Atom(name, tuple(args)))
        return result

    def negatives(self, constant_terms: Optional[Sequence[Const]] = None) -> List[Atom]:
        specified = self.positives | self.unspecified
        return [a for a in self.admissible_atoms(constant_terms) if a not in specified]

    # --------------------------------------------------------------
    # Flags
    # --------------------------------------------------------------

    @property
    def guarded(self) -> bool:
        """Có literal dương chứa mọi biến (1-type luôn guarded qua x1 = x1)"""
        canonical = set(self.canonical_variables)
        if len(canonical) <= 1:
            return True
        return any(canonical <= set(a.free_vars) for a in self.positives)

    @property
    def non_degenerate(self) -> bool:
        """2-type chứa x1 ≠ x2"""
        return self.arity == 2 and len(self.canonical_variables) == 2

    @property
    def named(self) -> bool:
        """1-type của phần tử có tên (chứa x1 = c)"""
        return any(isinstance(eq.right, Const) for eq in self.equalities)

    # --------------------------------------------------------------
    # Transformations
    # --------------------------------------------------------------

    def as_formula(self, variables: Optional[Sequence[Var]] = None, include_equalities: bool = True) -> Formula:
        """
        Công thức không lượng từ mô tả type

        Args:
            variables: Biến thay cho x1…xℓ (mặc định chính x1…xℓ)
            include_equalities: Thêm các literal (bất) đẳng thức

        Returns:
            Hội các literal, thứ tự canonical
        """
        literals: List[Formula] = sorted(self.positives, key=str)
        literals += [Not(a) for a in sorted(self.negatives(), key=str)]
        if include_equalities:
            literals += sorted(self.equalities, key=str)
            canonical = self.canonical_variables
            for a, b in itertools.combinations(canonical, 2):
                literals.append(Not(Eq(a, b)))
            external = self._external_constants()
            for v in canonical:
                if not any(eq.left == v and isinstance(eq.right, Const) for eq in self.equalities):
                    literals += [Not(Eq(v, c)) for c in external]
        f = conj(literals)
        if variables is None:
            return f
        if len(variables) != self.arity:
            raise ValueError(f"Expected {self.arity} variables, got {len(variables)}")
        return substitute(f, dict(zip(self.variables, variables)))

    def inverse(self) -> "AtomicType":
        """Đổi chỗ x1, x2 của một 2-type"""
        if self.arity != 2:
            raise ValueError("inverse is defined for 2-types only")
        if not self.non_degenerate:
            return self
        x1, x2 = self.variables
        swap = {x1: x2, x2: x1}
        return AtomicType(
            2,
            frozenset(substitute(a, swap) for a in self.positives),
            frozenset(substitute(e, swap) for e in self.equalities),
            frozenset(substitute(a, swap) for a in self.unspecified),
            self.external,
            self.signature,
        )

    def project(self, position: int) -> "AtomicType":
        """1-type của phần tử ở vị trí position (0-based)"""
        v = self.representative(position)
        x1 = Var("x1")
        mapping = {v: x1}
        external = set(self.external)
        for eq in self.equalities:
            if isinstance(eq.right, Const) and eq.left != v:
                mapping.setdefault(eq.left, eq.right)
        for w in self.canonical_variables:
            if w not in mapping:
                continue
            if isinstance(mapping[w], Const):
                names = sorted(e.right.name for e in self.equalities if e.left == w and isinstance(e.right, Const))
                mapping[w] = Const(names[0])
                external.add(names[0])
        keep = lambda a: all(t in mapping for t in a.free_vars)
        return AtomicType(
            1,
            frozenset(substitute(a, mapping) for a in self.positives if keep(a)),
            frozenset(substitute(e, {v: x1}) for e in self.equalities if e.left == v and isinstance(e.right, Const)),
            frozenset(substitute(a, mapping) for a in self.unspecified if keep(a)),
            tuple(sorted(external)),
            self.signature,
        )

    def reduced(self, symbols: Sequence[str]) -> "AtomicType":
        """Bỏ các atom chéo (chứa hai biến khác nhau) của các ký hiệu cho trước"""
        def cross(a: Atom) -> bool:
            return a.relation in symbols and len(a.free_vars) > 1

        dropped = [a for a in self.admissible_atoms() if cross(a)]
        return AtomicType(
            self.arity,
            frozenset(a for a in self.positives if not cross(a)),
            self.equalities,
            self.unspecified | frozenset(dropped),
            self.external,
            self.signature,
        )

    def matches(self, other: "AtomicType") -> bool:
        """other (type đầy đủ) thỏa type riêng phần này"""
        if self.arity != other.arity or self.equalities != other.equalities:
            return False
        free = self.unspecified
        return {a for a in self.positives if a not in free} == {a for a in other.positives if a not in free}

    @property
    def sort_key(self) -> Tuple:
        return (
            self.arity,
            tuple(sorted(str(a) for a in self.positives)),
            tuple(sorted(str(e) for e in self.equalities)),
            tuple(sorted(str(a) for a in self.unspecified)),
        )

    def __str__(self) -> str:
        return str(self.as_formula()) if self.signature is not None else repr(self)


def transitive_free_reduction(beta: AtomicType) -> AtomicType:
    """
    β⁻: bỏ T(x1,x2), T(x2,x1) (cả hai polarity) cho mọi ký hiệu transitive T;
    T(x1,x1), T(x2,x2) được giữ lại
    """
    if beta.arity != 2:
        raise ValueError("transitive_free_reduction expects a 2-type")
    if beta.signature is None:
        raise StructureError("Type has no signature attached")
    return beta.reduced(sorted(beta.signature.transitive_symbols))


# ---------------------------------------------------------------------------
# Types realized in structures
# ---------------------------------------------------------------------------

def _check_tuple(s: Structure, elements: Sequence[int]) -> Tuple[int, ...]:
    result = tuple(int(e) for e in elements)
    for e in result:
        if not 0 <= e < s.size:
            raise StructureError(f"Element {e} is outside the domain of size {s.size}")
    return result


def atomic_type(s: Structure, elements: Sequence[int]) -> AtomicType:
    """
    tp_s(ā)

    Args:
        s: Structure
        elements: Tuple phần tử ā

    Returns:
        AtomicType canonical
    """
    elements = _check_tuple(s, elements)
    term_of: Dict[int, Term] = {}
    equalities = set()
    for i, e in enumerate(elements):
        v = Var(f"x{i + 1}")
        if e in term_of:
            equalities.add(Eq(v, term_of[e]))
        else:
            term_of[e] = v
    for name, e in sorted(s.constants.items()):
        if e in term_of and isinstance(term_of[e], Var):
            equalities.add(Eq(term_of[e], Const(name)))
    for name, e in sorted(s.constants.items()):
        term_of.setdefault(e, Const(name))

    universe = list(term_of)
    inside = set(universe)
    positives = set()
    for name, arity in s.signature.relations:
        relation = s.relation(name)
        if len(universe) ** arity <= 256:
            candidates = itertools.product(universe, repeat=arity)
            tuples = (t for t in candidates if relation.holds(t))
        else:
            seen = set()
            for e in universe:
                seen.update(relation.containing(e))
            tuples = (t for t in sorted(seen) if set(t) <= inside)
        for t in tuples:
            positives.add(Atom(name, tuple(term_of[e] for e in t)))
    external = tuple(sorted(t.name for t in term_of.values() if isinstance(t, Const)))
    return AtomicType(len(elements), frozenset(positives), frozenset(equalities), frozenset(), external, s.signature)


def is_guarded(s: Structure, elements: Sequence[int]) -> bool:
    """ā là một phần tử hoặc có fact chứa mọi phần tử của ā"""
    elements = _check_tuple(s, elements)
    distinct = set(elements)
    if len(distinct) <= 1:
        return True
    first = elements[0]
    for name in s.signature.relation_names:
        for t in s.relation(name).containing(first):
            if distinct <= set(t):
                return True
    return False


def indistinguishable(s: Structure, a: int, b: int) -> bool:
    """
    a, a′ không phân biệt được: mọi fact bất biến khi thay tùy ý các vị trí
    a / a′ cho nhau (và cùng tên hằng)
    """
    a, b = _check_tuple(s, (a, b))
    if a == b:
        return True
    if s.constant_names(a) != s.constant_names(b):
        return False
    pair = (a, b)
    for name in s.signature.relation_names:
        relation = s.relation(name)
        seen = set(relation.containing(a)) | set(relation.containing(b))
        for t in seen:
            positions = [i for i, e in enumerate(t) if e in pair]
            for choice in itertools.product(pair, repeat=len(positions)):
                swapped = list(t)
                for i, e in zip(positions, choice):
                    swapped[i] = e
                if not relation.holds(tuple(swapped)):
                    return False
    return True


def realize_type(t: AtomicType) -> Structure:
    """
    Structure nhỏ nhất thực hiện type t (không có hằng): mỗi biến canonical
    là một phần tử, fact lấy từ các atom dương
    """
    if t.signature is None:
        raise StructureError("Type has no signature attached")
    if t.external or t.named:
        raise StructureError("realize_type expects a type without constants")
    canonical = t.canonical_variables
    position = {v: i for i, v in enumerate(canonical)}
    facts = [(a.relation, tuple(position[v] for v in a.args)) for a in t.positives]
    return Structure(t.signature, len(canonical), facts)
