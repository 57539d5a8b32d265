"""
TG Construction Module

Dựng mô hình nhỏ cho câu GF+TG ở dạng TG mở rộng, từ một cặp tập type
(α, β):

1. φ_B: phần ntr của câu, mọi ∀-conjunct, T thu về đường chéo, mỗi β⁻
   được thực hiện, mỗi α được thực hiện và chỉ các α (xử lý như GF)
2. φ_C: phần tr của câu trên hai biến x, y, các ∀-conjunct có guard
   transitive, Aux phủ mọi cặp guarded, mỗi cặp Aux thực hiện một β⁻
3. B ⊨ φ_B, C ⊨ φ_C (finder) → B*, C* có cùng số lần thực hiện mỗi 1-type
4. Lưới D = K × K (K = |B*|): hàng là bản sao của B*, cột là bản sao của C*,
   tp(k, ℓ) = α_{(k+ℓ) mod K}
5. A′ = 3K bản sao của D chia thành ba phần A₀, A₁, A₂; mỗi cặp dọc guarded
   trong A_i được nối vào một hàng chưa dùng của A_{(i+1) mod 3}

Phần tử (k, ℓ) của D có id k·K + ℓ; phần tử e của bản sao c trong A′ có
id c·K² + e.

Ngoài ra: reduce_two_types gộp các 2-type tương đương trên một mô hình
hai biến, ramified của φ_C.
"""

import itertools
import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from typing import Deque, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from src.analysis.finder import find_model, realized_types, type_counts
from src.analysis.modelcheck import check_model, evaluate
from src.config import SearchConfig
from src.exceptions import ConstructionError, FragmentError, GridError, TypeMismatchError
from src.logic.normalform import (
    ForallConjunct, ForallExistsConjunct, NormalFormSentence, SentenceBuilder,
)
from src.logic.syntax import And, Atom, Eq, Var, disj, substitute
from src.structures.operations import disjoint_union
from src.structures.structure import Fact, Structure
from src.structures.types import (
    AtomicType, atomic_type, is_guarded, realize_type, transitive_free_reduction,
)

logger = logging.getLogger(__name__)

X, Y = Var("x"), Var("y")


# ---------------------------------------------------------------------------
# φ_B and φ_C
# ---------------------------------------------------------------------------

def _check_types(nf: NormalFormSentence, alpha: Iterable[AtomicType], beta: Iterable[AtomicType]):
    sig = nf.signature
    aux = sig.aux_symbol
    if aux is None:
        raise FragmentError("Sentence is not in enhanced TG normal form (no Aux symbol)")
    alpha = sorted(set(alpha), key=lambda a: a.sort_key)
    beta = sorted(set(beta), key=lambda b: b.sort_key)
    if not alpha:
        raise ValueError("Expected a nonempty set of 1-types")
    for a in alpha:
        if a.arity != 1:
            raise TypeMismatchError(f"Expected 1-types, got a {a.arity}-type")
    x1, x2 = Var("x1"), Var("x2")
    for b in beta:
        if b.arity != 2 or not b.non_degenerate:
            raise TypeMismatchError(f"Expected non-degenerate 2-types: {b}")
        if not b.guarded:
            raise TypeMismatchError(f"2-type is not guarded: {b}")
        if Atom(aux, (x1, x2)) not in b.positives:
            raise TypeMismatchError(f"2-type does not contain {aux}(x1,x2): {b}")
    return alpha, beta


def _reductions(beta: Sequence[AtomicType]) -> List[AtomicType]:
    reduced = {transitive_free_reduction(b) for b in beta}
    return sorted(reduced, key=lambda b: b.sort_key)


def build_phi_B(
    nf: NormalFormSentence,
    alpha: Iterable[AtomicType],
    beta: Iterable[AtomicType],
) -> NormalFormSentence:
    """
    φ_B = (∀∃ntr) ∧ (∀) ∧ ⋀_T ∀xy (T(x,y) ⇒ x = y) ∧ ⋀_β ∃xy β⁻(x,y)
          ∧ ⋀_α ∃x α(x) ∧ ∀x ⋁α(x)

    Args:
        nf: Câu ở dạng TG mở rộng
        alpha: Tập 1-type trên signature của nf
        beta: Tập 2-type guarded, non-degenerate

    Returns:
        Câu dạng chuẩn xử lý như GF (tg_mode=False, không có tag)

    Raises:
        TypeMismatchError: Type không có dạng yêu cầu
    """
    alpha, beta = _check_types(nf, alpha, beta)
    sig = nf.signature
    builder = SentenceBuilder(sig, loops=True)
    for name in sorted(sig.transitive_symbols):
        builder.forall((X, Y), Atom(name, (X, Y)), Eq(X, Y))
    for reduced in _reductions(beta):
        builder.exists((X, Y), reduced.as_formula((X, Y)), prefix="_Beta")
    for a in alpha:
        builder.exists((X,), a.as_formula((X,)), prefix="_Alpha")
    builder.forall((X,), Eq(X, X), disj(a.as_formula((X,)) for a in alpha))
    builder.link_loops(X, Y)
    ntr = [replace(c, tag=None) for c in nf.ntr_conjuncts()]
    result = builder.build(ntr, nf.forall_conjuncts, tg_mode=False)
    logger.debug("phi_B: %d conjuncts over %d relations", result.conjunct_count, len(result.signature.relations))
    return result


def _rename(c, mapping: Dict[Var, Var]):
    if isinstance(c, ForallExistsConjunct):
        return ForallExistsConjunct(
            tuple(mapping[v] for v in c.variables),
            substitute(c.guard, mapping),
            tuple(mapping[v] for v in c.witnesses),
            substitute(c.witness_guard, mapping),
            substitute(c.matrix, mapping),
            c.tag,
        )
    return ForallConjunct(
        tuple(mapping[v] for v in c.variables),
        substitute(c.guard, mapping),
        substitute(c.matrix, mapping),
        c.kind,
    )


def pair_tuples(arity: int) -> List[Tuple[Var, ...]]:
    """S_P: các tuple độ dài arity trên {x, y} dùng cả hai biến"""
    return [t for t in itertools.product((X, Y), repeat=arity) if X in t and Y in t]


def build_phi_C(
    nf: NormalFormSentence,
    alpha: Iterable[AtomicType],
    beta: Iterable[AtomicType],
) -> NormalFormSentence:
    """
    φ_C = (∀∃tr) ∧ (∀ với guard transitive) ∧ ⋀_P ⋀_{x̄∈S_P} ∀xy (P(x̄) ⇒ Aux(x,y))
          ∧ ∀xy (Aux(x,y) ⇒ (x = y ∨ ⋁β⁻(x,y))) ∧ α-conjunct

    Mọi conjunct dùng đúng hai biến x, y.

    Args:
        nf: Câu ở dạng TG mở rộng
        alpha: Tập 1-type
        beta: Tập 2-type guarded, non-degenerate

    Returns:
        Câu GF²+TG (tg_mode=True)
    """
    alpha, beta = _check_types(nf, alpha, beta)
    sig = nf.signature
    aux = sig.aux_symbol
    builder = SentenceBuilder(sig, tagged=True, loops=True)

    tr = []
    for c in nf.tr_conjuncts():
        tr.append(_rename(c, {c.variables[0]: X, c.witnesses[0]: Y}))
    foralls = []
    for c in nf.forall_conjuncts:
        if c.kind == "aux" or not (isinstance(c.guard, Atom) and sig.is_transitive(c.guard.relation)):
            continue
        foralls.append(_rename(c, dict(zip(c.variables, (X, Y)))))

    for name, arity in sig.relations:
        for t in pair_tuples(arity):
            if name == aux and t == (X, Y):
                continue
            builder.forall((X, Y), Atom(name, t), Atom(aux, (X, Y)), kind="aux")
    options = [Eq(X, Y)] + [reduced.as_formula((X, Y)) for reduced in _reductions(beta)]
    builder.forall((X, Y), Atom(aux, (X, Y)), disj(options))
    for a in alpha:
        builder.exists((X,), a.as_formula((X,)), anchor=Y, prefix="_Alpha")
    builder.forall((X,), Eq(X, X), disj(a.as_formula((X,)) for a in alpha))
    builder.link_loops(X, Y)
    result = builder.build(tr, foralls, tg_mode=True)
    logger.debug("phi_C: %d conjuncts", result.conjunct_count)
    return result


def is_two_variable(nf: NormalFormSentence) -> bool:
    """Mọi conjunct chỉ dùng các biến x, y"""
    allowed = {X, Y}
    for c in nf.forall_exists_conjuncts:
        used = set(c.variables) | set(c.witnesses) | c.guard.free_vars | c.witness_guard.free_vars
        if not used <= allowed:
            return False
    for c in nf.forall_conjuncts:
        if not (set(c.variables) | c.guard.free_vars) <= allowed:
            return False
    return True


def interpret_fresh_symbols(s: Structure, derived: NormalFormSentence) -> Structure:
    """
    Mở rộng s lên signature của φ_B / φ_C / φ*

    - P_T(a) ⇔ T(a,a)
    - guard G(z, ȳ) của một ∃ được mô phỏng: đúng với mọi z và mọi ȳ
      thỏa thân của ∃

    Raises:
        ConstructionError: Có ký hiệu fresh không thuộc hai loại trên
    """
    fresh = [name for name in derived.signature.relation_names if not s.signature.has_relation(name)]
    result = s.expand(s.signature.extend({name: derived.signature.arity(name) for name in fresh}))
    loops = {}
    existential = {}
    for c in derived.forall_exists_conjuncts:
        wg = c.witness_guard
        if (
            isinstance(c.guard, Atom) and c.guard.relation in fresh
            and isinstance(wg, Atom) and s.signature.is_transitive(wg.relation)
        ):
            loops[c.guard.relation] = wg.relation
        elif isinstance(c.guard, Eq) and isinstance(wg, Atom) and wg.relation in fresh:
            existential[wg.relation] = c
    unknown = set(fresh) - set(loops) - set(existential)
    if unknown:
        raise ConstructionError(f"Cannot interpret fresh symbols {sorted(unknown)}")

    for name, transitive in loops.items():
        for a in s.domain:
            if s.holds(transitive, (a, a)):
                result.add(name, (a,))
    for name, c in sorted(existential.items()):
        for values in itertools.product(s.domain, repeat=len(c.witnesses)):
            if evaluate(result, c.matrix, dict(zip(c.witnesses, values))):
                for z in s.domain:
                    result.add(name, (z,) + values)
    return result


# ---------------------------------------------------------------------------
# B*, C*
# ---------------------------------------------------------------------------

def common_signature(B: Structure, C: Structure):
    names = [n for n in B.signature.relation_names if C.signature.has_relation(n)]
    return B.signature.restrict(names)


def adjoin_copy(s: Structure, a: int) -> Structure:
    """Thêm phần tử b mới sao cho (A ∖ {a}) ∪ {b} ≅ A; không có fact nối a, b"""
    b = s.size
    result = Structure(s.signature, s.size + 1, s.facts(), s.constants, list(s.labels) + [("copy", s.labels[a])])
    for name, t in s.facts_containing(a):
        result.add(name, tuple(b if e == a else e for e in t))
    return result


def grid_side(B: Structure, C: Structure, signature=None) -> int:
    """K = |B*| = |C*| mà equalize_realizations sẽ cho ra"""
    sigma = signature or common_signature(B, C)
    return max(type_counts(B.reduct(sigma)).values()) * C.size


def equalize_realizations(B: Structure, C: Structure, signature=None) -> Tuple[Structure, Structure]:
    """
    B*, C* với mỗi 1-type có cùng số lần thực hiện

    C* là m bản sao của C (m = số lần thực hiện lớn nhất của một 1-type
    trong B); B* thêm các bản sao phần tử của B cho tới khi khớp C*.
    1-type được so trên σ, không trên ký hiệu mới của φ_B, φ_C.

    Args:
        B, C: Mô hình của φ_B và φ_C
        signature: σ (mặc định: các quan hệ chung của B, C)

    Returns:
        (B*, C*) trên signature riêng của B và C

    Raises:
        ConstructionError: Tập 1-type thực hiện trong B và C khác nhau
    """
    sigma = signature or common_signature(B, C)
    counts_B = type_counts(B.reduct(sigma))
    counts_C = type_counts(C.reduct(sigma))
    if set(counts_B) != set(counts_C):
        raise ConstructionError("B and C realize different sets of 1-types")
    m = max(counts_B.values())
    C_star = disjoint_union([C] * m)
    B_star = B
    reduct = B.reduct(sigma)
    pattern = {}
    for e in B.domain:
        pattern.setdefault(atomic_type(reduct, (e,)), e)
    for t in sorted(counts_B, key=lambda t: t.sort_key):
        for _ in range(m * counts_C[t] - counts_B[t]):
            B_star = adjoin_copy(B_star, pattern[t])
    logger.info("Equalized realizations: m = %d, |B*| = |C*| = %d", m, C_star.size)
    return B_star, C_star


# ---------------------------------------------------------------------------
# Grid D
# ---------------------------------------------------------------------------

@dataclass
class GridStructure:
    """
    Lưới D

    Attributes:
        side: K
        structure: D trên σ
        row_source: row_source[k, ℓ] = phần tử của B* ứng với (k, ℓ)
        column_source: column_source[k, ℓ] = phần tử của C* ứng với (k, ℓ)
        alpha: α_i = tp_{B*}(b_i)
        B_star, C_star: Reduct của B*, C* về σ
    """

    side: int
    structure: Structure
    row_source: np.ndarray
    column_source: np.ndarray
    alpha: Tuple[AtomicType, ...]
    B_star: Structure
    C_star: Structure

    def element(self, k: int, l: int) -> int:
        if not (0 <= k < self.side and 0 <= l < self.side):
            raise GridError(f"Cell ({k}, {l}) is outside the {self.side} x {self.side} grid")
        return k * self.side + l

    def coordinates(self, e: int) -> Tuple[int, int]:
        if not 0 <= e < self.side ** 2:
            raise GridError(f"Element {e} is outside the grid")
        return divmod(int(e), self.side)

    def row(self, k: int) -> List[int]:
        return [self.element(k, l) for l in range(self.side)]

    def column(self, l: int) -> List[int]:
        return [self.element(k, l) for k in range(self.side)]

    def is_vertical(self, elements: Iterable[int]) -> bool:
        return len({self.coordinates(e)[1] for e in elements}) <= 1

    def is_horizontal(self, elements: Iterable[int]) -> bool:
        return len({self.coordinates(e)[0] for e in elements}) <= 1

    def distinct_types(self) -> List[AtomicType]:
        return sorted(set(self.alpha), key=lambda t: t.sort_key)

    def type_grid(self) -> np.ndarray:
        """Ma trận K × K: chỉ số (trong distinct_types) của tp_D(k, ℓ)"""
        index = {t: i for i, t in enumerate(self.distinct_types())}
        grid = np.zeros((self.side, self.side), dtype=int)
        for k, l in itertools.product(range(self.side), repeat=2):
            grid[k, l] = index[atomic_type(self.structure, (self.element(k, l),))]
        return grid

    def vertical_pairs(self) -> List[Tuple[int, int]]:
        """Các cặp dọc guarded (u < v) gồm hai phần tử khác nhau"""
        pairs = set()
        for _, t in self.structure.iter_facts():
            distinct = sorted(set(t))
            if len(distinct) == 2 and self.is_vertical(distinct):
                pairs.add((distinct[0], distinct[1]))
        return sorted(pairs)


def build_D(B_star: Structure, C_star: Structure, signature=None) -> GridStructure:
    """
    Dựng lưới D từ B*, C*

    Args:
        B_star, C_star: |B*| = |C*| = K, mỗi 1-type có cùng số lần thực hiện
        signature: σ (mặc định: các quan hệ chung của B*, C*)

    Returns:
        GridStructure

    Raises:
        GridError: Kích thước hoặc số lần thực hiện các 1-type khác nhau
    """
    sigma = signature or common_signature(B_star, C_star)
    if B_star.size != C_star.size:
        raise GridError(f"|B*| = {B_star.size} but |C*| = {C_star.size}")
    if sigma.constants:
        raise GridError("The grid construction needs a constant-free signature")
    B = B_star.reduct(sigma)
    C = C_star.reduct(sigma)
    K = B.size
    alpha = tuple(atomic_type(B, (b,)) for b in B.domain)

    pools: Dict[AtomicType, Deque[int]] = defaultdict(deque)
    for c in C.domain:
        pools[atomic_type(C, (c,))].append(c)
    if {t: len(q) for t, q in pools.items()} != dict(type_counts(B)):
        raise GridError("B* and C* realize the 1-types a different number of times")

    row_source = np.zeros((K, K), dtype=int)
    column_source = np.zeros((K, K), dtype=int)
    for k, l in itertools.product(range(K), repeat=2):
        row_source[k, l] = (k + l) % K
    for l in range(K):
        queues = {t: deque(q) for t, q in pools.items()}
        for k in range(K):
            column_source[k, l] = queues[alpha[(k + l) % K]].popleft()

    D = Structure(sigma, K * K, labels=[(k, l) for k in range(K) for l in range(K)])
    for k in range(K):
        position = {int(row_source[k, l]): k * K + l for l in range(K)}
        for name, t in B.iter_facts():
            D.add(name, tuple(position[e] for e in t))
    for l in range(K):
        position = {int(column_source[k, l]): k * K + l for k in range(K)}
        for name, t in C.iter_facts():
            D.add(name, tuple(position[e] for e in t))
    logger.info("Grid D: K = %d, %d facts", K, D.fact_count)
    return GridStructure(K, D, row_source, column_source, alpha, B, C)


# ---------------------------------------------------------------------------
# A′
# ---------------------------------------------------------------------------

def reduced_pair_type(s: Structure, a1: int, a2: int) -> AtomicType:
    return transitive_free_reduction(atomic_type(s, (a1, a2)))


def find_template(B_star: Structure, reduced: AtomicType) -> Tuple[int, int]:
    """
    Cặp (a₁, a₂) nhỏ nhất của B* có β⁻ bằng reduced

    Raises:
        GridError: Không có cặp nào (φ_B chưa đòi β⁻ này)
    """
    for a1, a2 in itertools.permutations(B_star.domain, 2):
        if is_guarded(B_star, (a1, a2)) and reduced_pair_type(B_star, a1, a2) == reduced:
            return a1, a2
    raise GridError(f"No template pair realizes {reduced}")


def connect_pair_to_row(
    target: Structure,
    b1: int,
    b2: int,
    row: Sequence[int],
    a1: int,
    a2: int,
) -> List[Fact]:
    """
    Nối cặp (b₁, b₂) vào hàng E theo mẫu (a₁, a₂)

    Với mỗi quan hệ không transitive P và tuple ā trên {b₁,b₂} ∪ (E ∖ {a₁,a₂})
    chứa ít nhất một b: P[ā] ⇔ E ⊨ P[𝔥(ā)], 𝔥: b_s ↦ a_s.

    Returns:
        Các fact được thêm (đã sắp xếp)
    """
    E = set(row)
    if a1 not in E or a2 not in E:
        raise GridError(f"Template pair ({a1}, {a2}) is not in the row")
    if b1 in E or b2 in E:
        raise GridError(f"Pair ({b1}, {b2}) already lies in the row")
    pattern = {a1: b1, a2: b2}
    added = []
    for a in (a1, a2):
        for name, t in target.facts_containing(a):
            if target.signature.is_transitive(name):
                continue
            if not set(t) <= E or set(t) <= {a1, a2}:
                continue
            image = tuple(pattern.get(e, e) for e in t)
            if target.add(name, image):
                added.append((name, image))
    return sorted(added)


@dataclass(frozen=True)
class RowAllocation:
    """Cặp dọc pair của cột column được nối vào hàng row theo mẫu template"""

    pair: Tuple[int, int]
    column: Tuple[int, int]
    row: Tuple[int, int]
    template: Tuple[int, int]
    added: int = 0


@dataclass
class SmallModel:
    """
    Kết quả build_small_model

    Attributes:
        structure: A′ trên σ
        grid: Lưới D
        allocations: Nhật ký nối cặp dọc vào hàng
    """

    structure: Structure
    grid: GridStructure
    allocations: List[RowAllocation] = field(default_factory=list)

    @property
    def side(self) -> int:
        return self.grid.side

    @property
    def copies(self) -> int:
        return 3 * self.grid.side

    def part(self, copy: int) -> int:
        return copy // self.grid.side

    def summary(self) -> pd.Series:
        return pd.Series({
            "K": self.side,
            "size": self.structure.size,
            "facts": self.structure.fact_count,
            "connections": len(self.allocations),
        })


def small_model_from_blocks(nf: NormalFormSentence, B: Structure, C: Structure) -> SmallModel:
    """
    A′ từ B ⊨ φ_B và C ⊨ φ_C

    Raises:
        GridError: Hết hàng để nối hoặc thiếu mẫu
        ConstructionError: A′ không thỏa nf
    """
    sigma = nf.signature
    B_star, C_star = equalize_realizations(B, C, sigma)
    grid = build_D(B_star, C_star, sigma)
    K = grid.side
    cell = K * K
    A = disjoint_union([grid.structure] * (3 * K))

    templates: Dict[AtomicType, Tuple[int, int]] = {}
    pairs = grid.vertical_pairs()
    allocations: List[RowAllocation] = []
    for copy in range(3 * K):
        part = copy // K
        target_copies = range(((part + 1) % 3) * K, ((part + 1) % 3 + 1) * K)
        rows = [(c, k) for c in target_copies for k in range(K)]
        used: Dict[int, Set[Tuple[int, int]]] = defaultdict(set)
        for u, v in pairs:
            l = grid.coordinates(u)[1]
            free = [r for r in rows if r not in used[l]]
            if not free:
                raise GridError(f"No unused row left for column {l} of copy {copy}")
            c, k = free[0]
            used[l].add((c, k))
            reduced = reduced_pair_type(grid.structure, u, v)
            if reduced not in templates:
                templates[reduced] = find_template(grid.B_star, reduced)
            i1, i2 = templates[reduced]
            base = c * cell
            a1 = base + grid.element(k, (i1 - k) % K)
            a2 = base + grid.element(k, (i2 - k) % K)
            row = [base + e for e in grid.row(k)]
            b1, b2 = copy * cell + u, copy * cell + v
            added = connect_pair_to_row(A, b1, b2, row, a1, a2)
            allocations.append(RowAllocation((b1, b2), (copy, l), (c, k), (a1, a2), len(added)))
    logger.info("Small model: |A'| = %d, %d connections", A.size, len(allocations))

    report = check_model(A, nf, transitive=True, limit=5)
    if not report:
        raise ConstructionError(f"A' is not a model of the sentence: {report.violations}")
    return SmallModel(A, grid, allocations)


def build_small_model(
    nf: NormalFormSentence,
    alpha: Iterable[AtomicType],
    beta: Iterable[AtomicType],
    cfg: Optional[SearchConfig] = None,
) -> SmallModel:
    """
    Tìm B ⊨ φ_B, C ⊨ φ_C bằng finder rồi dựng A′

    Args:
        nf: Câu ở dạng TG mở rộng
        alpha, beta: Tập type
        cfg: Cấu hình finder (giới hạn domain, seed)

    Returns:
        SmallModel với |A′| = 3K³

    Raises:
        ConstructionError: Finder không tìm được B hoặc C
    """
    cfg = cfg or SearchConfig()
    alpha, beta = list(alpha), list(beta)
    phi_B = build_phi_B(nf, alpha, beta)
    phi_C = build_phi_C(nf, alpha, beta)
    B = find_model(phi_B, cfg.replace(ubiquitous=False, transitive=False))
    if B is None:
        raise ConstructionError(f"phi_B has no model with at most {cfg.max_domain_size} elements")
    C = find_model(phi_C, cfg.replace(ubiquitous=False, transitive=True,
                                      max_distinct_elements_per_fact=2, ramified=True))
    if C is None:
        raise ConstructionError(f"phi_C has no model with at most {cfg.max_domain_size} elements")
    return small_model_from_blocks(nf, B, C)


# ---------------------------------------------------------------------------
# Reducing the number of 2-types
# ---------------------------------------------------------------------------

@dataclass
class TypeReduction:
    """
    Báo cáo reduce_two_types

    Attributes:
        class_count: Số lớp tương đương
        distinguished: Lớp → 2-type đại diện
        before: Các 2-type guarded, non-degenerate trước khi gộp
        after: ... sau khi gộp
        changed_pairs: Số cặp (a < b) được viết lại
    """

    class_count: int
    distinguished: Dict[Tuple, AtomicType]
    before: FrozenSet[AtomicType]
    after: FrozenSet[AtomicType]
    changed_pairs: int = 0

    def summary(self) -> pd.Series:
        return pd.Series({
            "classes": self.class_count,
            "before": len(self.before),
            "after": len(self.after),
            "changed_pairs": self.changed_pairs,
        })


def _witness_profile(beta: AtomicType, conjuncts: Sequence[ForallExistsConjunct]) -> Tuple[bool, ...]:
    """Với mỗi ∀∃-conjunct một biến ngoài, một witness: cặp có là witness theo hai chiều"""
    s = realize_type(beta)
    profile = []
    for c in conjuncts:
        body = And(c.witness_guard, c.matrix)
        x, y = c.variables[0], c.witnesses[0]
        profile.append(evaluate(s, body, {x: 0, y: 1}))
        profile.append(evaluate(s, body, {x: 1, y: 0}))
    return tuple(profile)


def _class_key(beta: AtomicType, conjuncts) -> Tuple:
    x1, x2 = Var("x1"), Var("x2")
    transitive = beta.signature.transitive_symbols
    first = frozenset(str(a) for a in beta.positives if a.free_vars == {x1})
    second = frozenset(str(a) for a in beta.positives if a.free_vars == {x2})
    links = frozenset(str(a) for a in beta.positives if a.relation in transitive and len(a.free_vars) == 2)
    return (tuple(sorted(first)), tuple(sorted(second)), tuple(sorted(links)), _witness_profile(beta, conjuncts))


def _cross_facts(beta: AtomicType, a: int, b: int) -> List[Fact]:
    position = {Var("x1"): a, Var("x2"): b}
    return [
        (atom.relation, tuple(position[v] for v in atom.args))
        for atom in sorted(beta.positives, key=str)
        if len(atom.free_vars) == 2
    ]


def reduce_two_types(C: Structure, phi_C: NormalFormSentence) -> Tuple[Structure, TypeReduction]:
    """
    Gộp các 2-type tương đương của C

    β₁ ∼ β₂ khi cùng 1-type hai đầu, cùng các liên kết transitive và cùng
    cung cấp witness cho các ∀∃-conjunct. Mỗi lớp có một đại diện (nhỏ nhất
    theo sort_key); lớp của β⁻¹ nhận đại diện là nghịch đảo. Mọi cặp có type
    trong lớp được viết lại thành đại diện của lớp.

    Args:
        C: Mô hình hai biến, ramified của phi_C, không có hằng
        phi_C: Câu hai biến

    Returns:
        (C′, TypeReduction)
    """
    if C.signature.constants:
        raise ConstructionError("reduce_two_types needs a constant-free structure")
    conjuncts = [c for c in phi_C.forall_exists_conjuncts if len(c.variables) == 1 and len(c.witnesses) == 1]
    _, before = realized_types(C)

    classes: Dict[Tuple, List[AtomicType]] = defaultdict(list)
    key_of: Dict[AtomicType, Tuple] = {}
    for beta in sorted(before, key=lambda b: b.sort_key):
        key = _class_key(beta, conjuncts)
        key_of[beta] = key
        classes[key].append(beta)

    distinguished: Dict[Tuple, AtomicType] = {}
    for key in sorted(classes):
        if key in distinguished:
            continue
        members = classes[key]
        symmetric = [b for b in members if b.inverse() == b]
        chosen = symmetric[0] if symmetric else members[0]
        distinguished[key] = chosen
        distinguished.setdefault(key_of[chosen.inverse()], chosen.inverse())

    result = C.copy()
    changed = 0
    pairs = set()
    for _, t in C.iter_facts():
        distinct = sorted(set(t))
        if len(distinct) == 2:
            pairs.add((distinct[0], distinct[1]))
    for a, b in sorted(pairs):
        current = atomic_type(C, (a, b))
        target = distinguished[key_of[current]]
        if target == current:
            continue
        for name, t in C.facts_containing(a):
            if set(t) == {a, b}:
                result.discard(name, t)
        for name, t in _cross_facts(target, a, b):
            result.add(name, t)
        changed += 1

    _, after = realized_types(result)
    logger.info("Two-type reduction: %d classes, %d -> %d 2-types", len(classes), len(before), len(after))
    report = TypeReduction(len(classes), distinguished, before, after, changed)
    return result, report
