"""
Saturation Module

Dựng mô hình hữu hạn U-biquitous cho câu GFU (và GFU+TG) từ một mô hình
hữu hạn bất kỳ của φ*.

Thuật toán:
1. φ* = φ ∧ (mọi phần tử có 1-type trong α)
         ∧ (mọi cặp 1-type có một cặp thực hiện nối U hai chiều)
         ∧ (mọi tuple guarded được nối U)
2. C = doubling của C_minus ⊨ φ*, B = union của 5 bản sao C,
   A₀ = union của (5K)² bản sao B, xếp thành bảng 5K × 5K
3. Với mỗi cặp (b₁, b₂) chưa nối U (thứ tự từ điển): b_s là phần tử thứ
   n_s của ô (k_s, ℓ_s); chọn t nhỏ nhất sao cho block C^{n₁,n₂,t} không
   chứa phần tử thứ k₁, ℓ₁, k₂, ℓ₂ của ô (n₁, n₂); copy mọi fact chứa
   b₁/b₂ từ A₀ (đã đóng băng) qua 𝔥: b_s ↦ e_s, đồng nhất trên block
4. Dừng khi mọi cặp đã nối U

Biến thể có hằng: harmonized doubling/union, phần có tên dùng chung.
Biến thể TG: không copy fact của quan hệ transitive.

Đánh số phần tử của A₀:
    named trước (N phần tử), sau đó N + (k·5K + ℓ)·5K + m·K + p
với (k, ℓ) là ô, m là block trong ô và p là vị trí trong phần không tên của C.
"""

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np
import pandas as pd

from src.analysis.finder import find_model, realized_types
from src.analysis.modelcheck import check_model
from src.config import Budgets, SaturationOptions
from src.exceptions import ConstructionError, FragmentError, SaturationError, TypeMismatchError
from src.logic.normalform import NormalFormSentence, SentenceBuilder, aux_closure_conjuncts
from src.logic.syntax import Atom, Eq, Var, conj, disj
from src.structures.operations import disjoint_union, doubling, harmonized_doubling, harmonized_union
from src.structures.structure import Fact, Structure
from src.structures.types import AtomicType, atomic_type, indistinguishable, is_guarded

logger = logging.getLogger(__name__)

BLOCKS_PER_CELL = 5


# ---------------------------------------------------------------------------
# φ*
# ---------------------------------------------------------------------------

def build_phi_star(
    nf: NormalFormSentence,
    alpha: Iterable[AtomicType],
    tg_mode: bool = False,
) -> NormalFormSentence:
    """
    φ* = φ ∧ ∀x ⋁α(x) ∧ ⋀_{α,α′} ∃xy (α(x) ∧ α′(y) ∧ U(x,y) ∧ U(y,x))
           ∧ ⋀_P ∀x̄ (P(x̄) ⇒ ⋀ U(xᵢ,xⱼ))

    ∃xy được mô phỏng bằng ∀∃-conjunct với witness guard ternary fresh.
    Ở chế độ TG, atom T(x,x) trong các type được thay bằng P_T(x) fresh,
    kèm hai conjunct liên kết P_T với T.

    Args:
        nf: Câu dạng chuẩn trên signature có U
        alpha: Tập 1-type (khác rỗng)
        tg_mode: Câu có ký hiệu transitive, xử lý như GF+TG

    Returns:
        NormalFormSentence trên signature mở rộng
    """
    sig = nf.signature
    universal = sig.universal_symbol
    if universal is None:
        raise FragmentError("phi* needs a signature with a universal symbol")
    types = sorted(set(alpha), key=lambda a: a.sort_key)
    if not types:
        raise ValueError("phi* needs a nonempty set of 1-types")
    for a in types:
        if a.arity != 1:
            raise TypeMismatchError(f"Expected 1-types, got a {a.arity}-type")

    x, y = Var("x"), Var("y")
    builder = SentenceBuilder(sig, tagged=nf.tg_mode, loops=tg_mode)
    builder.forall((x,), Eq(x, x), disj(a.as_formula((x,)) for a in types))
    for first, second in itertools.combinations_with_replacement(types, 2):
        body = conj([
            first.as_formula((x,)),
            second.as_formula((y,)),
            Atom(universal, (x, y)),
            Atom(universal, (y, x)),
        ])
        builder.exists((x, y), body, prefix="_Pair")
    builder.link_loops(x, y)
    builder.foralls.extend(aux_closure_conjuncts(builder.signature, universal, kind="plain", include_self=True))
    result = builder.build(nf.forall_exists_conjuncts, nf.forall_conjuncts, tg_mode=nf.tg_mode)
    logger.debug("phi* over %d 1-types: %d conjuncts", len(types), result.conjunct_count)
    return result


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------

def build_blocks(
    C_minus: Structure,
    constants: Optional[bool] = None,
    phi_star: Optional[NormalFormSentence] = None,
    transitive: bool = False,
) -> Tuple[Structure, Structure, Structure]:
    """
    C, B, A₀ từ một mô hình C_minus của φ*

    Args:
        C_minus: Mô hình (không cần U-biquitous) của φ*
        constants: Dùng phép dựng harmonized (mặc định: signature có hằng)
        phi_star: Nếu có, kiểm tra C_minus ⊨ φ* trước khi dựng
        transitive: Kiểm tra thêm tính bắc cầu khi kiểm tra C_minus

    Returns:
        (C, B, A₀)

    Raises:
        SaturationError: C_minus không thỏa φ*
    """
    if constants is None:
        constants = bool(C_minus.signature.constants)
    if phi_star is not None:
        report = check_model(C_minus, phi_star, transitive=transitive, limit=5)
        if not report:
            raise SaturationError(f"C_minus is not a model of phi*: {report.violations}")

    if constants:
        C = harmonized_doubling(C_minus)
        union = harmonized_union
    else:
        C = doubling(C_minus)
        union = disjoint_union
    B = union([C] * BLOCKS_PER_CELL)
    K = len(C.unnamed)
    if K == 0:
        return C, B, B.copy()
    A0 = union([B] * (BLOCKS_PER_CELL * K) ** 2)
    logger.info("Building blocks: |C| = %d, |B| = %d, |A0| = %d", C.size, B.size, A0.size)
    return C, B, A0


def select_entry_elements(
    C: Structure,
    alpha_k: AtomicType,
    alpha_l: AtomicType,
    constants: bool = False,
) -> Tuple[int, int]:
    """
    Cặp entry (e₁, e₂) trong C: tp(e₁) = α_k, tp(e₂) = α_ℓ, U hai chiều,
    không phân biệt được nếu α_k = α_ℓ

    Ưu tiên cặp ((b,0),(b,1)) khi hai type bằng nhau và ((b,0),(b′,0)) khi
    khác nhau; nếu nhãn của C không theo dạng doubling thì duyệt mọi cặp.

    Raises:
        ConstructionError: Không có cặp thỏa điều kiện
    """
    universal = C.signature.universal_symbol
    if universal is None:
        raise SaturationError("Entry elements need a universal symbol")
    if C.named and not constants:
        raise SaturationError("C has named elements; entry selection needs the constants variant")
    if alpha_k.named or alpha_l.named:
        raise SaturationError("Entry elements must have unnamed 1-types")
    unnamed = C.unnamed
    types = {e: atomic_type(C, (e,)) for e in unnamed}

    def valid(e1: int, e2: int) -> bool:
        if e1 == e2 or types[e1] != alpha_k or types[e2] != alpha_l:
            return False
        if not (C.holds(universal, (e1, e2)) and C.holds(universal, (e2, e1))):
            return False
        return alpha_k != alpha_l or indistinguishable(C, e1, e2)

    labelled = all(isinstance(C.labels[e], tuple) and len(C.labels[e]) == 2 for e in unnamed)
    if labelled:
        originals = sorted({C.labels[e][0] for e in unnamed if C.labels[e][1] == 0})
        if alpha_k == alpha_l:
            candidates = (((b, 0), (b, 1)) for b in originals)
        else:
            candidates = (((b, 0), (c, 0)) for b in originals for c in originals if b != c)
        for first, second in candidates:
            try:
                e1, e2 = C.index_of(first), C.index_of(second)
            except ValueError:
                continue
            if e1 in types and e2 in types and valid(e1, e2):
                return e1, e2
    for e1, e2 in itertools.permutations(unnamed, 2):
        if valid(e1, e2):
            return e1, e2
    raise ConstructionError(f"No entry pair for 1-types {alpha_k} / {alpha_l} in C")


# ---------------------------------------------------------------------------
# Trace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepRecord:
    """Một bước saturation"""

    step: int
    pair: Tuple[int, int]
    coordinates: Tuple[Tuple[int, int, int], Tuple[int, int, int]]
    block: int
    entry: Tuple[int, int]
    added: Tuple[Fact, ...] = ()
    u_pairs: int = 0


@dataclass
class SaturationTrace:
    """
    Trace của một lần saturation

    Attributes:
        block_size: K
        named_count: Số phần tử có tên
        size: |A₀|
        tg_mode: Bỏ qua quan hệ transitive khi copy
        entry_positions: (k mod K, ℓ mod K) → vị trí (p₁, p₂) của cặp entry trong C
        records: Các bước theo thứ tự
    """

    block_size: int
    named_count: int
    size: int
    tg_mode: bool = False
    entry_positions: Dict[Tuple[int, int], Tuple[int, int]] = field(default_factory=dict)
    records: List[StepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def header(self) -> dict:
        return {
            "block_size": self.block_size,
            "named_count": self.named_count,
            "size": self.size,
            "tg_mode": self.tg_mode,
            "entry_positions": [[k, l, p1, p2] for (k, l), (p1, p2) in sorted(self.entry_positions.items())],
        }

    def to_frame(self) -> pd.DataFrame:
        """Một dòng cho mỗi bước"""
        columns = ["step", "b1", "b2", "k1", "l1", "n1", "k2", "l2", "n2", "t", "e1", "e2", "added", "u_pairs"]
        rows = []
        for r in self.records:
            (k1, l1, n1), (k2, l2, n2) = r.coordinates
            rows.append([
                r.step, r.pair[0], r.pair[1], k1, l1, n1, k2, l2, n2,
                r.block, r.entry[0], r.entry[1], len(r.added), r.u_pairs,
            ])
        return pd.DataFrame(rows, columns=columns)


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------

@dataclass
class SaturationState:
    """
    Trạng thái A_i của quá trình saturation

    Attributes:
        structure: A_i (domain cố định qua mọi bước)
        frozen: Bản sao bất biến của A₀
        block_size: K
        named_count: N
        entries: (k, ℓ, m) → (e₁, e₂)
        entry_positions: (k mod K, ℓ mod K) → vị trí cặp entry trong C
        options: SaturationOptions
        step_count: Số bước đã thực hiện
        trace: Trace (các bước được ghi thêm vào)
        cursor: Dòng đầu tiên có thể còn thiếu U
        templates: Fact của A₀ trên block ∪ phần có tên chứa cặp entry, theo block
    """

    structure: Structure
    frozen: Structure
    block_size: int
    named_count: int
    entries: Dict[Tuple[int, int, int], Tuple[int, int]]
    entry_positions: Dict[Tuple[int, int], Tuple[int, int]]
    options: SaturationOptions = field(default_factory=SaturationOptions)
    step_count: int = 0
    trace: Optional[SaturationTrace] = None
    cursor: int = 0
    u_count: int = 0
    templates: Dict[Tuple[int, int, int, bool], List[Fact]] = field(default_factory=dict)

    @classmethod
    def from_positions(
        cls,
        A0: Structure,
        block_size: int,
        entry_positions: Dict[Tuple[int, int], Tuple[int, int]],
        options: Optional[SaturationOptions] = None,
    ) -> "SaturationState":
        """Trạng thái ban đầu từ A₀ và vị trí các cặp entry"""
        options = options or SaturationOptions()
        named_count = len(A0.named)
        K = block_size
        side = BLOCKS_PER_CELL * K
        if A0.size != named_count + side ** 3:
            raise SaturationError(f"A0 has {A0.size} elements, expected {named_count} + {side}^3")
        state = cls(
            structure=A0.copy(),
            frozen=A0.copy(),
            block_size=K,
            named_count=named_count,
            entries={},
            entry_positions=dict(entry_positions),
            options=options,
        )
        for k, l, m in itertools.product(range(side), range(side), range(BLOCKS_PER_CELL)):
            p1, p2 = entry_positions[(k % K, l % K)]
            base = state.element_id(k, l, m * K)
            state.entries[(k, l, m)] = (base + p1, base + p2)
        state.trace = SaturationTrace(K, named_count, A0.size, options.tg_mode, dict(entry_positions))
        state.u_count = state.structure.u_pair_count()
        return state

    @classmethod
    def from_blocks(cls, C: Structure, A0: Structure, options: Optional[SaturationOptions] = None) -> "SaturationState":
        """Chọn cặp entry cho mọi cặp vị trí rồi dựng trạng thái ban đầu"""
        options = options or SaturationOptions()
        unnamed = C.unnamed
        K = len(unnamed)
        position = {e: p for p, e in enumerate(unnamed)}
        types = [atomic_type(C, (e,)) for e in unnamed]
        chosen: Dict[Tuple[AtomicType, AtomicType], Tuple[int, int]] = {}
        positions: Dict[Tuple[int, int], Tuple[int, int]] = {}
        for p1, p2 in itertools.product(range(K), repeat=2):
            key = (types[p1], types[p2])
            if key not in chosen:
                e1, e2 = select_entry_elements(C, key[0], key[1], options.constants)
                chosen[key] = (position[e1], position[e2])
            positions[(p1, p2)] = chosen[key]
        logger.debug("Entry pairs chosen for %d pairs of 1-types", len(chosen))
        return cls.from_positions(A0, K, positions, options)

    # --------------------------------------------------------------
    # Coordinates
    # --------------------------------------------------------------

    @property
    def side(self) -> int:
        return BLOCKS_PER_CELL * self.block_size

    def element_id(self, k: int, l: int, n: int) -> int:
        """Phần tử thứ n của phần không tên trong ô (k, ℓ)"""
        side = self.side
        if not (0 <= k < side and 0 <= l < side and 0 <= n < side):
            raise SaturationError(f"Coordinates ({k}, {l}, {n}) are outside the {side} x {side} table")
        return self.named_count + (k * side + l) * side + n

    def locate(self, b: int) -> Tuple[int, int, int]:
        """(k, ℓ, n) của phần tử không tên b"""
        offset = int(b) - self.named_count
        side = self.side
        if offset < 0:
            raise SaturationError(f"Element {b} is named")
        if offset >= side ** 3:
            raise SaturationError(f"Element {b} is outside the table")
        cell, n = divmod(offset, side)
        k, l = divmod(cell, side)
        return k, l, n

    def block(self, k: int, l: int, m: int) -> range:
        start = self.element_id(k, l, m * self.block_size)
        return range(start, start + self.block_size)

    def cell(self, k: int, l: int) -> range:
        start = self.element_id(k, l, 0)
        return range(start, start + self.side)

    def template(self, k: int, l: int, m: int, tg_mode: bool) -> List[Fact]:
        """Fact của A₀ nằm trong C^{k,ℓ,m} ∪ phần có tên và chứa e₁ hoặc e₂"""
        key = (k, l, m, tg_mode)
        if key not in self.templates:
            frozen = self.frozen
            image = list(self.block(k, l, m)) + list(frozen.named)
            self.templates[key] = [
                (name, tup) for name, tup in frozen.facts_among(image, containing=self.entries[(k, l, m)])
                if not (tg_mode and frozen.signature.is_transitive(name))
            ]
        return self.templates[key]

    def next_pair(self) -> Optional[Tuple[int, int]]:
        """Cặp (b₁, b₂) nhỏ nhất theo thứ tự từ điển chưa có U(b₁, b₂)"""
        data = self.structure.relation(self.structure.signature.universal_symbol).data
        size = self.structure.size
        while self.cursor < size:
            missing = np.flatnonzero(~data[self.cursor])
            if missing.size:
                return self.cursor, int(missing[0])
            self.cursor += 1
        return None

    @property
    def u_pairs(self) -> int:
        return self.u_count


# ---------------------------------------------------------------------------
# One step
# ---------------------------------------------------------------------------

def choose_block(block_size: int, forbidden: Iterable[int]) -> int:
    """t nhỏ nhất để block t của ô không chứa vị trí nào trong forbidden"""
    positions = set(forbidden)
    for t in range(BLOCKS_PER_CELL):
        if not any(t * block_size <= p < (t + 1) * block_size for p in positions):
            return t
    raise SaturationError(f"No free block for forbidden positions {sorted(positions)}")


def _preimages(t: Tuple[int, ...], mapping: Dict[int, int]) -> Iterable[Tuple[int, ...]]:
    """Các ā với 𝔥(ā) = t chứa ít nhất một b (mapping: e_s → b_s)"""
    choices = [(e, mapping[e]) if e in mapping else (e,) for e in t]
    for candidate in itertools.product(*choices):
        if candidate != t:
            yield candidate


def saturation_step(
    state: SaturationState,
    b1: int,
    b2: int,
    tg_mode: Optional[bool] = None,
) -> SaturationState:
    """
    A_i → A_{i+1}: nối cặp (b₁, b₂) vào block C^{n₁,n₂,t}

    Args:
        state: Trạng thái hiện tại (được cập nhật tại chỗ)
        b1, b2: Cặp chưa có U(b₁, b₂)
        tg_mode: Ghi đè state.options.tg_mode

    Returns:
        Chính state

    Raises:
        SaturationError: Cặp đã nối U, chứa phần tử có tên, hoặc một điều
            kiện kiểm tra (ở chế độ kiểm tra) bị vi phạm
    """
    s = state.structure
    frozen = state.frozen
    options = state.options
    tg = options.tg_mode if tg_mode is None else tg_mode
    universal = s.signature.universal_symbol
    if b1 == b2:
        raise SaturationError(f"Element {b1} is not U-connected to itself")
    if s.holds(universal, (b1, b2)):
        raise SaturationError(f"Pair ({b1}, {b2}) is already U-connected")
    if s.is_named(b1) or s.is_named(b2):
        raise SaturationError(f"Pair ({b1}, {b2}) contains a named element")

    (k1, l1, n1), (k2, l2, n2) = state.locate(b1), state.locate(b2)
    t = choose_block(state.block_size, (k1, l1, k2, l2))
    e1, e2 = state.entries[(n1, n2, t)]
    preimage = {e1: b1, e2: b2}

    if options.check_every_step:
        # fact hiện có trên vùng phải khớp với A₀ qua 𝔥
        inverse = {b1: e1, b2: e2}
        region = list(state.block(n1, n2, t)) + list(s.named) + [b1, b2]
        for name, tup in s.facts_among(region, containing=(b1, b2)):
            if tg and s.signature.is_transitive(name):
                continue
            if not frozen.holds(name, tuple(inverse.get(e, e) for e in tup)):
                raise SaturationError(f"Fact {name}{tup} conflicts with the template block {t} of cell ({n1}, {n2})")

    new_facts: List[Fact] = []
    seen: Set[Fact] = set()
    for name, tup in state.template(n1, n2, t, tg):
        relation = s.relation(name)
        for candidate in _preimages(tup, preimage):
            fact = (name, candidate)
            if fact not in seen and not relation.holds(candidate):
                seen.add(fact)
                new_facts.append(fact)
    new_facts.sort()

    if options.check_every_step:
        for name, tup in new_facts:
            elements = sorted(set(tup))
            if len(elements) < 2 or is_guarded(s, elements):
                raise SaturationError(f"Step would change the type of the guarded tuple {tuple(elements)}")
    for name, tup in new_facts:
        s.relation(name).add(tup)

    if not (s.holds(universal, (b1, b2)) and s.holds(universal, (b2, b1))):
        raise SaturationError(f"Pair ({b1}, {b2}) is still not U-connected after the step")
    u_added = sum(1 for name, _ in new_facts if name == universal)
    if u_added == 0:
        raise SaturationError("U-pair count did not increase")
    state.u_count += u_added

    if options.check_every_step:
        for b in (b1, b2):
            if atomic_type(s, (b,)) != atomic_type(frozen, (b,)):
                raise SaturationError(f"1-type of element {b} changed")

    state.step_count += 1
    if state.trace is not None:
        state.trace.records.append(StepRecord(
            step=state.step_count,
            pair=(b1, b2),
            coordinates=((k1, l1, n1), (k2, l2, n2)),
            block=t,
            entry=(e1, e2),
            added=tuple(new_facts) if options.record_facts else (),
            u_pairs=state.u_count,
        ))
    logger.debug("Step %d: (%d, %d) -> cell (%d, %d) block %d, %d facts",
                 state.step_count, b1, b2, n1, n2, t, len(new_facts))
    return state


# ---------------------------------------------------------------------------
# Loop
# ---------------------------------------------------------------------------

def _check_state(state: SaturationState, phi_star: NormalFormSentence, touching=None) -> None:
    report = check_model(
        state.structure, phi_star, transitive=state.options.tg_mode and touching is None, touching=touching, limit=5
    )
    if not report:
        raise SaturationError(f"A_{state.step_count} is not a model of phi*: {report.violations}")


def run_saturation(
    state: SaturationState,
    phi_star: NormalFormSentence,
    max_steps: Optional[int] = None,
) -> SaturationState:
    """Vòng lặp saturation trên một trạng thái đã dựng"""
    options = state.options
    bound = state.structure.size ** 2
    if options.check_every_step or options.check_stride:
        _check_state(state, phi_star)
    while True:
        if max_steps is not None and state.step_count >= max_steps:
            warnings.warn(f"Saturation stopped after {state.step_count} steps; the structure is not U-biquitous yet")
            break
        pair = state.next_pair()
        if pair is None:
            break
        saturation_step(state, *pair)
        if state.step_count > bound:
            raise SaturationError(f"Saturation exceeded {bound} steps")
        if options.check_every_step:
            _check_state(state, phi_star, touching=pair)
        if options.check_stride and state.step_count % options.check_stride == 0:
            _check_state(state, phi_star)
        if state.step_count % 1000 == 0:
            logger.info("Saturation step %d: %d / %d U-pairs", state.step_count, state.u_pairs, bound)
    logger.info("Saturation finished after %d steps", state.step_count)
    return state


def saturate(
    C_minus: Structure,
    phi_star: NormalFormSentence,
    options: Optional[SaturationOptions] = None,
    max_steps: Optional[int] = None,
) -> Tuple[Structure, SaturationTrace]:
    """
    U-saturation: từ C_minus ⊨ φ* tới A_f U-biquitous, A_f ⊨ φ*

    Args:
        C_minus: Mô hình hữu hạn của φ*
        phi_star: φ*
        options: SaturationOptions
        max_steps: Dừng sớm (chỉ dùng để kiểm tra các bước đầu)

    Returns:
        (A_f, trace)
    """
    options = options or SaturationOptions(constants=bool(C_minus.signature.constants))
    C, _, A0 = build_blocks(C_minus, options.constants, phi_star, transitive=options.tg_mode)
    state = SaturationState.from_blocks(C, A0, options)
    run_saturation(state, phi_star, max_steps)
    result = state.structure
    if options.full_final_check:
        finished = max_steps is None or state.next_pair() is None
        report = check_model(result, phi_star, ubiquitous=finished, transitive=options.tg_mode, limit=5)
        if not report:
            raise SaturationError(f"A_f is not a U-biquitous model of phi*: {report.violations}")
    return result, state.trace


def replay_trace(
    A0: Structure,
    trace: SaturationTrace,
    phi_star: Optional[NormalFormSentence] = None,
    options: Optional[SaturationOptions] = None,
) -> Structure:
    """
    Dựng lại A_f từ A₀ và một trace

    Raises:
        SaturationError: Bước được replay khác với bước đã ghi
    """
    options = options or SaturationOptions(tg_mode=trace.tg_mode)
    state = SaturationState.from_positions(A0, trace.block_size, trace.entry_positions, options)
    for record in trace.records:
        saturation_step(state, *record.pair)
        replayed = state.trace.records[-1]
        if replayed.block != record.block or replayed.entry != record.entry:
            raise SaturationError(f"Step {record.step} replayed into a different block")
        if options.record_facts and record.added and replayed.added != record.added:
            raise SaturationError(f"Step {record.step} added different facts on replay")
    if phi_star is not None:
        _check_state(state, phi_star)
    return state.structure


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

@dataclass
class SaturationResult:
    """
    Kết quả saturation_pipeline

    Attributes:
        model: A_f
        trace: SaturationTrace
        seed: C_minus
        phi_star: φ*
        alpha: 1-type thực hiện trong mô hình U-biquitous ban đầu
        source: Mô hình U-biquitous nhỏ do finder tìm
    """

    model: Structure
    trace: SaturationTrace
    seed: Structure
    phi_star: NormalFormSentence
    alpha: FrozenSet[AtomicType]
    source: Structure

    def summary(self) -> pd.Series:
        return pd.Series({
            "seed_size": self.seed.size,
            "model_size": self.model.size,
            "steps": len(self.trace),
            "alpha": len(self.alpha),
            "facts": self.model.fact_count,
        })


def saturation_pipeline(
    nf: NormalFormSentence,
    budgets: Optional[Budgets] = None,
    tg_mode: bool = False,
    options: Optional[SaturationOptions] = None,
) -> Optional[SaturationResult]:
    """
    Mô hình U-biquitous A → α → φ* → C_minus → saturation → A_f ⊨ φ

    Args:
        nf: Câu dạng chuẩn (GFU, hoặc GFU+TG nếu tg_mode)
        budgets: Giới hạn cho finder
        tg_mode: Xử lý ký hiệu transitive
        options: SaturationOptions (mặc định theo signature và tg_mode)

    Returns:
        SaturationResult, hoặc None nếu không tìm được mô hình trong giới hạn
    """
    budgets = budgets or Budgets()
    source = find_model(nf, budgets.search_config(ubiquitous=True, transitive=tg_mode))
    if source is None:
        logger.info("No U-biquitous model within bound %d", budgets.find_max)
        return None
    alpha, _ = realized_types(source)
    phi_star = build_phi_star(nf, alpha, tg_mode=tg_mode)
    bound = min(budgets.find_max, budgets.max_saturation_seed)
    if bound == 0:
        warnings.warn("max_saturation_seed is 0; saturation skipped")
        return None
    C_minus = find_model(phi_star, budgets.search_config(transitive=tg_mode).replace(max_domain_size=bound))
    if C_minus is None:
        warnings.warn(f"phi* has no model with at most {bound} elements; saturation skipped")
        return None
    options = options or SaturationOptions(constants=bool(nf.signature.constants), tg_mode=tg_mode)
    model, trace = saturate(C_minus, phi_star, options)
    report = check_model(model, nf, ubiquitous=True, transitive=tg_mode, limit=5)
    if not report:
        raise ConstructionError(f"Saturated model does not satisfy the sentence: {report.violations}")
    logger.info("Saturation pipeline: |C_minus| = %d, |A_f| = %d, %d steps", C_minus.size, model.size, len(trace))
    return SaturationResult(model, trace, C_minus, phi_star, frozenset(alpha), source)
