"""
Normal Form Module

Chuẩn hóa câu về dạng hội của các ∀∃-conjunct và ∀-conjunct:

    ⋀ᵢ ∀x̄ (γᵢ(x̄) ⇒ ∃ȳ (γ′ᵢ(x̄,ȳ) ∧ ψᵢ(x̄,ȳ)))  ∧  ⋀ⱼ ∀x̄ (γⱼ(x̄) ⇒ ψⱼ(x̄))

Cách làm: đưa về NNF giữ nguyên guard, thay mỗi subformula có lượng từ và
có biến tự do bằng một atom fresh `_nfN` kèm conjunct định nghĩa, còn các
câu con (không có biến tự do) được gán giá trị đúng/sai; mỗi phép gán làm
câu gốc đúng cho ra một disjunct. Các disjunct được sinh lazy theo thứ tự
nhị phân của phép gán.

Dạng TG mở rộng (enhance_tg_normal_form) tách ∀∃-conjunct thành loại ntr
(guard γ′ không transitive) và tr (γ′ transitive, guard ngoài một biến) và
thêm các ∀-conjunct đóng Aux.
"""

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from src.exceptions import FragmentError, NotASentenceError
from src.logic.fragments import classify_fragment, tgf_to_gfu
from src.logic.signature import Signature
from src.logic.syntax import (
    And, Atom, Eq, Exists, Falsum, Forall, Formula, Iff, Implies, Literal, Not, Or,
    Quantifier, Var, Verum, conj, formula_size, is_quantifier_free, map_atoms, relations_used,
    split_guard, walk,
)

logger = logging.getLogger(__name__)

NTR = "ntr"
TR = "tr"


@dataclass(frozen=True)
class ForallExistsConjunct:
    """∀x̄ (γ(x̄) ⇒ ∃ȳ (γ′(x̄,ȳ) ∧ ψ(x̄,ȳ)))"""

    variables: Tuple[Var, ...]
    guard: Literal
    witnesses: Tuple[Var, ...]
    witness_guard: Literal
    matrix: Formula = field(default_factory=Verum)
    tag: Optional[str] = None

    def to_formula(self) -> Formula:
        inner = Exists(self.witnesses, And(self.witness_guard, self.matrix))
        return Forall(self.variables, Implies(self.guard, inner))

    def __str__(self) -> str:
        return str(self.to_formula())


@dataclass(frozen=True)
class ForallConjunct:
    """∀x̄ (γ(x̄) ⇒ ψ(x̄)); kind = "aux" cho các conjunct đóng Aux"""

    variables: Tuple[Var, ...]
    guard: Literal
    matrix: Formula
    kind: str = "plain"

    def to_formula(self) -> Formula:
        return Forall(self.variables, Implies(self.guard, self.matrix))

    def __str__(self) -> str:
        return str(self.to_formula())


@dataclass(frozen=True)
class NormalFormSentence:
    """
    Câu ở dạng chuẩn

    Attributes:
        signature: Signature (gồm cả ký hiệu fresh)
        forall_exists_conjuncts: Các ∀∃-conjunct
        forall_conjuncts: Các ∀-conjunct
        tg_mode: True nếu là dạng TG mở rộng (mọi ∀∃-conjunct có tag)
    """

    signature: Signature
    forall_exists_conjuncts: Tuple[ForallExistsConjunct, ...] = ()
    forall_conjuncts: Tuple[ForallConjunct, ...] = ()
    tg_mode: bool = False

    def to_formula(self) -> Formula:
        parts = [c.to_formula() for c in self.forall_exists_conjuncts]
        parts += [c.to_formula() for c in self.forall_conjuncts]
        return conj(parts)

    @property
    def size(self) -> int:
        return formula_size(self.to_formula())

    @property
    def conjunct_count(self) -> int:
        return len(self.forall_exists_conjuncts) + len(self.forall_conjuncts)

    def with_conjuncts(
        self,
        forall_exists: Sequence[ForallExistsConjunct] = (),
        foralls: Sequence[ForallConjunct] = (),
        signature: Optional[Signature] = None,
    ) -> "NormalFormSentence":
        """Câu mới = câu này ∧ các conjunct bổ sung"""
        return replace(
            self,
            signature=signature or self.signature,
            forall_exists_conjuncts=self.forall_exists_conjuncts + tuple(forall_exists),
            forall_conjuncts=self.forall_conjuncts + tuple(foralls),
        )

    def ntr_conjuncts(self) -> Tuple[ForallExistsConjunct, ...]:
        return tuple(c for c in self.forall_exists_conjuncts if c.tag != TR)

    def tr_conjuncts(self) -> Tuple[ForallExistsConjunct, ...]:
        return tuple(c for c in self.forall_exists_conjuncts if c.tag == TR)

    def validate(self) -> None:
        """
        Kiểm tra các bất biến về dạng

        Raises:
            FragmentError: Nếu có conjunct sai dạng
        """
        sig = self.signature
        for c in self.forall_exists_conjuncts:
            _check_literal(c.guard, sig)
            _check_literal(c.witness_guard, sig)
            if not is_quantifier_free(c.matrix):
                raise FragmentError(f"Matrix is not quantifier-free: {c}")
            if set(c.guard.free_vars) != set(c.variables):
                raise FragmentError(f"Guard does not cover the universal variables: {c}")
            if not c.witnesses:
                raise FragmentError(f"Conjunct has no existential variables: {c}")
            scope = set(c.variables) | set(c.witnesses)
            if not set(c.witnesses) <= c.witness_guard.free_vars or not c.matrix.free_vars <= c.witness_guard.free_vars:
                raise FragmentError(f"Witness guard does not cover the matrix: {c}")
            if not c.witness_guard.free_vars <= scope:
                raise FragmentError(f"Witness guard mentions unbound variables: {c}")
            if self.tg_mode:
                self._check_tg(c)
        for c in self.forall_conjuncts:
            _check_literal(c.guard, sig)
            if not is_quantifier_free(c.matrix):
                raise FragmentError(f"Matrix is not quantifier-free: {c}")
            if set(c.guard.free_vars) != set(c.variables) or not c.matrix.free_vars <= c.guard.free_vars:
                raise FragmentError(f"Guard does not cover the matrix: {c}")
            if self.tg_mode and relations_used(c.matrix) & sig.transitive_symbols:
                raise FragmentError(f"Transitive symbol inside a matrix: {c}")

    def _check_tg(self, c: ForallExistsConjunct) -> None:
        sig = self.signature
        if c.tag not in (NTR, TR):
            raise FragmentError(f"Conjunct without ntr/tr tag: {c}")
        if isinstance(c.guard, Atom) and sig.is_transitive(c.guard.relation):
            raise FragmentError(f"Transitive outer guard: {c}")
        if relations_used(c.matrix) & sig.transitive_symbols:
            raise FragmentError(f"Transitive symbol inside a matrix: {c}")
        wg_transitive = isinstance(c.witness_guard, Atom) and sig.is_transitive(c.witness_guard.relation)
        if (c.tag == TR) != wg_transitive:
            raise FragmentError(f"Tag {c.tag} does not match the witness guard: {c}")
        if c.tag == TR and len(c.variables) != 1:
            raise FragmentError(f"tr-conjunct needs a one-variable outer guard: {c}")

    def __str__(self) -> str:
        return str(self.to_formula())


def _check_literal(lit: Formula, sig: Signature) -> None:
    if isinstance(lit, Atom):
        if not sig.has_relation(lit.relation) or sig.arity(lit.relation) != len(lit.args):
            raise FragmentError(f"Guard {lit} does not match the signature")
    elif not isinstance(lit, Eq):
        raise FragmentError(f"Guard must be an atom or an equality, got {lit}")


# ---------------------------------------------------------------------------
# Recognition
# ---------------------------------------------------------------------------

def _as_conjunct(f: Formula):
    if not isinstance(f, Forall):
        return None
    split = split_guard(f)
    if split is None or set(split.guard.free_vars) != set(f.variables) or len(set(f.variables)) != len(f.variables):
        return None
    matrix = split.matrix
    if isinstance(matrix, Exists):
        inner = split_guard(matrix)
        if inner is None or not is_quantifier_free(inner.matrix):
            return None
        return ForallExistsConjunct(f.variables, split.guard, matrix.variables, inner.guard, inner.matrix)
    if is_quantifier_free(matrix):
        return ForallConjunct(f.variables, split.guard, matrix)
    return None


def _top_conjuncts(f: Formula) -> List[Formula]:
    if isinstance(f, And):
        return _top_conjuncts(f.left) + _top_conjuncts(f.right)
    return [f]


def recognize_normal_form(f: Formula, sig: Signature) -> Optional[NormalFormSentence]:
    """
    Nhận diện câu đã ở dạng chuẩn

    Returns:
        NormalFormSentence tương ứng, hoặc None
    """
    forall_exists, foralls = [], []
    for part in _top_conjuncts(f):
        if isinstance(part, Verum):
            continue
        c = _as_conjunct(part)
        if c is None:
            return None
        (forall_exists if isinstance(c, ForallExistsConjunct) else foralls).append(c)
    nf = NormalFormSentence(sig, tuple(forall_exists), tuple(foralls))
    try:
        nf.validate()
    except FragmentError:
        return None
    return nf


# ---------------------------------------------------------------------------
# NNF with explicit guards
# ---------------------------------------------------------------------------

def _and(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Falsum) or isinstance(b, Falsum):
        return Falsum()
    if isinstance(a, Verum):
        return b
    if isinstance(b, Verum):
        return a
    return And(a, b)


def _or(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Verum) or isinstance(b, Verum):
        return Verum()
    if isinstance(a, Falsum):
        return b
    if isinstance(b, Falsum):
        return a
    return Or(a, b)


def _ordered_vars(f: Formula) -> List[Var]:
    order: List[Var] = []
    for _, node in walk(f):
        if isinstance(node, (Atom, Eq)):
            for v in node.variables:
                if v not in order:
                    order.append(v)
    return order


def guard_of(q: Quantifier) -> Tuple[Literal, Formula]:
    """Guard và matrix; lượng từ không guard với ≤ 1 biến tự do nhận guard x = x"""
    split = split_guard(q)
    if split is not None:
        return split.guard, split.matrix
    free = sorted(q.body.free_vars)
    if len(free) > 1:
        raise FragmentError(f"Unguarded quantifier over {len(free)} free variables: {q}")
    v = free[0] if free else q.variables[0]
    return Eq(v, v), q.body


def nnf(f: Formula, positive: bool = True) -> Formula:
    """
    Negation normal form, giữ dạng guard của lượng từ:
    ∀x̄ (γ → ψ) và ∃x̄ (γ ∧ ψ)
    """
    if isinstance(f, (Atom, Eq)):
        return f if positive else Not(f)
    if isinstance(f, Verum):
        return Verum() if positive else Falsum()
    if isinstance(f, Falsum):
        return Falsum() if positive else Verum()
    if isinstance(f, Not):
        return nnf(f.body, not positive)
    if isinstance(f, And):
        left, right = nnf(f.left, positive), nnf(f.right, positive)
        return _and(left, right) if positive else _or(left, right)
    if isinstance(f, Or):
        left, right = nnf(f.left, positive), nnf(f.right, positive)
        return _or(left, right) if positive else _and(left, right)
    if isinstance(f, Implies):
        if positive:
            return _or(nnf(f.left, False), nnf(f.right, True))
        return _and(nnf(f.left, True), nnf(f.right, False))
    if isinstance(f, Iff):
        if positive:
            return _and(nnf(Implies(f.left, f.right)), nnf(Implies(f.right, f.left)))
        return _or(_and(nnf(f.left), nnf(f.right, False)), _and(nnf(f.left, False), nnf(f.right)))
    if isinstance(f, Quantifier):
        guard, matrix = guard_of(f)
        universal = isinstance(f, Forall) == positive
        body = nnf(matrix, positive)
        used = guard.free_vars | body.free_vars
        bound = tuple(v for v in f.variables if v in used)
        if not bound:
            # vacuous block: domain không rỗng
            return body if universal else _and(guard, body)
        if universal:
            if isinstance(body, Verum):
                return Verum()
            return Forall(bound, Implies(guard, body))
        if isinstance(body, Falsum):
            return Falsum()
        return Exists(bound, And(guard, body))
    raise TypeError(f"Unknown formula node {f!r}")


# ---------------------------------------------------------------------------
# Structural renaming
# ---------------------------------------------------------------------------

class _DisjunctBuilder:
    """Thu thập conjunct và ký hiệu fresh cho một disjunct"""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.fresh: Dict[str, int] = {}
        self.forall_exists: List[ForallExistsConjunct] = []
        self.foralls: List[ForallConjunct] = []
        self._counter = 0

    def _fresh(self, arity: int) -> str:
        used = set(self.sig.arities) | set(self.fresh) | set(self.sig.constants)
        while f"_nf{self._counter}" in used:
            self._counter += 1
        name = f"_nf{self._counter}"
        self._counter += 1
        self.fresh[name] = arity
        return name

    def rename(self, f: Formula) -> Formula:
        """Trả về công thức không lượng từ thay cho f (f ở NNF, polarity dương)"""
        if isinstance(f, (And, Or)):
            left, right = self.rename(f.left), self.rename(f.right)
            return _and(left, right) if isinstance(f, And) else _or(left, right)
        if not isinstance(f, Quantifier):
            return f
        free = _ordered_vars(f)
        free = [v for v in free if v in f.free_vars]
        if isinstance(f, Exists):
            guard, matrix = f.body.left, self.rename(f.body.right)
            name = self._fresh(len(free))
            head = Atom(name, tuple(free))
            self.forall_exists.append(ForallExistsConjunct(tuple(free), head, f.variables, guard, matrix))
            return head
        guard, matrix = f.body.left, self.rename(f.body.right)
        name = self._fresh(len(free))
        head = Atom(name, tuple(free))
        self.foralls.append(ForallConjunct(tuple(_ordered_vars(guard)), guard, _or(Not(head), matrix)))
        return head

    def assert_sentence(self, f: Formula) -> None:
        """Thêm conjunct cho câu f (NNF)"""
        if isinstance(f, Verum):
            return
        if isinstance(f, And):
            self.assert_sentence(f.left)
            self.assert_sentence(f.right)
            return
        if isinstance(f, Forall):
            guard, matrix = f.body.left, f.body.right
            outer = tuple(_ordered_vars(guard))
            if isinstance(matrix, Exists):
                inner_guard, inner = matrix.body.left, self.rename(matrix.body.right)
                self.forall_exists.append(
                    ForallExistsConjunct(outer, guard, matrix.variables, inner_guard, inner)
                )
            else:
                self.foralls.append(ForallConjunct(outer, guard, self.rename(matrix)))
            return
        z = Var("_z")
        if isinstance(f, Exists):
            # ∃ȳ(γ ∧ ψ) ↦ ∀z (z = z ⇒ ∃ȳ (G(z,ȳ) ∧ γ ∧ ψ))
            guard, matrix = f.body.left, self.rename(f.body.right)
            name = self._fresh(1 + len(f.variables))
            body = matrix if isinstance(guard, Eq) and guard.trivial else _and(guard, matrix)
            self.forall_exists.append(simulate_existential(f.variables, body, name, z))
            return
        # literal ground, false, hoặc tổ hợp Boolean của các câu
        self.foralls.append(ForallConjunct((z,), Eq(z, z), self.rename(f)))

    def result(self) -> NormalFormSentence:
        sig = self.sig.extend(self.fresh) if self.fresh else self.sig
        return NormalFormSentence(sig, tuple(self.forall_exists), tuple(self.foralls))


def _collect_switches(f: Formula) -> List[Formula]:
    """Câu con có lượng từ (không biến tự do) và literal ground ở mức ngoài cùng"""
    switches: List[Formula] = []

    def go(node: Formula, under_quantifier: bool) -> None:
        if isinstance(node, Quantifier) and not node.free_vars:
            if node not in switches:
                switches.append(node)
        elif isinstance(node, (Atom, Eq)) and not under_quantifier:
            if node not in switches:
                switches.append(node)
        inner = under_quantifier or isinstance(node, Quantifier)
        for child in node.children():
            go(child, inner)

    go(f, False)
    return switches


def _replace(f: Formula, values: Dict[Formula, bool], skip_root: bool = False) -> Formula:
    if not skip_root and f in values:
        return Verum() if values[f] else Falsum()
    if isinstance(f, Not):
        return Not(_replace(f.body, values))
    if isinstance(f, Quantifier):
        return type(f)(f.variables, _replace(f.body, values))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_replace(f.left, values), _replace(f.right, values))
    return f


def _truth(f: Formula) -> bool:
    f = nnf(f)
    if isinstance(f, Verum):
        return True
    if isinstance(f, Falsum):
        return False
    raise FragmentError(f"Top-level structure did not reduce to a truth value: {f}")


def _supported(f: Formula, sig: Signature) -> Formula:
    report = classify_fragment(f, sig)
    if any(report.member(name) for name in ("GF", "GFU", "GF+TG", "GFU+TG")):
        return f
    if (report.member("TGF") or report.member("TGF+TG")) and sig.universal_symbol is not None:
        return tgf_to_gfu(f, sig)
    raise FragmentError(f"Formula is not in a supported fragment ({report.summary()})")


def to_normal_form(f: Formula, sig: Signature) -> Iterator[NormalFormSentence]:
    """
    Sinh lazy các disjunct ở dạng chuẩn của câu f

    Args:
        f: Câu thuộc GF, GFU, GF+TG, GFU+TG (TGF được dịch qua U trước)
        sig: Signature của f

    Yields:
        NormalFormSentence, theo thứ tự nhị phân của phép gán giá trị
        cho các câu con

    Raises:
        NotASentenceError: f còn biến tự do
        FragmentError: f không thuộc fragment được hỗ trợ
    """
    if f.free_vars:
        raise NotASentenceError(f"Formula has free variables {sorted(v.name for v in f.free_vars)}")
    f = _supported(f, sig)
    recognized = recognize_normal_form(f, sig)
    if recognized is not None:
        yield recognized
        return

    switches = _collect_switches(f)
    logger.debug("Normalizing with %d sentence-level switches", len(switches))
    for bits in itertools.product((False, True), repeat=len(switches)):
        values = dict(zip(switches, bits))
        if not _truth(_replace(f, values)):
            continue
        builder = _DisjunctBuilder(sig)
        for switch, value in values.items():
            body = _replace(switch, values, skip_root=True)
            builder.assert_sentence(nnf(body, value))
        nf = builder.result()
        nf.validate()
        yield nf


# ---------------------------------------------------------------------------
# Enhanced TG normal form
# ---------------------------------------------------------------------------

def aux_closure_conjuncts(
    sig: Signature,
    aux: str,
    symbols: Optional[Sequence[str]] = None,
    kind: str = "aux",
    include_self: bool = False,
) -> List[ForallConjunct]:
    """
    ⋀_P ∀x̄ (P(x̄) ⇒ ⋀ᵢⱼ Aux(xᵢ,xⱼ)), một conjunct cho mỗi P

    Args:
        sig: Signature chứa mọi P
        aux: Ký hiệu đích (Aux, hoặc U cho φ*)
        symbols: Các P (mặc định mọi quan hệ của sig)
        kind: kind của các ∀-conjunct sinh ra
        include_self: Sinh cả conjunct cho P = aux (đối xứng hóa aux)
    """
    result = []
    names = symbols if symbols is not None else sig.relation_names
    for name in names:
        if name == aux and not include_self:
            continue
        xs = tuple(Var(f"x{i + 1}") for i in range(sig.arity(name)))
        links = conj(Atom(aux, (a, b)) for a in xs for b in xs)
        result.append(ForallConjunct(xs, Atom(name, xs), links, kind=kind))
    return result


def simulate_existential(
    variables: Sequence[Var],
    body: Formula,
    guard_symbol: str,
    anchor: Var = Var("_z"),
    tag: Optional[str] = None,
) -> ForallExistsConjunct:
    """
    ∃ȳ ψ(ȳ) dưới dạng ∀∃-conjunct: ∀z (z = z ⇒ ∃ȳ (G(z,ȳ) ∧ ψ(ȳ)))

    Args:
        variables: ȳ
        body: ψ, không lượng từ, biến tự do ⊆ ȳ
        guard_symbol: G fresh, arity 1 + |ȳ|
        anchor: Biến z (không được trùng với ȳ)
        tag: ntr/tr khi câu ở dạng TG
    """
    if anchor in variables:
        raise ValueError(f"Anchor variable {anchor} clashes with the witnesses")
    if not body.free_vars <= set(variables):
        raise FragmentError(f"Existential body has free variables outside {list(map(str, variables))}")
    witness_guard = Atom(guard_symbol, (anchor,) + tuple(variables))
    return ForallExistsConjunct((anchor,), Eq(anchor, anchor), tuple(variables), witness_guard, body, tag)


def enhance_tg_normal_form(nf: NormalFormSentence) -> NormalFormSentence:
    """
    Dạng TG mở rộng

    - guard ngoài transitive T(u,v) được thay bằng G(u,v) fresh cùng
      ∀-conjunct ∀uv (T(u,v) ⇒ G(u,v))
    - ∀∃-conjunct có γ′ transitive được gắn tag tr; nếu guard ngoài có hơn
      một biến thì tách qua ký hiệu unary fresh Gᵢʲ
    - thêm các ∀-conjunct đóng Aux (kể cả cho chính Aux, nên Aux đối xứng)

    Args:
        nf: Câu dạng chuẩn trên signature có ký hiệu transitive

    Returns:
        NormalFormSentence với tg_mode=True
    """
    sig = nf.signature
    aux = sig.aux_symbol
    if aux is None:
        aux = sig.fresh_name("_Aux") if sig.has_relation("_Aux") else "_Aux"
    fresh: Dict[str, int] = {}
    forall_exists: List[ForallExistsConjunct] = []
    foralls: List[ForallConjunct] = list(nf.forall_conjuncts)

    def fresh_symbol(base: str, arity: int) -> str:
        used = set(sig.arities) | set(fresh) | {aux}
        name, index = base, 0
        while name in used:
            index += 1
            name = f"{base}_{index}"
        fresh[name] = arity
        return name

    for c in foralls:
        if relations_used(c.matrix) & sig.transitive_symbols:
            raise FragmentError(f"Transitive symbol inside a matrix: {c}")

    for i, c in enumerate(nf.forall_exists_conjuncts, start=1):
        if relations_used(c.matrix) & sig.transitive_symbols:
            raise FragmentError(f"Transitive symbol inside a matrix: {c}")
        guard = c.guard
        if isinstance(guard, Atom) and sig.is_transitive(guard.relation):
            name = fresh_symbol(f"_G{i}", 2)
            replacement = Atom(name, guard.args)
            foralls.append(ForallConjunct(c.variables, guard, replacement))
            guard = replacement
        wg = c.witness_guard
        if not (isinstance(wg, Atom) and sig.is_transitive(wg.relation)):
            forall_exists.append(replace(c, guard=guard, tag=NTR))
            continue
        shared = [v for v in wg.variables if v in c.variables]
        if len(shared) != 1 or len(c.witnesses) != 1:
            raise FragmentError(f"Transitive witness guard must link one outer and one inner variable: {c}")
        xj = shared[0]
        if len(c.variables) == 1:
            forall_exists.append(replace(c, guard=guard, tag=TR))
            continue
        j = c.variables.index(xj) + 1
        name = fresh_symbol(f"_G{i}{j}", 1)
        foralls.append(ForallConjunct(c.variables, guard, Atom(name, (xj,))))
        forall_exists.append(ForallExistsConjunct((xj,), Atom(name, (xj,)), c.witnesses, wg, c.matrix, TR))

    extended = sig.extend({**fresh, aux: 2}, aux=aux)
    foralls.extend(aux_closure_conjuncts(extended, aux, include_self=True))
    result = NormalFormSentence(extended, tuple(forall_exists), tuple(foralls), tg_mode=True)
    result.validate()
    return result


# ---------------------------------------------------------------------------
# Building derived sentences
# ---------------------------------------------------------------------------

class SentenceBuilder:
    """
    Gom conjunct và ký hiệu fresh khi dựng một câu dạng chuẩn mới
    (φ*, φ_B, φ_C) trên signature sig

    Với loops=True, mỗi ký hiệu transitive T nhận một ký hiệu unary P_T;
    rewrite() thay T(v,v) bằng P_T(v) và link_loops() thêm các conjunct
    ∀x (P_T(x) ⇒ ∃y (T(x,y) ∧ x = y)) và ∀xy (T(x,y) ⇒ (x ≠ y ∨ P_T(x))).
    """

    def __init__(self, sig: Signature, tagged: bool = False, loops: bool = False):
        self.sig = sig
        self.tagged = tagged
        self.fresh: Dict[str, int] = {}
        self.forall_exists: List[ForallExistsConjunct] = []
        self.foralls: List[ForallConjunct] = []
        self.loops: Dict[str, str] = {}
        if loops:
            for name in sorted(sig.transitive_symbols):
                self.loops[name] = self.symbol(f"_Loop{name}_", 1)

    def symbol(self, prefix: str, arity: int) -> str:
        name = self.signature.fresh_name(prefix)
        self.fresh[name] = arity
        return name

    @property
    def signature(self) -> Signature:
        return self.sig.extend(self.fresh) if self.fresh else self.sig

    def rewrite(self, f: Formula) -> Formula:
        if not self.loops:
            return f

        def loop(a: Atom) -> Formula:
            if a.relation in self.loops and len(a.args) == 2 and a.args[0] == a.args[1]:
                return Atom(self.loops[a.relation], (a.args[0],))
            return a

        return map_atoms(f, loop)

    def exists(self, variables: Sequence[Var], body: Formula, anchor: Var = Var("_z"), prefix: str = "_Ex") -> None:
        """∃ȳ body, mô phỏng qua witness guard fresh"""
        name = self.symbol(prefix, 1 + len(variables))
        tag = NTR if self.tagged else None
        self.forall_exists.append(simulate_existential(variables, self.rewrite(body), name, anchor, tag))

    def forall(self, variables: Sequence[Var], guard: Literal, matrix: Formula, kind: str = "plain") -> None:
        self.foralls.append(ForallConjunct(tuple(variables), guard, self.rewrite(matrix), kind))

    def link_loops(self, x: Var = Var("x"), y: Var = Var("y")) -> None:
        tag = TR if self.tagged else None
        for name, loop in self.loops.items():
            self.forall_exists.append(
                ForallExistsConjunct((x,), Atom(loop, (x,)), (y,), Atom(name, (x, y)), Eq(x, y), tag)
            )
            self.foralls.append(ForallConjunct((x, y), Atom(name, (x, y)), _or(Not(Eq(x, y)), Atom(loop, (x,)))))

    def build(
        self,
        forall_exists: Sequence[ForallExistsConjunct] = (),
        foralls: Sequence[ForallConjunct] = (),
        tg_mode: bool = False,
    ) -> NormalFormSentence:
        """Câu gồm các conjunct cho trước rồi tới các conjunct đã gom"""
        nf = NormalFormSentence(
            self.signature,
            tuple(forall_exists) + tuple(self.forall_exists),
            tuple(foralls) + tuple(self.foralls),
            tg_mode=tg_mode,
        )
        nf.validate()
        return nf
