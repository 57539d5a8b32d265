"""
Model Check Module

Đánh giá công thức trên structure hữu hạn và kiểm tra câu dạng chuẩn:
    - evaluate: ngữ nghĩa first-order chuẩn (lượng từ chạy trên toàn domain,
      guard được dùng để liệt kê nhanh các phép gán)
    - check_model: kiểm tra từng conjunct bằng cách liệt kê các tuple thỏa
      guard từ fact của guard, kèm U-biquity và tính bắc cầu
    - find_witness: witness nhỏ nhất theo thứ tự từ điển
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.exceptions import StructureError
from src.logic.normalform import ForallConjunct, ForallExistsConjunct, NormalFormSentence
from src.logic.syntax import (
    And, Atom, Const, Eq, Falsum, Forall, Formula, Iff, Implies, Literal, Not, Or, Quantifier,
    Term, Var, Verum, split_guard,
)
from src.structures.structure import Structure

logger = logging.getLogger(__name__)

Assignment = Dict[Var, int]

MISSING_WITNESS = "missing-witness"
FORALL_VIOLATION = "forall-violation"
NON_TRANSITIVE = "non-transitive"
MISSING_U_EDGE = "missing-U-edge"
MISSING_AUX = "missing-aux"


@dataclass(frozen=True, order=True)
class CheckViolation:
    """Vi phạm: conjunct (chỉ số, -1 nếu là ràng buộc ngữ nghĩa), tuple, loại"""

    kind: str
    conjunct: int
    elements: Tuple[int, ...]
    relation: Optional[str] = None


@dataclass
class CheckReport:
    """
    Kết quả check_model

    Attributes:
        violations: Danh sách vi phạm (đã sắp xếp)
        truncated: True nếu dừng sớm vì đạt giới hạn số vi phạm
    """

    violations: List[CheckViolation] = field(default_factory=list)
    truncated: bool = False

    @property
    def verdict(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.verdict

    def kinds(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for v in self.violations:
            counts[v.kind] = counts.get(v.kind, 0) + 1
        return counts

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"kind": v.kind, "conjunct": v.conjunct, "elements": v.elements, "relation": v.relation}
            for v in self.violations
        ]
        return pd.DataFrame(rows, columns=["kind", "conjunct", "elements", "relation"])

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "truncated": self.truncated,
            "violations": [
                {"kind": v.kind, "conjunct": v.conjunct, "tuple": list(v.elements), "relation": v.relation}
                for v in self.violations
            ],
        }


# ---------------------------------------------------------------------------
# Terms and literals
# ---------------------------------------------------------------------------

def _value(s: Structure, term: Term, env: Mapping[Var, int]) -> int:
    if isinstance(term, Const):
        try:
            return s.constants[term.name]
        except KeyError:
            raise StructureError(f"Constant {term.name} has no interpretation")
    try:
        return env[term]
    except KeyError:
        raise ValueError(f"Unassigned free variable {term.name}")


def holds_literal(s: Structure, lit: Literal, env: Mapping[Var, int]) -> bool:
    if isinstance(lit, Eq):
        return _value(s, lit.left, env) == _value(s, lit.right, env)
    return s.holds(lit.relation, tuple(_value(s, t, env) for t in lit.args))


def match_literal(
    s: Structure,
    lit: Literal,
    env: Mapping[Var, int],
    touching: Optional[Iterable[int]] = None,
) -> Iterator[Assignment]:
    """
    Liệt kê các mở rộng của env làm literal đúng (guard-driven)

    Args:
        touching: Nếu có, chỉ các phép gán mà tuple của literal chứa ít nhất
            một phần tử trong tập này
    """
    touch = None if touching is None else sorted(set(touching))
    if isinstance(lit, Eq):
        terms = (lit.left, lit.right)
        known = [t for t in terms if isinstance(t, Const) or t in env]
        if len(known) == 2:
            if holds_literal(s, lit, env) and (touch is None or _value(s, lit.left, env) in touch):
                yield dict(env)
            return
        if known:
            value = _value(s, known[0], env)
            if touch is None or value in touch:
                free = [t for t in terms if t not in known][0]
                yield {**env, free: value}
            return
        # x = y hoặc x = x, cả hai chưa gán
        for e in (touch if touch is not None else s.domain):
            yield {**env, lit.left: e, lit.right: e}
        return

    pattern = []
    for t in lit.args:
        if isinstance(t, Const):
            pattern.append(s.constants[t.name])
        else:
            pattern.append(env.get(t))
    relation = s.relation(lit.relation)
    if touch is None:
        candidates: Iterable[Tuple[int, ...]] = relation.match(pattern)
    else:
        seen = set()
        for e in touch:
            for t in relation.containing(e):
                if t not in seen and all(p is None or p == v for p, v in zip(pattern, t)):
                    seen.add(t)
        candidates = sorted(seen)
    for t in candidates:
        extended = dict(env)
        ok = True
        for term, value in zip(lit.args, t):
            if isinstance(term, Var):
                if extended.setdefault(term, value) != value:
                    ok = False
                    break
        if ok:
            yield extended


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _assignments(s: Structure, q: Quantifier, env: Mapping[Var, int]) -> Iterator[Tuple[Assignment, Formula]]:
    split = split_guard(q)
    inner_env = {v: e for v, e in env.items() if v not in q.variables}
    if split is not None:
        for extended in match_literal(s, split.guard, inner_env):
            yield extended, split.matrix
        return
    for values in itertools.product(s.domain, repeat=len(q.variables)):
        yield {**inner_env, **dict(zip(q.variables, values))}, q.body


def evaluate(s: Structure, f: Formula, assignment: Optional[Mapping[Var, int]] = None) -> bool:
    """
    s ⊨ f[assignment]

    Args:
        s: Structure
        f: Công thức
        assignment: Biến → phần tử, phải phủ mọi biến tự do của f

    Returns:
        Giá trị chân lý

    Raises:
        ValueError: Biến tự do chưa được gán
    """
    env = dict(assignment or {})
    missing = [v.name for v in f.free_vars if v not in env]
    if missing:
        raise ValueError(f"Unassigned free variables {sorted(missing)}")
    return _eval(s, f, env)


def _eval(s: Structure, f: Formula, env: Mapping[Var, int]) -> bool:
    if isinstance(f, (Atom, Eq)):
        return holds_literal(s, f, env)
    if isinstance(f, Verum):
        return True
    if isinstance(f, Falsum):
        return False
    if isinstance(f, Not):
        return not _eval(s, f.body, env)
    if isinstance(f, And):
        return _eval(s, f.left, env) and _eval(s, f.right, env)
    if isinstance(f, Or):
        return _eval(s, f.left, env) or _eval(s, f.right, env)
    if isinstance(f, Implies):
        return (not _eval(s, f.left, env)) or _eval(s, f.right, env)
    if isinstance(f, Iff):
        return _eval(s, f.left, env) == _eval(s, f.right, env)
    if isinstance(f, Quantifier):
        if isinstance(f, Forall):
            return all(_eval(s, body, extended) for extended, body in _assignments(s, f, env))
        return any(_eval(s, body, extended) for extended, body in _assignments(s, f, env))
    raise TypeError(f"Unknown formula node {f!r}")


# ---------------------------------------------------------------------------
# Witnesses
# ---------------------------------------------------------------------------

def _witnesses(s: Structure, conjunct: ForallExistsConjunct, env: Assignment) -> Iterator[Tuple[int, ...]]:
    """Các witness theo thứ tự từ điển"""
    candidates = set()
    for extended in match_literal(s, conjunct.witness_guard, env):
        b = tuple(extended[y] for y in conjunct.witnesses)
        if b not in candidates:
            candidates.add(b)
    for b in sorted(candidates):
        extended = {**env, **dict(zip(conjunct.witnesses, b))}
        if _eval(s, conjunct.matrix, extended):
            yield b


def _guard_env(s: Structure, conjunct, elements: Sequence[int]) -> Assignment:
    env = dict(zip(conjunct.variables, (int(e) for e in elements)))
    if len(env) != len(conjunct.variables) or len(elements) != len(conjunct.variables):
        raise ValueError(f"Expected {len(conjunct.variables)} elements, got {len(elements)}")
    return env


def find_witness(
    s: Structure,
    conjunct: ForallExistsConjunct,
    elements: Sequence[int],
) -> Optional[Tuple[int, ...]]:
    """
    Witness nhỏ nhất (thứ tự từ điển) b̄ với s ⊨ γ′[ā,b̄] ∧ ψ[ā,b̄]

    Args:
        s: Structure
        conjunct: ∀∃-conjunct
        elements: ā theo thứ tự conjunct.variables

    Returns:
        b̄ hoặc None

    Raises:
        ValueError: ā không thỏa guard
    """
    env = _guard_env(s, conjunct, elements)
    if not holds_literal(s, conjunct.guard, env):
        raise ValueError(f"Guard {conjunct.guard} does not hold for {tuple(elements)}")
    return next(_witnesses(s, conjunct, env), None)


# ---------------------------------------------------------------------------
# Normal-form checking
# ---------------------------------------------------------------------------

def _guard_tuples(s: Structure, conjunct, touching) -> Iterator[Assignment]:
    seen = set()
    for env in match_literal(s, conjunct.guard, {}, touching):
        key = tuple(env[v] for v in conjunct.variables)
        if key not in seen:
            seen.add(key)
            yield env


def transitivity_violations(s: Structure, limit: Optional[int] = None) -> List[CheckViolation]:
    """(a,b,c) với T(a,b), T(b,c) nhưng không T(a,c); b nhỏ nhất cho mỗi (a,c)"""
    violations = []
    for name in sorted(s.signature.transitive_symbols):
        m = s.relation(name).data.astype(np.float32)
        two_step = (m @ m) > 0
        broken = np.argwhere(two_step & ~s.relation(name).data)
        for a, c in broken:
            b = int(np.flatnonzero(m[a] * m[:, c])[0])
            violations.append(CheckViolation(NON_TRANSITIVE, -1, (int(a), b, int(c)), name))
            if limit is not None and len(violations) >= limit:
                return violations
    return violations


def ubiquity_violations(s: Structure, limit: Optional[int] = None) -> List[CheckViolation]:
    symbol = s.signature.universal_symbol
    if symbol is None:
        raise StructureError("U-biquity requested but the signature has no universal symbol")
    missing = np.argwhere(~s.relation(symbol).data)
    if limit is not None:
        missing = missing[:limit]
    return [CheckViolation(MISSING_U_EDGE, -1, (int(a), int(b)), symbol) for a, b in missing]


def check_model(
    s: Structure,
    nf: NormalFormSentence,
    ubiquitous: bool = False,
    transitive: bool = False,
    touching: Optional[Iterable[int]] = None,
    limit: Optional[int] = None,
) -> CheckReport:
    """
    Kiểm tra s ⊨ nf

    Args:
        s: Structure (signature chứa mọi ký hiệu của nf)
        nf: Câu dạng chuẩn
        ubiquitous: Kiểm tra thêm U-biquity
        transitive: Kiểm tra thêm mọi quan hệ transitive đã đóng bắc cầu
        touching: Chỉ kiểm tra các tuple thỏa guard chứa một trong các phần
            tử này (dùng khi chỉ có fact mới được thêm quanh các phần tử đó)
        limit: Số vi phạm tối đa được ghi lại

    Returns:
        CheckReport
    """
    for name in nf.signature.relation_names:
        if not s.signature.has_relation(name):
            raise StructureError(f"Structure has no relation {name}")
    report = CheckReport()

    def record(v: CheckViolation) -> bool:
        report.violations.append(v)
        if limit is not None and len(report.violations) >= limit:
            report.truncated = True
            return True
        return False

    done = False
    for index, conjunct in enumerate(nf.forall_exists_conjuncts):
        for env in _guard_tuples(s, conjunct, touching):
            if next(_witnesses(s, conjunct, env), None) is None:
                key = tuple(env[v] for v in conjunct.variables)
                if record(CheckViolation(MISSING_WITNESS, index, key)):
                    done = True
                    break
        if done:
            break
    offset = len(nf.forall_exists_conjuncts)
    for index, conjunct in enumerate(nf.forall_conjuncts, start=offset):
        if done:
            break
        kind = MISSING_AUX if conjunct.kind == "aux" else FORALL_VIOLATION
        for env in _guard_tuples(s, conjunct, touching):
            if not _eval(s, conjunct.matrix, env):
                key = tuple(env[v] for v in conjunct.variables)
                if record(CheckViolation(kind, index, key)):
                    done = True
                    break
    if not done and ubiquitous:
        for v in ubiquity_violations(s, None if limit is None else limit - len(report.violations)):
            if record(v):
                done = True
                break
    if not done and transitive:
        for v in transitivity_violations(s, None if limit is None else limit - len(report.violations)):
            if record(v):
                break
    report.violations.sort()
    logger.debug("check_model: %d violations", len(report.violations))
    return report


def satisfies(s: Structure, nf: NormalFormSentence, ubiquitous: bool = False, transitive: bool = False) -> bool:
    """s ⊨ nf (dừng ở vi phạm đầu tiên)"""
    return check_model(s, nf, ubiquitous, transitive, limit=1).verdict
