"""
Fragments Module

Phân loại câu theo các fragment GF, TGF, GFU, GF+TG, TGF+TG, GFU+TG và
chuyển đổi TGF ↔ GFU.

Quy tắc:
    GF     : mọi lượng từ có guard, trừ khi thân có ≤ 1 biến tự do
    TGF    : như GF nhưng cho phép lượng từ không guard nếu thân có ≤ 2 biến
             tự do; không có đẳng thức (trừ trivial guard x = x)
    GFU    : GF trên signature có U, không có đẳng thức
    +TG    : ký hiệu transitive chỉ xuất hiện ở vị trí guard, không có hằng
"""

from dataclasses import dataclass, field
from typing import Dict, List, Set, Tuple

from src.exceptions import FragmentError, SignatureError
from src.logic.signature import Signature
from src.logic.syntax import (
    And, Atom, Const, Eq, Exists, Forall, Formula, Implies, Quantifier, Var,
    rebuild, split_guard, uses_nontrivial_equality, variable_names, fresh_variable,
)

FRAGMENTS = ("GF", "TGF", "GFU", "GF+TG", "TGF+TG", "GFU+TG")


@dataclass(frozen=True, order=True)
class Violation:
    """Một vi phạm: đường dẫn tới node (chỉ số con) và quy tắc bị vi phạm"""

    path: Tuple[int, ...]
    rule: str


@dataclass
class FragmentReport:
    """
    Kết quả phân loại

    Attributes:
        violations: fragment → danh sách vi phạm (đã sắp xếp)
    """

    violations: Dict[str, List[Violation]] = field(default_factory=lambda: {f: [] for f in FRAGMENTS})

    @property
    def membership(self) -> Dict[str, bool]:
        return {name: not found for name, found in self.violations.items()}

    def member(self, fragment: str) -> bool:
        if fragment not in self.violations:
            raise ValueError(f"Unknown fragment {fragment}, expected one of {FRAGMENTS}")
        return not self.violations[fragment]

    def add(self, fragments, path: Tuple[int, ...], rule: str) -> None:
        for name in fragments:
            self.violations[name].append(Violation(path, rule))

    def summary(self) -> str:
        return ", ".join(f"{name}={'yes' if ok else 'no'}" for name, ok in self.membership.items())


_EQUALITY_FREE = ("TGF", "TGF+TG", "GFU", "GFU+TG")
_TG = ("GF+TG", "TGF+TG", "GFU+TG")
_GF_LIKE = ("GF", "GFU", "GF+TG", "GFU+TG")
_TGF_LIKE = ("TGF", "TGF+TG")


def _guard_paths(q: Quantifier, path: Tuple[int, ...]) -> Set[Tuple[int, ...]]:
    """Đường dẫn tới guard atom trong thân của lượng từ (nếu có)"""
    split = split_guard(q)
    if split is None:
        return set()
    found = set()
    # guard nằm trong chuỗi And ở vế trái của -> (∀) hoặc trong thân (∃)
    start = (q.body.left, path + (0, 0)) if isinstance(q, Forall) else (q.body, path + (0,))
    stack = [start]
    while stack:
        node, p = stack.pop()
        if node is split.guard or node == split.guard:
            found.add(p)
            break
        if isinstance(node, And):
            stack.append((node.right, p + (1,)))
            stack.append((node.left, p + (0,)))
    return found


def classify_fragment(f: Formula, sig: Signature) -> FragmentReport:
    """
    Kiểm tra cú pháp của câu f theo từng fragment

    Args:
        f: Câu cần phân loại
        sig: Signature

    Returns:
        FragmentReport (vi phạm được ghi lại, không raise)
    """
    report = FragmentReport()
    if f.free_vars:
        report.add(FRAGMENTS, (), f"free variables {sorted(v.name for v in f.free_vars)}")
    if sig.universal_symbol is None:
        report.add(("GFU", "GFU+TG"), (), "signature has no universal symbol")

    guard_positions: Set[Tuple[int, ...]] = set()

    def visit(node: Formula, path: Tuple[int, ...]) -> None:
        if isinstance(node, Quantifier):
            guard_positions.update(_guard_paths(node, path))
            if split_guard(node) is None:
                width = len(node.body.free_vars)
                if width > 1:
                    report.add(_GF_LIKE, path, f"unguarded quantifier over {width} free variables")
                if width > 2:
                    report.add(_TGF_LIKE, path, f"unguarded quantifier over {width} free variables")
        elif isinstance(node, Eq):
            if not node.trivial:
                report.add(_EQUALITY_FREE, path, "non-trivial equality")
            if any(isinstance(t, Const) for t in (node.left, node.right)):
                report.add(_TG, path, "constant in transitive-guard fragment")
        elif isinstance(node, Atom):
            if sig.is_transitive(node.relation) and path not in guard_positions:
                report.add(_TG, path, f"transitive symbol {node.relation} outside guard")
            if any(isinstance(t, Const) for t in node.args):
                report.add(_TG, path, "constant in transitive-guard fragment")
        for i, child in enumerate(node.children()):
            visit(child, path + (i,))

    visit(f, ())
    for name in FRAGMENTS:
        report.violations[name].sort()
    return report


def _ordered_free(node: Formula) -> List[Var]:
    """Biến tự do theo thứ tự xuất hiện đầu tiên"""
    order: List[Var] = []

    def go(n: Formula, bound: frozenset) -> None:
        if isinstance(n, Atom):
            terms = n.args
        elif isinstance(n, Eq):
            terms = (n.left, n.right)
        else:
            inner = bound | frozenset(n.variables) if isinstance(n, Quantifier) else bound
            for c in n.children():
                go(c, inner)
            return
        for t in terms:
            if isinstance(t, Var) and t not in bound and t not in order:
                order.append(t)

    go(node, frozenset())
    return order


def tgf_to_gfu(f: Formula, sig: Signature) -> Formula:
    """
    Dịch câu TGF sang GFU: lượng từ không guard trên thân hai biến tự do
    được guard bởi U, thân một biến được guard bởi trivial guard x = x

    Args:
        f: Câu thuộc TGF
        sig: Signature có universal_symbol

    Returns:
        Câu GF trên sig (tương đương trên các structure U-biquitous)
    """
    report = classify_fragment(f, sig)
    if not (report.member("TGF") or report.member("TGF+TG")):
        raise FragmentError(f"Formula is not in TGF: {report.violations['TGF'][:3]}")
    if sig.universal_symbol is None:
        raise SignatureError("tgf_to_gfu needs a signature with a universal symbol")
    universal = sig.universal_symbol

    def go(node: Formula) -> Formula:
        children = node.children()
        if children:
            node = rebuild(node, tuple(go(c) for c in children))
        if not isinstance(node, Quantifier) or split_guard(node) is not None:
            return node
        free = _ordered_free(node.body)
        if len(free) == 2:
            guard = Atom(universal, (free[0], free[1]))
        elif len(free) == 1:
            guard = Eq(free[0], free[0])
        elif not free:
            guard = Eq(node.variables[0], node.variables[0])
        else:
            raise FragmentError(f"Quantifier over {len(free)} free variables cannot be guarded by U")
        if isinstance(node, Forall):
            return Forall(node.variables, Implies(guard, node.body))
        return Exists(node.variables, And(guard, node.body))

    return go(f)


def gfu_to_tgf(f: Formula, sig: Signature) -> Formula:
    """
    f ↦ f ∧ ∀xy U(x,y): câu TGF đúng đúng trên các mô hình U-biquitous của f

    Raises:
        FragmentError: f dùng đẳng thức không tầm thường
    """
    if uses_nontrivial_equality(f):
        raise FragmentError("GFU formula uses equality; cannot be read as TGF")
    if sig.universal_symbol is None:
        raise SignatureError("gfu_to_tgf needs a signature with a universal symbol")
    used = set(variable_names(f)) | set(sig.constants)
    x = fresh_variable(used, "x")
    y = fresh_variable(used | {x}, "y")
    everywhere = Forall((Var(x), Var(y)), Atom(sig.universal_symbol, (Var(x), Var(y))))
    return And(f, everywhere)
