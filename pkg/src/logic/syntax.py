"""
Syntax Module

AST cho công thức first-order không có ký hiệu hàm: term là biến hoặc hằng,
atom, đẳng thức, các phép nối Boolean và lượng từ theo block (∀/∃ x̄ ψ).
Guard của một lượng từ không được lưu riêng mà được nhận diện bằng
`split_guard`, nên printer luôn in lại đúng cây đã parse.

Ví dụ:
    >>> f = Forall((Var("x"),), Implies(Atom("P", (Var("x"),)), Atom("Q", (Var("x"),))))
    >>> print_formula(f)
    'forall x (P(x) -> Q(x))'
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Tuple, Union


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, Const]


class Formula:
    """Base class cho mọi node của AST"""

    def children(self) -> Tuple["Formula", ...]:
        return ()

    @cached_property
    def free_vars(self) -> FrozenSet[Var]:
        result: FrozenSet[Var] = frozenset()
        for child in self.children():
            result |= child.free_vars
        return result

    @property
    def is_sentence(self) -> bool:
        return not self.free_vars

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Verum(Formula):
    pass


@dataclass(frozen=True)
class Falsum(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    relation: str
    args: Tuple[Term, ...]

    @cached_property
    def free_vars(self) -> FrozenSet[Var]:
        return frozenset(t for t in self.args if isinstance(t, Var))

    @property
    def variables(self) -> Tuple[Var, ...]:
        """Các biến theo thứ tự xuất hiện đầu tiên"""
        return tuple(dict.fromkeys(t for t in self.args if isinstance(t, Var)))


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term

    @cached_property
    def free_vars(self) -> FrozenSet[Var]:
        return frozenset(t for t in (self.left, self.right) if isinstance(t, Var))

    @property
    def trivial(self) -> bool:
        """x = x: trivial guard, bỏ qua trong kiểm tra equality-free"""
        return isinstance(self.left, Var) and self.left == self.right

    @property
    def variables(self) -> Tuple[Var, ...]:
        return tuple(dict.fromkeys(t for t in (self.left, self.right) if isinstance(t, Var)))


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Quantifier(Formula):
    variables: Tuple[Var, ...]
    body: Formula

    def children(self):
        return (self.body,)

    @cached_property
    def free_vars(self) -> FrozenSet[Var]:
        return self.body.free_vars - frozenset(self.variables)


@dataclass(frozen=True)
class Forall(Quantifier):
    pass


@dataclass(frozen=True)
class Exists(Quantifier):
    pass


Literal = Union[Atom, Eq]
BINARY_SYMBOLS = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def print_formula(f: Formula) -> str:
    """
    In công thức ở dạng chuẩn, mọi phép nối hai ngôi đều có ngoặc

    Args:
        f: Công thức

    Returns:
        Chuỗi có thể parse lại thành cùng một AST
    """
    if isinstance(f, Atom):
        return f"{f.relation}({','.join(t.name for t in f.args)})"
    if isinstance(f, Eq):
        return f"{f.left.name} = {f.right.name}"
    if isinstance(f, Verum):
        return "true"
    if isinstance(f, Falsum):
        return "false"
    if isinstance(f, Not):
        return "!" + print_formula(f.body)
    if isinstance(f, Quantifier):
        keyword = "forall" if isinstance(f, Forall) else "exists"
        names = " ".join(v.name for v in f.variables)
        return f"{keyword} {names} {print_formula(f.body)}"
    for cls, symbol in BINARY_SYMBOLS.items():
        if isinstance(f, cls):
            return f"({print_formula(f.left)} {symbol} {print_formula(f.right)})"
    raise TypeError(f"Not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------

def conj(parts: Iterable[Formula]) -> Formula:
    """Hội trái-kết hợp của các công thức; rỗng → true"""
    result: Optional[Formula] = None
    for part in parts:
        result = part if result is None else And(result, part)
    return Verum() if result is None else result


def disj(parts: Iterable[Formula]) -> Formula:
    """Tuyển trái-kết hợp; rỗng → false"""
    result: Optional[Formula] = None
    for part in parts:
        result = part if result is None else Or(result, part)
    return Falsum() if result is None else result


def conjuncts(f: Formula) -> List[Formula]:
    """Làm phẳng chuỗi And"""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def variables(*names: str) -> Tuple[Var, ...]:
    return tuple(Var(n) for n in names)


def atom(relation: str, *names: str) -> Atom:
    """Atom chỉ gồm biến, dùng khi dựng công thức trong code"""
    return Atom(relation, variables(*names))


def literal_variables(lit: Formula) -> Tuple[Var, ...]:
    if isinstance(lit, (Atom, Eq)):
        return lit.variables
    return tuple(sorted(lit.free_vars))


# ---------------------------------------------------------------------------
# Guards
# ---------------------------------------------------------------------------

class GuardSplit(NamedTuple):
    guard: Literal
    matrix: Formula


def split_guard(q: Quantifier) -> Optional[GuardSplit]:
    """
    Nhận diện guard của một lượng từ

    ∀x̄ (γ ∧ χ → ψ) có guard γ và matrix (χ → ψ); ∃x̄ (γ ∧ ψ) có guard γ.
    γ phải là atom (hoặc đẳng thức) chứa mọi biến tự do của matrix.

    Returns:
        GuardSplit hoặc None nếu lượng từ không có guard
    """
    body = q.body
    if isinstance(q, Forall):
        if not isinstance(body, Implies):
            return None
        if isinstance(body.left, (Atom, Eq)) and body.right.free_vars <= body.left.free_vars:
            return GuardSplit(body.left, body.right)
        parts = conjuncts(body.left)
        for i, candidate in enumerate(parts):
            if not isinstance(candidate, (Atom, Eq)):
                continue
            rest = parts[:i] + parts[i + 1:]
            matrix = Implies(conj(rest), body.right) if rest else body.right
            if matrix.free_vars <= candidate.free_vars:
                return GuardSplit(candidate, matrix)
        return None
    if isinstance(body, And) and isinstance(body.left, (Atom, Eq)) and body.right.free_vars <= body.left.free_vars:
        return GuardSplit(body.left, body.right)
    parts = conjuncts(body)
    for i, candidate in enumerate(parts):
        if not isinstance(candidate, (Atom, Eq)):
            continue
        rest = parts[:i] + parts[i + 1:]
        matrix = conj(rest)
        if matrix.free_vars <= candidate.free_vars:
            return GuardSplit(candidate, matrix)
    return None


# ---------------------------------------------------------------------------
# Traversal and rewriting
# ---------------------------------------------------------------------------

def walk(f: Formula, path: Tuple[int, ...] = ()) -> Iterator[Tuple[Tuple[int, ...], Formula]]:
    """Duyệt pre-order, trả về (path, node)"""
    yield path, f
    for i, child in enumerate(f.children()):
        yield from walk(child, path + (i,))


def rebuild(f: Formula, children: Tuple[Formula, ...]) -> Formula:
    if isinstance(f, Not):
        return Not(children[0])
    if isinstance(f, Quantifier):
        return type(f)(f.variables, children[0])
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(children[0], children[1])
    return f


def formula_size(f: Formula) -> int:
    """Số node (atom tính cả số đối số)"""
    if isinstance(f, Atom):
        return 1 + len(f.args)
    if isinstance(f, Eq):
        return 3
    if isinstance(f, Quantifier):
        return len(f.variables) + formula_size(f.body)
    return 1 + sum(formula_size(c) for c in f.children())


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, Quantifier):
        return 1 + quantifier_depth(f.body)
    return max((quantifier_depth(c) for c in f.children()), default=0)


def relations_used(f: Formula) -> FrozenSet[str]:
    return frozenset(node.relation for _, node in walk(f) if isinstance(node, Atom))


def constants_used(f: Formula) -> FrozenSet[str]:
    names = set()
    for _, node in walk(f):
        if isinstance(node, (Atom, Eq)):
            args = node.args if isinstance(node, Atom) else (node.left, node.right)
            names.update(t.name for t in args if isinstance(t, Const))
    return frozenset(names)


def variable_names(f: Formula) -> FrozenSet[str]:
    """Mọi tên biến xuất hiện (tự do, ràng buộc hoặc trong block lượng từ)"""
    names = set()
    for _, node in walk(f):
        if isinstance(node, Quantifier):
            names.update(v.name for v in node.variables)
        elif isinstance(node, (Atom, Eq)):
            names.update(v.name for v in node.free_vars)
    return frozenset(names)


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(node, Quantifier) for _, node in walk(f))


def uses_nontrivial_equality(f: Formula) -> bool:
    return any(isinstance(node, Eq) and not node.trivial for _, node in walk(f))


def substitute(f: Formula, mapping: Dict[Var, Term]) -> Formula:
    """
    Thay biến tự do theo mapping (không tránh capture: giả định biến
    đã được đổi tên tách biệt)
    """
    if not mapping:
        return f

    def term(t: Term) -> Term:
        return mapping.get(t, t) if isinstance(t, Var) else t

    if isinstance(f, Atom):
        return Atom(f.relation, tuple(term(t) for t in f.args))
    if isinstance(f, Eq):
        return Eq(term(f.left), term(f.right))
    if isinstance(f, Quantifier):
        inner = {v: t for v, t in mapping.items() if v not in f.variables}
        return type(f)(f.variables, substitute(f.body, inner))
    children = f.children()
    if not children:
        return f
    return rebuild(f, tuple(substitute(c, mapping) for c in children))


def map_atoms(f: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    """Thay mỗi atom bằng fn(atom)"""
    if isinstance(f, Atom):
        return fn(f)
    children = f.children()
    if not children:
        return f
    return rebuild(f, tuple(map_atoms(c, fn) for c in children))


def fresh_variable(used: Iterable[str], base: str) -> str:
    taken = set(used)
    if base not in taken:
        return base
    index = 1
    while f"{base}_{index}" in taken:
        index += 1
    return f"{base}_{index}"


def rename_apart(f: Formula, reserved: Iterable[str] = ()) -> Formula:
    """
    Đổi tên biến ràng buộc để mỗi tên chỉ được bind một lần và không trùng
    biến tự do. Lần bind đầu tiên giữ nguyên tên nên phép đổi tên là
    idempotent.
    """
    used = set(variable_names(f)) | set(reserved)
    seen = {v.name for v in f.free_vars} | set(reserved)

    def go(node: Formula, env: Dict[Var, Var]) -> Formula:
        if isinstance(node, (Atom, Eq)):
            return substitute(node, env)
        if isinstance(node, Quantifier):
            inner = dict(env)
            new_vars = []
            for v in node.variables:
                if v.name in seen:
                    name = fresh_variable(used, v.name)
                    used.add(name)
                else:
                    name = v.name
                seen.add(name)
                inner[v] = Var(name)
                new_vars.append(Var(name))
            return type(node)(tuple(new_vars), go(node.body, inner))
        children = node.children()
        if not children:
            return node
        return rebuild(node, tuple(go(c, env) for c in children))

    return go(f, {})


def simplify(f: Formula) -> Formula:
    """Khử true/false và x = x trong các phép nối"""
    if isinstance(f, Eq) and f.trivial:
        return Verum()
    if isinstance(f, Not):
        body = simplify(f.body)
        if isinstance(body, Verum):
            return Falsum()
        if isinstance(body, Falsum):
            return Verum()
        if isinstance(body, Not):
            return body.body
        return Not(body)
    if isinstance(f, And):
        left, right = simplify(f.left), simplify(f.right)
        if isinstance(left, Falsum) or isinstance(right, Falsum):
            return Falsum()
        if isinstance(left, Verum):
            return right
        if isinstance(right, Verum):
            return left
        return And(left, right)
    if isinstance(f, Or):
        left, right = simplify(f.left), simplify(f.right)
        if isinstance(left, Verum) or isinstance(right, Verum):
            return Verum()
        if isinstance(left, Falsum):
            return right
        if isinstance(right, Falsum):
            return left
        return Or(left, right)
    if isinstance(f, Implies):
        return simplify(Or(Not(f.left), f.right))
    if isinstance(f, Iff):
        left, right = simplify(f.left), simplify(f.right)
        return simplify(And(Or(Not(left), right), Or(left, Not(right))))
    if isinstance(f, Quantifier):
        return type(f)(f.variables, simplify(f.body))
    return f
