"""
Finder Module

Bounded finite-model finder cho câu dạng chuẩn.

Với mỗi kích thước domain n = 1, 2, … (iterative deepening) và mỗi cách
gán hằng (restricted growth string), mọi ground atom trên {0,…,n−1} là một
biến Boolean của z3:
    - ∀-conjunct: γ(ā) → ψ(ā) cho mọi ā
    - ∀∃-conjunct: γ(ā) → ⋁_b̄ (γ′(ā,b̄) ∧ ψ(ā,b̄))
    - transitive: T(a,b) ∧ T(b,c) → T(a,c)
    - ubiquitous: U(a,b) cho mọi a, b
    - max_distinct_elements_per_fact, ramified: ràng buộc cứng trên atom

Mô hình trả về luôn được kiểm tra lại bằng check_model.
"""

import itertools
import logging
from collections import Counter
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import z3

from src.analysis.modelcheck import check_model
from src.config import SearchConfig
from src.exceptions import ConstructionError, StructureError
from src.logic.normalform import NormalFormSentence
from src.logic.signature import Signature
from src.logic.syntax import And, Atom, Const, Eq, Falsum, Formula, Iff, Implies, Not, Or, Var, Verum
from src.structures.structure import Structure
from src.structures.types import AtomicType, atomic_type, is_guarded

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Grounding
# ---------------------------------------------------------------------------

class _Grounding:
    """Biến z3 cho các ground atom trên domain cố định"""

    def __init__(self, sig: Signature, size: int, constants: Dict[str, int], order: np.ndarray):
        self.sig = sig
        self.size = size
        self.constants = constants
        self.atoms: Dict[Tuple[str, Tuple[int, ...]], z3.BoolRef] = {}
        for name, arity in sig.relations:
            for t in itertools.product(range(size), repeat=arity):
                key = (name, t)
                self.atoms[key] = z3.Bool(f"{name}{t}")
        self.order = order

    def value(self, term, env: Dict[Var, int]) -> int:
        return self.constants[term.name] if isinstance(term, Const) else env[term]

    def ground(self, f: Formula, env: Dict[Var, int]):
        """Công thức không lượng từ → biểu thức z3 (đẳng thức được tính luôn)"""
        if isinstance(f, Atom):
            return self.atoms[(f.relation, tuple(self.value(t, env) for t in f.args))]
        if isinstance(f, Eq):
            return z3.BoolVal(self.value(f.left, env) == self.value(f.right, env))
        if isinstance(f, Verum):
            return z3.BoolVal(True)
        if isinstance(f, Falsum):
            return z3.BoolVal(False)
        if isinstance(f, Not):
            return z3.Not(self.ground(f.body, env))
        if isinstance(f, And):
            return z3.And(self.ground(f.left, env), self.ground(f.right, env))
        if isinstance(f, Or):
            return z3.Or(self.ground(f.left, env), self.ground(f.right, env))
        if isinstance(f, Implies):
            return z3.Implies(self.ground(f.left, env), self.ground(f.right, env))
        if isinstance(f, Iff):
            return self.ground(f.left, env) == self.ground(f.right, env)
        raise ConstructionError(f"Matrix is not quantifier-free: {f}")

    def environments(self, variables: Sequence[Var]) -> Iterator[Dict[Var, int]]:
        for values in itertools.product(range(self.size), repeat=len(variables)):
            yield dict(zip(variables, values))


def _constraints(nf: NormalFormSentence, g: _Grounding, cfg: SearchConfig) -> List[z3.BoolRef]:
    sig = nf.signature
    constraints: List[z3.BoolRef] = []
    for c in nf.forall_exists_conjuncts:
        for env in g.environments(c.variables):
            options = []
            for b in g.environments(c.witnesses):
                full = {**env, **b}
                options.append(z3.And(g.ground(c.witness_guard, full), g.ground(c.matrix, full)))
            constraints.append(z3.Implies(g.ground(c.guard, env), z3.Or(options)))
    for c in nf.forall_conjuncts:
        for env in g.environments(c.variables):
            constraints.append(z3.Implies(g.ground(c.guard, env), g.ground(c.matrix, env)))

    n = g.size
    if cfg.transitive:
        for name in sorted(sig.transitive_symbols):
            for a, b, c in itertools.product(range(n), repeat=3):
                constraints.append(
                    z3.Implies(z3.And(g.atoms[(name, (a, b))], g.atoms[(name, (b, c))]), g.atoms[(name, (a, c))])
                )
    if cfg.ubiquitous:
        if sig.universal_symbol is None:
            raise StructureError("ubiquitous search needs a universal symbol")
        for a, b in itertools.product(range(n), repeat=2):
            constraints.append(g.atoms[(sig.universal_symbol, (a, b))])
    if cfg.max_distinct_elements_per_fact is not None:
        for (name, t), atom in g.atoms.items():
            if len(set(t)) > cfg.max_distinct_elements_per_fact:
                constraints.append(z3.Not(atom))
    if cfg.ramified:
        transitive = sorted(sig.transitive_symbols)
        for a, b in itertools.combinations(range(n), 2):
            for t1, t2 in itertools.combinations(transitive, 2):
                first = z3.Or(g.atoms[(t1, (a, b))], g.atoms[(t1, (b, a))])
                second = z3.Or(g.atoms[(t2, (a, b))], g.atoms[(t2, (b, a))])
                constraints.append(z3.Not(z3.And(first, second)))
    return constraints


def constant_assignments(constants: Sequence[str], size: int) -> Iterator[Dict[str, int]]:
    """Restricted growth strings: hằng thứ i nhận giá trị ≤ max(trước) + 1"""
    names = sorted(constants)

    def extend(i: int, current: Dict[str, int], top: int) -> Iterator[Dict[str, int]]:
        if i == len(names):
            yield dict(current)
            return
        for e in range(min(top + 2, size)):
            current[names[i]] = e
            yield from extend(i + 1, current, max(top, e))
        current.pop(names[i], None)

    yield from extend(0, {}, -1)


def _solve(nf: NormalFormSentence, size: int, constants: Dict[str, int], cfg: SearchConfig) -> Optional[Structure]:
    rng = np.random.default_rng(cfg.seed)
    g = _Grounding(nf.signature, size, constants, rng.permutation(size))
    solver = z3.Solver()
    solver.set("random_seed", cfg.seed)
    for constraint in _constraints(nf, g, cfg):
        solver.add(constraint)
    if solver.check() != z3.sat:
        return None
    model = solver.model()
    # hoán vị theo seed; các tính chất trên đều bất biến qua đổi tên phần tử
    rename = {old: int(new) for old, new in enumerate(g.order)}
    facts = [
        (name, tuple(rename[e] for e in t))
        for (name, t), atom in g.atoms.items()
        if z3.is_true(model.eval(atom, model_completion=True))
    ]
    renamed_constants = {c: rename[e] for c, e in constants.items()}
    return Structure(nf.signature, size, facts, renamed_constants)


def find_model(nf: NormalFormSentence, cfg: Optional[SearchConfig] = None) -> Optional[Structure]:
    """
    Tìm mô hình hữu hạn của nf với kích thước ≤ cfg.max_domain_size

    Args:
        nf: Câu dạng chuẩn
        cfg: Cấu hình tìm kiếm (flags ngữ nghĩa, ràng buộc cấu trúc, seed)

    Returns:
        Structure nhỏ nhất tìm được, hoặc None nếu không có trong giới hạn
    """
    cfg = cfg or SearchConfig()
    for size in range(1, cfg.max_domain_size + 1):
        for constants in constant_assignments(nf.signature.constants, size):
            model = _solve(nf, size, constants, cfg)
            if model is None:
                continue
            report = check_model(model, nf, ubiquitous=cfg.ubiquitous, transitive=cfg.transitive, limit=5)
            if not report.verdict:
                raise ConstructionError(f"Finder produced a structure rejected by the checker: {report.violations}")
            logger.info("Found model of size %d with %d facts", size, model.fact_count)
            return model
        logger.debug("No model of size %d", size)
    logger.info("No model up to size %d", cfg.max_domain_size)
    return None


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------

def enumerate_structures(sig: Signature, size: int) -> Iterator[Structure]:
    """Mọi structure kích thước size trên sig (chỉ dùng cho signature rất nhỏ)"""
    ground = [(name, t) for name, arity in sig.relations for t in itertools.product(range(size), repeat=arity)]
    if len(ground) > 20:
        raise StructureError(f"Refusing to enumerate 2^{len(ground)} structures")
    for constants in constant_assignments(sig.constants, size):
        for bits in itertools.product((False, True), repeat=len(ground)):
            facts = [fact for fact, bit in zip(ground, bits) if bit]
            yield Structure(sig, size, facts, constants)


def exhaustive_find(nf: NormalFormSentence, cfg: Optional[SearchConfig] = None) -> Optional[Structure]:
    """Như find_model nhưng duyệt toàn bộ structure (oracle cho test)"""
    cfg = cfg or SearchConfig()
    for size in range(1, cfg.max_domain_size + 1):
        for s in enumerate_structures(nf.signature, size):
            if cfg.max_distinct_elements_per_fact is not None and any(
                len(set(t)) > cfg.max_distinct_elements_per_fact for _, t in s.iter_facts()
            ):
                continue
            if cfg.ramified and not is_ramified(s):
                continue
            if check_model(s, nf, cfg.ubiquitous, cfg.transitive, limit=1).verdict:
                return s
    return None


def is_ramified(s: Structure) -> bool:
    """Mỗi cặp phần tử khác nhau được nối bởi nhiều nhất một quan hệ transitive"""
    links: Counter = Counter()
    for name in s.signature.transitive_symbols:
        pairs = {tuple(sorted(t)) for t in s.relation(name).tuples() if t[0] != t[1]}
        links.update(pairs)
    return all(count <= 1 for count in links.values())


# ---------------------------------------------------------------------------
# Closure and realized types
# ---------------------------------------------------------------------------

def transitive_closure(s: Structure) -> Structure:
    """Đóng bắc cầu (nhỏ nhất) mọi quan hệ transitive; quan hệ khác giữ nguyên"""
    result = s.copy()
    for name in sorted(s.signature.transitive_symbols):
        graph = nx.DiGraph()
        graph.add_nodes_from(s.domain)
        graph.add_edges_from(s.relation(name).tuples())
        closure = nx.transitive_closure(graph, reflexive=False)
        for a, b in closure.edges():
            result.add(name, (a, b))
    return result


def realized_types(s: Structure) -> Tuple[FrozenSet[AtomicType], FrozenSet[AtomicType]]:
    """
    (α, β): các 1-type được thực hiện và các 2-type guarded, non-degenerate
    được thực hiện trong s
    """
    alpha = frozenset(atomic_type(s, (a,)) for a in s.domain)
    pairs = set()
    for _, t in s.iter_facts():
        for a, b in itertools.permutations(sorted(set(t)), 2):
            pairs.add((a, b))
    beta = frozenset(atomic_type(s, p) for p in sorted(pairs) if is_guarded(s, p))
    return alpha, beta


def type_counts(s: Structure) -> Counter:
    """Số phần tử thực hiện mỗi 1-type"""
    return Counter(atomic_type(s, (a,)) for a in s.domain)
