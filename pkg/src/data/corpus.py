"""
Corpus Module

Câu và structure dùng cho test và cho `triguard --corpus`:
    - random_signature / random_structure: structure ngẫu nhiên theo seed
    - random_normal_form: câu dạng chuẩn không đẳng thức ngẫu nhiên
    - random_guarded_sentence: câu GF (tùy chọn +TG) ngẫu nhiên
    - CORPORA: các tập câu chọn sẵn (GFU có / không hằng, GFU+TG, GF+TG)

Mọi phép sinh ngẫu nhiên đều đi qua numpy.random.default_rng(seed).
"""

import itertools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.finder import transitive_closure
from src.logic.normalform import ForallConjunct, ForallExistsConjunct, NormalFormSentence
from src.logic.parser import parse_document
from src.logic.signature import Signature
from src.logic.syntax import And, Atom, Exists, Forall, Formula, Implies, Not, Or, Var, conj
from src.structures.structure import Structure

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Random signatures and structures
# ---------------------------------------------------------------------------

def random_signature(
    seed: int = 0,
    relations: int = 3,
    max_arity: int = 3,
    constants: int = 0,
    universal: bool = False,
    transitive: int = 0,
) -> Signature:
    """
    Signature ngẫu nhiên: quan hệ R0, R1, … (arity 1..max_arity), hằng c0, …,
    U nếu universal, T0, … nếu transitive > 0

    Luôn có ít nhất một quan hệ unary.
    """
    rng = np.random.default_rng(seed)
    arities = {"R0": 1}
    for i in range(1, relations):
        arities[f"R{i}"] = int(rng.integers(1, max_arity + 1))
    names = [f"T{i}" for i in range(transitive)]
    for name in names:
        arities[name] = 2
    if universal:
        arities["U"] = 2
    return Signature.build(
        arities,
        constants=[f"c{i}" for i in range(constants)],
        universal="U" if universal else None,
        transitive=names,
    )


def random_structure(
    sig: Signature,
    size: int,
    density: float = 0.3,
    seed: int = 0,
    ubiquitous: bool = False,
) -> Structure:
    """
    Structure ngẫu nhiên: mỗi ground atom đúng với xác suất density;
    quan hệ transitive được đóng bắc cầu

    Args:
        sig: Signature
        size: Số phần tử (≥ 1)
        density: Xác suất một ground atom đúng
        seed: Seed
        ubiquitous: U đúng trên mọi cặp
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    constants = {c: int(rng.integers(0, size)) for c in sig.constants}
    s = Structure(sig, size, constants=constants)
    for name, arity in sig.relations:
        for t in itertools.product(range(size), repeat=arity):
            if rng.random() < density:
                s.add(name, t)
    if ubiquitous and sig.universal_symbol is not None:
        for t in itertools.product(range(size), repeat=2):
            s.add(sig.universal_symbol, t)
    if sig.transitive_symbols:
        s = transitive_closure(s)
    return s


# ---------------------------------------------------------------------------
# Random sentences
# ---------------------------------------------------------------------------

def _covering_args(rng: np.random.Generator, arity: int, required: Sequence[Var], optional: Sequence[Var]):
    """Tuple độ dài arity chứa mọi biến trong required, phần còn lại lấy từ required ∪ optional"""
    if len(required) > arity:
        return None
    pool = list(required) + list(optional)
    args = list(required) + [pool[int(rng.integers(0, len(pool)))] for _ in range(arity - len(required))]
    rng.shuffle(args)
    return tuple(args)


def _random_literal(rng: np.random.Generator, symbols: Sequence[Tuple[str, int]], variables: Sequence[Var]) -> Formula:
    name, arity = symbols[int(rng.integers(0, len(symbols)))]
    args = tuple(variables[int(rng.integers(0, len(variables)))] for _ in range(arity))
    a = Atom(name, args)
    return Not(a) if rng.random() < 0.5 else a


def _random_matrix(rng, symbols, variables, size: int) -> Formula:
    literals = [_random_literal(rng, symbols, variables) for _ in range(size)]
    if rng.random() < 0.5:
        return conj(literals)
    result = literals[0]
    for lit in literals[1:]:
        result = Or(result, lit)
    return result


def _guard(rng, symbols, variables: Sequence[Var]) -> Optional[Atom]:
    fitting = [(n, a) for n, a in symbols if a >= len(variables)]
    if not fitting:
        return None
    name, arity = fitting[int(rng.integers(0, len(fitting)))]
    return Atom(name, _covering_args(rng, arity, variables, ()))


def random_normal_form(
    sig: Signature,
    seed: int = 0,
    forall_exists: int = 2,
    foralls: int = 1,
    matrix_size: int = 2,
) -> NormalFormSentence:
    """
    Câu dạng chuẩn không đẳng thức, không hằng, ngẫu nhiên trên các quan hệ
    không transitive của sig

    Returns:
        NormalFormSentence đã validate
    """
    rng = np.random.default_rng(seed)
    symbols = [(n, a) for n, a in sig.relations if not sig.is_transitive(n)]
    width = max(a for _, a in symbols)
    xs = [Var(f"x{i + 1}") for i in range(width)]
    ys = [Var(f"y{i + 1}") for i in range(width)]

    fe = []
    for _ in range(forall_exists):
        outer = xs[: int(rng.integers(1, width + 1))]
        guard = _guard(rng, symbols, outer) or _guard(rng, symbols, outer[:1])
        outer = tuple(sorted(guard.free_vars, key=lambda v: v.name))
        name, arity = symbols[int(rng.integers(0, len(symbols)))]
        inner = ys[: int(rng.integers(1, arity + 1))]
        args = _covering_args(rng, arity, inner, outer)
        wg = Atom(name, args)
        witnesses = tuple(v for v in inner if v in args)
        scope = sorted(wg.free_vars, key=lambda v: v.name)
        fe.append(ForallExistsConjunct(outer, guard, witnesses, wg, _random_matrix(rng, symbols, scope, matrix_size)))
    fa = []
    for _ in range(foralls):
        outer = xs[: int(rng.integers(1, width + 1))]
        guard = _guard(rng, symbols, outer) or _guard(rng, symbols, outer[:1])
        scope = tuple(sorted(guard.free_vars, key=lambda v: v.name))
        fa.append(ForallConjunct(scope, guard, _random_matrix(rng, symbols, scope, matrix_size)))
    nf = NormalFormSentence(sig, tuple(fe), tuple(fa))
    nf.validate()
    return nf


def random_guarded_sentence(sig: Signature, seed: int = 0, depth: int = 2) -> Formula:
    """
    Câu GF không đẳng thức, không hằng ngẫu nhiên; ký hiệu transitive của
    sig (nếu có) chỉ được dùng làm guard ∃y (T(x,y) ∧ …) / ∀y (T(x,y) → …)

    Args:
        sig: Signature có ít nhất một quan hệ unary không transitive
        seed: Seed
        depth: Độ sâu lượng từ tối đa
    """
    rng = np.random.default_rng(seed)
    symbols = [(n, a) for n, a in sig.relations if not sig.is_transitive(n) and n != sig.universal_symbol]
    transitive = sorted(sig.transitive_symbols)
    counter = itertools.count()

    def fresh() -> Var:
        return Var(f"v{next(counter)}")

    def quantified(free: List[Var], level: int) -> Formula:
        universal = rng.random() < 0.5
        if not free:
            v = fresh()
            body = gen([v], level - 1)
            return Forall((v,), body) if universal else Exists((v,), body)
        anchor = free[int(rng.integers(0, len(free)))]
        new = fresh()
        if transitive and rng.random() < 0.5:
            name = transitive[int(rng.integers(0, len(transitive)))]
            guard = Atom(name, (anchor, new) if rng.random() < 0.5 else (new, anchor))
        else:
            g = _guard(rng, symbols, [anchor, new])
            if g is None:
                return _random_literal(rng, symbols, free)
            guard = g
        body = gen(sorted(guard.free_vars, key=lambda v: v.name), level - 1)
        return Forall((new,), Implies(guard, body)) if universal else Exists((new,), And(guard, body))

    def gen(free: List[Var], level: int) -> Formula:
        if level <= 0 or (free and rng.random() < 0.3):
            return _random_literal(rng, symbols, free) if free else quantified(free, 1)
        choice = rng.random()
        if choice < 0.25:
            return And(gen(free, level - 1), gen(free, level - 1))
        if choice < 0.4:
            return Or(gen(free, level - 1), gen(free, level - 1))
        return quantified(free, level)

    return quantified([], depth + 1)


# ---------------------------------------------------------------------------
# Curated corpora
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusEntry:
    """Một câu của corpus; satisfiable = None nếu chưa biết"""

    name: str
    text: str
    logic: str
    satisfiable: Optional[bool] = True

    def parse(self) -> Tuple[Signature, Formula]:
        return parse_document(self.text)


def _entries(logic: str, items: Sequence[Tuple[str, str, bool]]) -> List[CorpusEntry]:
    return [CorpusEntry(name, text.strip() + "\n", logic, sat) for name, text, sat in items]


GFU = _entries("gfu", [
    ("gfu_exists", "rel P/1; universal U;\nexists x (P(x))", True),
    ("gfu_successor", "rel P/1; rel R/2; universal U;\n"
     "exists x (P(x)) & forall x (P(x) -> exists y (R(x,y) & P(y)))", True),
    ("gfu_alternating", "rel P/1; universal U;\n"
     "exists x (P(x)) & forall x (P(x) -> exists y (U(x,y) & !P(y)))", True),
    ("gfu_tournament", "rel R/2; universal U;\n"
     "forall x y (U(x,y) -> (R(x,y) | R(y,x)))", True),
    ("gfu_asymmetric", "rel P/1; rel R/2; universal U;\n"
     "exists x (P(x)) & forall x (P(x) -> exists y (R(x,y) & !R(y,x)))", True),
    ("gfu_ternary", "rel P/1; rel S/3; universal U;\n"
     "exists x (P(x)) & forall x (P(x) -> exists y z (S(x,y,z) & P(z))) & forall x y z (S(x,y,z) -> S(y,z,x))", True),
    ("gfu_partition", "rel P/1; rel Q/1; universal U;\n"
     "forall x (P(x) | Q(x)) & forall x (P(x) -> !Q(x)) & exists x (P(x)) & exists x (Q(x))", True),
    ("gfu_symmetric", "rel R/2; universal U;\n"
     "forall x y (U(x,y) -> (R(x,y) -> R(y,x))) & exists x (exists y (R(x,y) & R(y,x)))", True),
    ("gfu_clique", "rel P/1; rel R/2; universal U;\n"
     "forall x y ((P(x) & P(y)) -> R(x,y)) & exists x (P(x))", True),
    ("gfu_no_loops", "rel P/1; rel R/2; universal U;\n"
     "forall x (R(x,x) -> false) & forall x (P(x) -> exists y (R(x,y) & P(y))) & exists x (P(x))", True),
    ("gfu_two_kinds", "rel A/1; rel B/1; rel R/2; universal U;\n"
     "forall x (A(x) -> exists y (R(x,y) & B(y))) & forall x (B(x) -> exists y (R(y,x) & A(y))) & exists x (A(x))",
     True),
    ("gfu_cover", "rel R/2; universal U;\n"
     "forall x y (R(x,y) -> R(y,x)) & forall x (exists y (R(x,y) & !R(y,y)))", True),
    ("gfu_loop", "rel R/2; universal U;\nforall x (exists y (R(x,y) & R(y,x)))", True),
    ("gfu_implication", "rel P/1; rel Q/1; universal U;\nforall x (P(x) -> Q(x)) & exists x (P(x))", True),
    ("gfu_u_witness", "rel P/1; rel Q/1; universal U;\n"
     "forall x (P(x) -> exists y (U(x,y) & Q(y))) & exists x (P(x))", True),
    ("gfu_reflexive_pair", "rel R/2; universal U;\nforall x y (R(x,y) -> R(y,x)) & exists x (R(x,x))", True),
    ("gfu_ternary_mirror", "rel S/3; universal U;\n"
     "forall x y z (S(x,y,z) -> S(z,y,x)) & exists x (S(x,x,x))", True),
    ("gfu_chain", "rel P/1; rel Q/1; rel R/2; universal U;\n"
     "forall x (P(x) -> exists y (R(x,y) & Q(y))) & forall x (Q(x) -> exists y (R(x,y) & P(y))) & exists x (P(x))",
     True),
    ("gfu_u_closed", "rel P/1; universal U;\nforall x y (U(x,y) -> (P(x) -> P(y))) & exists x (P(x))", True),
    ("gfu_disjunction", "rel P/1; rel Q/1; universal U;\nforall x (P(x) | Q(x)) & exists x (Q(x))", True),
    ("gfu_guarded_pair", "rel P/1; rel R/2; universal U;\n"
     "forall x y (R(x,y) -> (P(x) & P(y))) & exists x (R(x,x))", True),
    ("gfu_u_cover", "rel P/1; rel Q/1; universal U;\n"
     "forall x (exists y (U(x,y) & (P(y) | Q(y)))) & forall x (P(x) -> Q(x))", True),
    ("gfu_ternary_witness", "rel P/1; rel S/3; universal U;\n"
     "forall x (P(x) -> exists y z (S(x,y,z) & P(z))) & exists x (P(x))", True),
    ("gfu_biconditional", "rel P/1; rel Q/1; universal U;\nforall x (P(x) <-> Q(x)) & exists x (P(x) & Q(x))", True),
    ("gfu_universal_link", "rel P/1; rel R/2; universal U;\n"
     "forall x y (U(x,y) -> (P(x) -> R(x,y))) & exists x (P(x))", True),
    ("gfu_empty_u", "rel P/1; universal U;\nforall x y (U(x,y) -> false)", False),
])

GFU_CONSTANTS = _entries("gfu", [
    ("gfuc_named", "rel P/1; const c; universal U;\n"
     "P(c) & forall x (P(x) -> exists y (U(x,y) & !P(y)))", True),
    ("gfuc_link", "rel P/1; rel R/2; const c; universal U;\n"
     "forall x (P(x) -> R(x,c)) & exists x (P(x))", True),
    ("gfuc_successor", "rel R/2; const c; universal U;\n"
     "exists x (R(c,x)) & forall x (R(c,x) -> exists y (R(x,y) & !R(y,x)))", True),
    ("gfuc_two_constants", "rel P/1; const c, d; universal U;\n"
     "P(c) & !P(d) & forall x (P(x) -> exists y (U(x,y) & !P(y)))", True),
    ("gfuc_avoid", "rel P/1; rel Q/1; const c; universal U;\n"
     "Q(c) & forall x (Q(x) -> !P(x)) & exists x (P(x))", True),
    ("gfuc_ternary", "rel S/3; const c; universal U;\n"
     "forall x (exists y (S(x,y,c) & true))", True),
    ("gfuc_bidirectional", "rel R/2; const c; universal U;\n"
     "forall x (R(x,c) -> R(c,x)) & exists x (R(x,c) & !R(x,x))", True),
    ("gfuc_pointing", "rel P/1; rel R/2; const c; universal U;\n"
     "forall x y (U(x,y) -> (R(x,y) -> !P(y))) & P(c) & exists x (R(x,x))", True),
])

GFU_TG = _entries("gfutg", [
    ("gfutg_successor", "rel P/1; rel Q/1; universal U; transitive T;\n"
     "exists x (P(x)) & forall x (P(x) -> exists y (T(x,y) & Q(y)))", True),
    ("gfutg_monotone", "rel P/1; universal U; transitive T;\n"
     "forall x y (T(x,y) -> (P(x) -> P(y))) & exists x (P(x) & exists y (T(x,y) & true))", True),
    ("gfutg_serial", "rel P/1; universal U; transitive T;\n"
     "forall x (exists y (T(x,y) & true))", True),
    ("gfutg_two_orders", "rel P/1; universal U; transitive S, T;\n"
     "forall x (P(x) -> exists y (T(x,y) & !P(y))) & forall x (!P(x) -> exists y (S(x,y) & P(y))) & exists x (P(x))",
     True),
    ("gfutg_tournament", "rel R/2; universal U; transitive T;\n"
     "forall x y (U(x,y) -> (R(x,y) | R(y,x))) & forall x (exists y (T(x,y) & R(x,y)))", True),
    ("gfutg_backward", "rel P/1; rel Q/1; universal U; transitive T;\n"
     "forall x (Q(x) -> exists y (T(y,x) & P(y))) & exists x (Q(x))", True),
    ("gfutg_cover", "rel P/1; universal U; transitive T;\n"
     "forall x y (T(x,y) -> (P(x) | P(y))) & forall x (exists y (T(x,y) & true))", True),
    ("gfutg_cycle", "rel A/1; rel B/1; universal U; transitive T;\n"
     "forall x (A(x) -> !B(x)) & forall x (A(x) -> exists y (T(x,y) & B(y))) "
     "& forall x (B(x) -> exists y (T(x,y) & A(y))) & exists x (A(x))", True),
    ("gfutg_unguarded", "rel P/1; universal U; transitive T;\n"
     "exists x (P(x)) & forall x y ((P(x) & !P(y)) -> exists z (T(y,z) & P(z)))", True),
    ("gfutg_guarded_forall", "rel P/1; rel Q/1; universal U; transitive T;\n"
     "forall x y (T(x,y) -> (P(x) -> Q(y))) & exists x (P(x))", True),
    ("gfutg_reach", "rel P/1; universal U; transitive T;\n"
     "forall x (P(x) -> exists y (T(x,y) & P(y))) & exists x (P(x))", True),
    ("gfutg_mixed", "rel P/1; rel R/2; universal U; transitive T;\n"
     "forall x (P(x) -> exists y (R(x,y) & P(y))) & forall x y (T(x,y) -> (P(x) -> P(y))) & exists x (P(x))",
     True),
    ("gfutg_infinity", "universal U; transitive T;\n"
     "forall x (exists y (T(x,y) & true)) & forall x (T(x,x) -> false)", False),
])

GF_TG = _entries("gftg", [
    ("gftg_trivial", "rel P/1;\nforall x (x = x -> P(x))", True),
    ("gftg_successor", "rel P/1; rel Q/1; transitive T;\n"
     "exists x (P(x)) & forall x (P(x) -> exists y (T(x,y) & Q(y)))", True),
    ("gftg_monotone", "rel P/1; transitive T;\n"
     "forall x y (T(x,y) -> (P(x) -> P(y))) & exists x (P(x) & exists y (T(x,y) & true))", True),
    ("gftg_mixed", "rel P/1; rel Q/1; rel R/2; transitive T;\n"
     "exists x (P(x)) & forall x (P(x) -> exists y (R(x,y) & Q(y))) & forall x (Q(x) -> exists y (T(x,y) & P(y)))",
     True),
    ("gftg_backward", "rel P/1; rel Q/1; transitive T;\n"
     "forall x (Q(x) -> exists y (T(y,x) & P(y))) & exists x (Q(x))", True),
    ("gftg_irreflexive_edge", "rel R/2; transitive T;\n"
     "forall x y (R(x,y) -> !(x = y)) & exists x (exists y (R(x,y) & true))", True),
    ("gftg_infinity", "transitive T;\n"
     "forall x (exists y (T(x,y) & true)) & forall x (T(x,x) -> false)", False),
    ("gftg_contradiction", "rel P/1;\nexists x (P(x)) & forall x (P(x) -> false)", False),
])

CORPORA: Dict[str, List[CorpusEntry]] = {
    "gfu": GFU,
    "gfu_constants": GFU_CONSTANTS,
    "gfu_tg": GFU_TG,
    "gf_tg": GF_TG,
}


def load_corpus(name: str) -> List[CorpusEntry]:
    try:
        return list(CORPORA[name])
    except KeyError:
        raise ValueError(f"Unknown corpus {name}, expected one of {sorted(CORPORA)}")


def write_corpus(directory, names: Optional[Sequence[str]] = None) -> List[Path]:
    """Ghi các corpus ra thư mục, mỗi câu một file <name>.gf"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for corpus in names or sorted(CORPORA):
        for entry in load_corpus(corpus):
            path = directory / f"{entry.name}.gf"
            path.write_text(entry.text, encoding="utf-8")
            paths.append(path)
    logger.info("Wrote %d corpus files to %s", len(paths), directory)
    return paths
