"""
Deciders Module

Quyết định tính thỏa mãn hữu hạn trong giới hạn (Budgets):

    decide_finsat_gftg : GF+TG, không hằng. Với mỗi disjunct dạng chuẩn và
                         mỗi ứng viên (α, β): φ_B và φ_C có mô hình, mọi β
                         thỏa các ∀-conjunct ⇒ có mô hình hữu hạn (A′)
    decide_finsat_gfutg: GFU+TG / TGF+TG, không hằng, không đẳng thức. Với
                         mỗi α: φ* có mô hình ⇒ saturation cho mô hình
                         U-biquitous

Ứng viên được thử theo thứ tự: type thực hiện trong mô hình tìm trực tiếp
(nếu có), sau đó tăng dần |α| rồi |β|. Kết quả "true" luôn kèm một mô hình
đã được kiểm tra; "false" nghĩa là không tìm thấy trong giới hạn.
"""

import itertools
import logging
import warnings
from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

import pandas as pd

from src.analysis.finder import find_model, realized_types
from src.analysis.modelcheck import check_model, evaluate
from src.config import Budgets, SaturationOptions
from src.exceptions import ConstructionError, FragmentError
from src.logic.fragments import classify_fragment
from src.logic.normalform import NormalFormSentence, enhance_tg_normal_form, to_normal_form
from src.logic.signature import Signature
from src.logic.syntax import Atom, Formula, Var, constants_used, uses_nontrivial_equality
from src.models.saturation import build_phi_star, saturate
from src.models.tgconstruct import (
    build_phi_B, build_phi_C, grid_side, pair_tuples, small_model_from_blocks,
)
from src.structures.structure import Structure
from src.structures.types import AtomicType, realize_type

logger = logging.getLogger(__name__)

# Giới hạn số atom khi liệt kê type; vượt quá thì chỉ dùng ứng viên từ mô hình trực tiếp
MAX_UNARY_ATOMS = 12
MAX_CROSS_ATOMS = 10


@dataclass
class FinsatResult:
    """
    Kết quả decider

    Attributes:
        satisfiable: Tìm được mô hình hữu hạn trong giới hạn
        certificate: Mô hình (reduct về signature ban đầu) nếu satisfiable
        disjunct: Chỉ số disjunct dạng chuẩn cho ra certificate
        alpha, beta: Ứng viên cho ra certificate
        candidates_tried: Số ứng viên đã thử
        skipped: Số ứng viên thỏa nhưng certificate vượt giới hạn
        method: "grid", "saturation" hoặc "finder"
    """

    satisfiable: bool
    certificate: Optional[Structure] = None
    disjunct: Optional[int] = None
    alpha: FrozenSet[AtomicType] = frozenset()
    beta: FrozenSet[AtomicType] = frozenset()
    candidates_tried: int = 0
    skipped: int = 0
    method: Optional[str] = None

    def __bool__(self) -> bool:
        return self.satisfiable

    def summary(self) -> pd.Series:
        return pd.Series({
            "satisfiable": self.satisfiable,
            "model_size": self.certificate.size if self.certificate is not None else None,
            "disjunct": self.disjunct,
            "alpha": len(self.alpha),
            "beta": len(self.beta),
            "candidates_tried": self.candidates_tried,
            "skipped": self.skipped,
            "method": self.method,
        })


# ---------------------------------------------------------------------------
# Type enumeration
# ---------------------------------------------------------------------------

def _forall_part(nf: NormalFormSentence) -> NormalFormSentence:
    return NormalFormSentence(nf.signature, (), nf.forall_conjuncts)


def satisfies_foralls(t: AtomicType, nf: NormalFormSentence) -> bool:
    """Structure nhỏ nhất thực hiện t thỏa mọi ∀-conjunct của nf"""
    return check_model(realize_type(t), _forall_part(nf), limit=1).verdict


def enumerate_one_types(sig: Signature) -> List[AtomicType]:
    """Mọi 1-type trên signature không hằng, theo thứ tự canonical"""
    x1 = Var("x1")
    atoms = [Atom(name, (x1,) * arity) for name, arity in sig.relations]
    result = []
    for r in range(len(atoms) + 1):
        for chosen in itertools.combinations(atoms, r):
            result.append(AtomicType(1, frozenset(chosen), signature=sig))
    return sorted(result, key=lambda t: t.sort_key)


def cross_atoms(sig: Signature) -> List[Atom]:
    x1, x2 = Var("x1"), Var("x2")
    rename = {Var("x"): x1, Var("y"): x2}
    return [
        Atom(name, tuple(rename[v] for v in t))
        for name, arity in sig.relations
        for t in pair_tuples(arity)
    ]


def enumerate_two_types(sig: Signature, alpha: Sequence[AtomicType]) -> List[AtomicType]:
    """
    Các 2-type guarded, non-degenerate có hai 1-type thuộc alpha

    Raises:
        ValueError: Quá nhiều atom chéo để liệt kê
    """
    cross = cross_atoms(sig)
    if len(cross) > MAX_CROSS_ATOMS:
        raise ValueError(f"{len(cross)} cross atoms exceed the enumeration limit {MAX_CROSS_ATOMS}")
    x2 = Var("x2")
    result = []
    for first, second in itertools.product(alpha, repeat=2):
        base = set(first.positives) | {Atom(a.relation, (x2,) * len(a.args)) for a in second.positives}
        for r in range(1, len(cross) + 1):
            for chosen in itertools.combinations(cross, r):
                result.append(AtomicType(2, frozenset(base | set(chosen)), signature=sig))
    return sorted(result, key=lambda t: t.sort_key)


def _orbits(types: Sequence[AtomicType]) -> List[FrozenSet[AtomicType]]:
    seen = set()
    orbits = []
    for t in types:
        if t in seen:
            continue
        orbit = frozenset({t, t.inverse()})
        seen |= orbit
        orbits.append(orbit)
    return orbits


def _one_type_pool(nf: NormalFormSentence, ubiquitous: bool) -> List[AtomicType]:
    sig = nf.signature
    if len(sig.relations) > MAX_UNARY_ATOMS:
        warnings.warn(
            f"{len(sig.relations)} relations exceed the 1-type enumeration limit; only seeded candidates are tried"
        )
        return []
    pool = [t for t in enumerate_one_types(sig) if satisfies_foralls(t, nf)]
    if ubiquitous:
        x1 = Var("x1")
        pool = [t for t in pool if Atom(sig.universal_symbol, (x1, x1)) in t.positives]
    return pool


def alpha_candidates(
    nf: NormalFormSentence,
    budgets: Budgets,
    seeds: Sequence[FrozenSet[AtomicType]] = (),
    ubiquitous: bool = False,
) -> Iterator[FrozenSet[AtomicType]]:
    """Các tập 1-type: seeds trước, sau đó tăng dần |α|"""
    seen = set()
    for alpha in seeds:
        seen.add(alpha)
        yield alpha
    pool = _one_type_pool(nf, ubiquitous)
    for size in range(1, min(budgets.alpha_max, len(pool)) + 1):
        for chosen in itertools.combinations(pool, size):
            alpha = frozenset(chosen)
            if alpha not in seen:
                seen.add(alpha)
                yield alpha


def type_candidates(
    nf: NormalFormSentence,
    budgets: Budgets,
    seeds: Sequence[Tuple[FrozenSet[AtomicType], FrozenSet[AtomicType]]] = (),
) -> Iterator[Tuple[FrozenSet[AtomicType], FrozenSet[AtomicType]]]:
    """Các cặp (α, β), β đóng với phép nghịch đảo.

    Seeds trước, sau đó tăng dần |α| rồi |β|
    """
    seen = set()
    for candidate in seeds:
        seen.add(candidate)
        yield candidate
    enumerate_beta = len(cross_atoms(nf.signature)) <= MAX_CROSS_ATOMS
    if not enumerate_beta:
        warnings.warn("Too many cross atoms to enumerate 2-types; only 2-type sets without members are tried")
    for alpha in alpha_candidates(nf, budgets):
        pool = []
        if enumerate_beta:
            pool = [t for t in enumerate_two_types(nf.signature, sorted(alpha, key=lambda a: a.sort_key))
                    if _has_aux(t, nf) and satisfies_foralls(t, nf)]
        orbits = _orbits(pool)
        for target in range(budgets.beta_max + 1):
            for r in range((target + 1) // 2, target + 1):
                for chosen in itertools.combinations(orbits, r):
                    if sum(len(o) for o in chosen) != target:
                        continue
                    candidate = (alpha, frozenset().union(*chosen))
                    if candidate not in seen:
                        seen.add(candidate)
                        yield candidate


def _has_aux(t: AtomicType, nf: NormalFormSentence) -> bool:
    aux = nf.signature.aux_symbol
    return Atom(aux, (Var("x1"), Var("x2"))) in t.positives


def _certify(
    certificate: Structure,
    nf: NormalFormSentence,
    phi0: Formula,
    sig: Signature,
    ubiquitous: bool,
) -> Structure:
    report = check_model(certificate, nf, ubiquitous=ubiquitous, transitive=True, limit=5)
    if not report:
        raise ConstructionError(f"Certificate is not a model of the normal form: {report.violations}")
    reduct = certificate.reduct(sig)
    if not evaluate(reduct, phi0):
        raise ConstructionError("Certificate does not satisfy the input sentence")
    return reduct


# ---------------------------------------------------------------------------
# GF+TG
# ---------------------------------------------------------------------------

def decide_finsat_gftg(phi0: Formula, sig: Signature, budgets: Optional[Budgets] = None) -> FinsatResult:
    """
    Tính thỏa mãn hữu hạn của câu GF+TG trong giới hạn

    Hết ứng viên (α, β) mà finder đã tìm được mô hình trực tiếp thì
    certificate là mô hình đó (method = "finder").

    Args:
        phi0: Câu GF+TG không hằng
        sig: Signature
        budgets: Giới hạn |α|, |β|, finder, số ứng viên, K

    Returns:
        FinsatResult

    Raises:
        FragmentError: phi0 không thuộc GF+TG hoặc dùng hằng
    """
    budgets = budgets or Budgets()
    if sig.constants or constants_used(phi0):
        raise FragmentError("GF+TG decision procedure does not support constants")
    report = classify_fragment(phi0, sig)
    if not report.member("GF+TG"):
        raise FragmentError(f"Formula is not in GF+TG ({report.summary()})")

    tried = skipped = 0
    cfg = budgets.search_config(transitive=True)
    for index, nf in enumerate(to_normal_form(phi0, sig)):
        enhanced = enhance_tg_normal_form(nf)
        direct = find_model(enhanced, cfg)
        seeds = [realized_types(direct)] if direct is not None else []
        candidates = type_candidates(enhanced, budgets, seeds)
        for alpha, beta in itertools.islice(candidates, budgets.max_candidates):
            tried += 1
            if not all(satisfies_foralls(b, enhanced) for b in beta):
                continue
            B = find_model(build_phi_B(enhanced, alpha, beta), cfg.replace(transitive=False))
            if B is None:
                continue
            C = find_model(
                build_phi_C(enhanced, alpha, beta),
                cfg.replace(max_distinct_elements_per_fact=2, ramified=True),
            )
            if C is None:
                continue
            K = grid_side(B, C, enhanced.signature)
            logger.info("Disjunct %d: candidate |alpha| = %d, |beta| = %d has K = %d", index, len(alpha), len(beta), K)
            if K <= budgets.max_grid_side:
                certificate, method = small_model_from_blocks(enhanced, B, C).structure, "grid"
            elif direct is not None:
                certificate, method = direct, "finder"
            else:
                skipped += 1
                warnings.warn(f"Grid side {K} exceeds max_grid_side={budgets.max_grid_side}; candidate skipped")
                continue
            reduct = _certify(certificate, enhanced, phi0, sig, ubiquitous=False)
            return FinsatResult(True, reduct, index, alpha, beta, tried, skipped, method)
        logger.debug("Disjunct %d exhausted after %d candidates", index, tried)
        if direct is not None:
            alpha, beta = realized_types(direct)
            logger.info("Disjunct %d: no candidate certified, using the direct model", index)
            reduct = _certify(direct, enhanced, phi0, sig, ubiquitous=False)
            return FinsatResult(True, reduct, index, alpha, beta, tried, skipped, "finder")
    logger.info("No finite model within budgets (%d candidates)", tried)
    return FinsatResult(False, candidates_tried=tried, skipped=skipped)


# ---------------------------------------------------------------------------
# GFU+TG
# ---------------------------------------------------------------------------

def with_universal(sig: Signature) -> Signature:
    """sig, thêm ký hiệu U nếu chưa có"""
    if sig.universal_symbol is not None:
        return sig
    name = "U" if not sig.has_relation("U") else sig.fresh_name("U")
    return sig.extend({name: 2}, universal=name)


def decide_finsat_gfutg(phi0: Formula, sig: Signature, budgets: Optional[Budgets] = None) -> FinsatResult:
    """
    Tính thỏa mãn hữu hạn của câu GFU+TG / TGF+TG trong giới hạn

    Với mỗi α: φ* (xử lý như GF+TG) có mô hình C_minus thì saturation
    (chế độ TG) cho mô hình U-biquitous. Nếu |C_minus| vượt
    max_saturation_seed thì dùng mô hình tìm trực tiếp (nếu có). Hết ứng viên
    mà vẫn có mô hình tìm trực tiếp thì certificate là mô hình đó.

    Raises:
        FragmentError: phi0 dùng hằng, đẳng thức hoặc không thuộc fragment
    """
    budgets = budgets or Budgets()
    if sig.constants or constants_used(phi0):
        raise FragmentError("GFU+TG decision procedure does not support constants")
    if uses_nontrivial_equality(phi0):
        raise FragmentError("GFU+TG formulas are equality-free")
    report = classify_fragment(phi0, sig)
    if not (report.member("GFU+TG") or report.member("TGF+TG")):
        raise FragmentError(f"Formula is not in GFU+TG or TGF+TG ({report.summary()})")
    extended = with_universal(sig)

    tried = skipped = 0
    for index, nf in enumerate(to_normal_form(phi0, extended)):
        enhanced = enhance_tg_normal_form(nf)
        direct = find_model(enhanced, budgets.search_config(ubiquitous=True, transitive=True))
        seeds = [realized_types(direct)[0]] if direct is not None else []
        candidates = alpha_candidates(enhanced, budgets, seeds, ubiquitous=True)
        for alpha in itertools.islice(candidates, budgets.max_candidates):
            tried += 1
            phi_star = build_phi_star(enhanced, alpha, tg_mode=True)
            C_minus = find_model(phi_star, budgets.search_config(transitive=True))
            if C_minus is None:
                continue
            if C_minus.size <= budgets.max_saturation_seed:
                certificate, _ = saturate(C_minus, phi_star, SaturationOptions(tg_mode=True))
                method = "saturation"
            elif direct is not None:
                certificate, method = direct, "finder"
            else:
                skipped += 1
                warnings.warn(
                    f"phi* model of size {C_minus.size} exceeds max_saturation_seed={budgets.max_saturation_seed}; "
                    "candidate skipped"
                )
                continue
            reduct = _certify(certificate, enhanced, phi0, sig, ubiquitous=True)
            return FinsatResult(True, reduct, index, alpha, frozenset(), tried, skipped, method)
        if direct is not None:
            logger.info("Disjunct %d: no candidate certified, using the direct model", index)
            reduct = _certify(direct, enhanced, phi0, sig, ubiquitous=True)
            return FinsatResult(True, reduct, index, seeds[0], frozenset(), tried, skipped, "finder")
    logger.info("No U-biquitous finite model within budgets (%d candidates)", tried)
    return FinsatResult(False, candidates_tried=tried, skipped=skipped)
