"""
Unit tests for evaluation and normal-form model checking
"""

import pytest

from src.analysis.modelcheck import (
    FORALL_VIOLATION, MISSING_U_EDGE, MISSING_WITNESS, NON_TRANSITIVE, CheckReport, check_model,
    evaluate, find_witness, satisfies, transitivity_violations,
)
from src.data.corpus import random_guarded_sentence, random_structure
from src.exceptions import StructureError
from src.logic.normalform import recognize_normal_form
from src.logic.parser import parse_document, parse_formula
from src.logic.signature import Signature
from src.logic.syntax import Var
from src.structures.structure import Structure
from tests.reference import naive_eval

SUCCESSOR_TEXT = (
    "rel P/1; rel R/2;\n"
    "forall x (P(x) -> exists y (R(x,y) & P(y))) & forall x y (R(x,y) -> !R(y,x))"
)


@pytest.fixture
def successor():
    sig, f = parse_document(SUCCESSOR_TEXT)
    return sig, recognize_normal_form(f, sig)


class TestEvaluate:
    """Test cases for evaluate"""

    def test_guarded_quantifiers(self, path_structure):
        """Guard-driven enumeration gives the usual semantics"""
        _, f = parse_document("rel P/1; rel R/2;\nexists x y (R(x,y) & !P(y))")

        assert evaluate(path_structure, f)
        assert naive_eval(path_structure, f)

    def test_free_variables_need_assignment(self, path_structure, unary_binary_sig):
        """Open formulas need every free variable assigned"""
        g = parse_formula("exists y (R(x,y))", unary_binary_sig)

        with pytest.raises(ValueError):
            evaluate(path_structure, g)

        assert evaluate(path_structure, g, {Var("x"): 0})
        assert not evaluate(path_structure, g, {Var("x"): 2})

    def test_constants(self):
        """Constants are looked up in the structure"""
        sig, f = parse_document("rel R/2; const c;\nforall x (R(x,c) -> x = c)")
        s = Structure(sig, 2, [("R", (1, 1))], constants={"c": 1})

        assert evaluate(s, f)
        s.add("R", (0, 1))
        assert not evaluate(s, f)

    @pytest.mark.parametrize("seed", range(8))
    def test_agrees_with_naive_evaluation(self, seed):
        """evaluate agrees with brute force on random guarded sentences"""
        sig = Signature.build({"P": 1, "Q": 1, "R": 2, "S": 3})
        f = random_guarded_sentence(sig, seed=seed, depth=2)

        for size in (1, 2, 3):
            s = random_structure(sig, size, density=0.4, seed=seed + size)
            assert evaluate(s, f) == naive_eval(s, f)

    @pytest.mark.parametrize("seed", range(4))
    def test_agrees_with_naive_evaluation_transitive(self, seed):
        """Same with transitive guards"""
        sig = Signature.build({"P": 1, "R": 2, "T": 2}, transitive=["T"])
        f = random_guarded_sentence(sig, seed=seed, depth=2)
        s = random_structure(sig, 3, density=0.3, seed=seed)

        assert evaluate(s, f) == naive_eval(s, f)


class TestCheckModel:
    """Test cases for check_model"""

    def test_model(self, successor):
        """A cycle of length 3 is a model"""
        sig, nf = successor
        s = Structure(sig, 3, [("P", (i,)) for i in range(3)] + [("R", (i, (i + 1) % 3)) for i in range(3)])
        report = check_model(s, nf)

        assert isinstance(report, CheckReport)
        assert report.verdict
        assert bool(report)
        assert report.to_frame().empty

    def test_missing_witness(self, successor, path_structure):
        """P(0) needs an R-successor in P"""
        _, nf = successor
        report = check_model(path_structure, nf)

        assert not report.verdict
        assert report.violations[0].kind == MISSING_WITNESS
        assert report.violations[0].elements == (0,)
        assert report.kinds() == {MISSING_WITNESS: 1}

    def test_forall_violation(self, successor, unary_binary_sig):
        """R(0,1) and R(1,0) break asymmetry twice"""
        _, nf = successor
        s = Structure(unary_binary_sig, 2, [("R", (0, 1)), ("R", (1, 0))])
        report = check_model(s, nf)

        assert report.kinds() == {FORALL_VIOLATION: 2}
        assert report.to_dict()["verdict"] is False

    def test_limit_truncates(self, successor, unary_binary_sig):
        """limit stops early"""
        _, nf = successor
        s = Structure(unary_binary_sig, 2, [("R", (0, 1)), ("R", (1, 0))])
        report = check_model(s, nf, limit=1)

        assert len(report.violations) == 1
        assert report.truncated
        assert not satisfies(s, nf)

    def test_touching_restricts_tuples(self, successor, path_structure):
        """Only guard tuples through the touched elements are checked"""
        _, nf = successor

        assert check_model(path_structure, nf, touching=[2]).verdict
        assert not check_model(path_structure, nf, touching=[0]).verdict

    def test_ubiquity_flag(self):
        """Missing U edges are reported when asked for"""
        sig, f = parse_document("rel P/1; universal U;\nforall x y (U(x,y) -> (P(x) -> P(y)))")
        nf = recognize_normal_form(f, sig)
        s = Structure(sig, 2, [("U", (0, 0)), ("U", (1, 1))])

        assert check_model(s, nf).verdict
        report = check_model(s, nf, ubiquitous=True)
        assert report.kinds() == {MISSING_U_EDGE: 2}

    def test_ubiquity_needs_symbol(self, successor, path_structure):
        """Without U there is nothing to check"""
        _, nf = successor

        with pytest.raises(StructureError):
            check_model(path_structure, nf, ubiquitous=True)

    def test_structure_must_cover_signature(self, successor):
        """Relations of the sentence must exist in the structure"""
        _, nf = successor
        s = Structure(Signature.build({"P": 1}), 1)

        with pytest.raises(StructureError):
            check_model(s, nf)

    def test_agrees_with_evaluate(self, successor, unary_binary_sig):
        """check_model agrees with evaluate on the sentence"""
        sig, nf = successor
        for seed in range(10):
            s = random_structure(unary_binary_sig, 3, density=0.4, seed=seed)
            assert check_model(s, nf).verdict == evaluate(s, nf.to_formula())


class TestTransitivity:
    """Test cases for transitivity checking"""

    def test_non_transitive(self, tg_sig):
        """T(0,1), T(1,2) without T(0,2)"""
        s = Structure(tg_sig, 3, [("T", (0, 1)), ("T", (1, 2))])
        violations = transitivity_violations(s)

        assert len(violations) == 1
        assert violations[0].kind == NON_TRANSITIVE
        assert violations[0].elements == (0, 1, 2)
        assert violations[0].relation == "T"

    def test_cycle_needs_loops(self, tg_sig):
        """A 2-cycle forces T(a,a)"""
        s = Structure(tg_sig, 2, [("T", (0, 1)), ("T", (1, 0))])

        assert {v.elements for v in transitivity_violations(s)} == {(0, 1, 0), (1, 0, 1)}


class TestFindWitness:
    """Test cases for find_witness"""

    def test_smallest_witness(self, successor, unary_binary_sig):
        """The lexicographically smallest witness is returned"""
        _, nf = successor
        s = Structure(unary_binary_sig, 3, [("P", (0,)), ("P", (1,)), ("P", (2,)), ("R", (0, 2)), ("R", (0, 1))])
        (conjunct,) = nf.forall_exists_conjuncts

        assert find_witness(s, conjunct, (0,)) == (1,)
        assert find_witness(s, conjunct, (1,)) is None

    def test_guard_must_hold(self, successor, path_structure):
        """ā has to satisfy the outer guard"""
        _, nf = successor
        (conjunct,) = nf.forall_exists_conjuncts

        with pytest.raises(ValueError):
            find_witness(path_structure, conjunct, (1,))
