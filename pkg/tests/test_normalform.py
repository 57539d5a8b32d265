"""
Unit tests for normal forms, the enhanced TG form and SentenceBuilder
"""

import pytest

from src.analysis.finder import enumerate_structures, find_model
from src.config import SearchConfig
from src.data.corpus import random_guarded_sentence
from src.exceptions import FragmentError, NotASentenceError
from src.logic.normalform import (
    NTR, TR, ForallConjunct, ForallExistsConjunct, NormalFormSentence, SentenceBuilder,
    enhance_tg_normal_form, guard_of, nnf, recognize_normal_form, simulate_existential,
    to_normal_form,
)
from src.logic.parser import parse_document, parse_formula
from src.logic.signature import Signature
from src.logic.syntax import And, Atom, Eq, Exists, Forall, Implies, Not, Var, atom, relations_used
from tests.reference import naive_eval

X, Y, Z = Var("x"), Var("y"), Var("z")

EQUISAT_CASES = [
    "rel P/1; rel R/2;\nexists x (P(x)) & forall x (P(x) -> exists y (R(x,y) & !P(y)))",
    "rel P/1; rel R/2;\nforall x (P(x) | exists y (R(x,y) & P(y)))",
    "rel P/1; rel R/2;\n(exists x (P(x)) -> forall x y (R(x,y) -> P(y))) & exists x y (R(x,y) & true)",
    "rel P/1;\nexists x (P(x)) & forall x (P(x) -> false)",
    "rel R/2;\nforall x y (R(x,y) -> !(x = y)) & exists x y (R(x,y) & R(y,x))",
    "rel P/1; rel R/2;\n!(forall x (P(x) -> exists y (R(x,y) & P(y))))",
]


def has_model_of_size(sig, f, size):
    return any(naive_eval(s, f) for s in enumerate_structures(sig, size))


class TestRecognizeNormalForm:
    """Test cases for recognize_normal_form"""

    def test_recognizes_forall_exists(self):
        """A single forall-exists conjunct is recognized as is"""
        sig, f = parse_document("rel P/1; rel R/2;\nforall x (P(x) -> exists y (R(x,y) & P(y)))")
        nf = recognize_normal_form(f, sig)

        assert nf is not None
        assert nf.forall_exists_conjuncts == (
            ForallExistsConjunct((X,), atom("P", "x"), (Y,), atom("R", "x", "y"), atom("P", "y")),
        )
        assert nf.forall_conjuncts == ()
        assert nf.to_formula() == f

    def test_to_normal_form_yields_recognized_sentence(self):
        """A sentence in normal form is its only disjunct"""
        sig, f = parse_document("rel P/1; rel R/2;\nforall x y (R(x,y) -> (P(x) -> P(y)))")
        disjuncts = list(to_normal_form(f, sig))

        assert len(disjuncts) == 1
        assert disjuncts[0] == recognize_normal_form(f, sig)
        assert disjuncts[0].conjunct_count == 1

    def test_not_in_normal_form(self):
        """A top-level existential is not a conjunct"""
        sig, f = parse_document("rel P/1;\nexists x (P(x))")

        assert recognize_normal_form(f, sig) is None


class TestToNormalForm:
    """Test cases for to_normal_form"""

    def test_top_level_existential_is_simulated(self):
        """exists x P(x) becomes forall z (z = z -> exists x (G(z,x) & P(x)))"""
        sig, f = parse_document("rel P/1;\nexists x (P(x))")
        disjuncts = list(to_normal_form(f, sig))

        assert len(disjuncts) == 1
        nf = disjuncts[0]
        (c,) = nf.forall_exists_conjuncts
        assert c.guard == Eq(Var("_z"), Var("_z"))
        assert c.witness_guard.relation == "_nf0"
        assert nf.signature.arity("_nf0") == 2
        assert c.matrix == atom("P", "x")

    def test_free_variables_rejected(self):
        """Open formulas have no normal form"""
        sig = Signature.build({"P": 1})

        with pytest.raises(NotASentenceError):
            list(to_normal_form(parse_formula("P(x)", sig), sig))

    def test_unsupported_fragment(self):
        """Three-variable unguarded quantification is rejected"""
        sig, f = parse_document("rel P/1;\nforall x y z (P(x) -> (P(y) -> P(z)))")

        with pytest.raises(FragmentError):
            list(to_normal_form(f, sig))

    def test_tgf_translated_through_u(self):
        """TGF sentences are guarded by U first"""
        sig, f = parse_document("rel P/1; universal U;\nforall x y (P(x) -> P(y))")
        (nf,) = list(to_normal_form(f, sig))

        assert "U" in relations_used(nf.to_formula())

    def test_disjuncts_are_valid(self):
        """Every disjunct passes validate()"""
        sig, f = parse_document(EQUISAT_CASES[2])

        for nf in to_normal_form(f, sig):
            nf.validate()
            assert set(sig.relation_names) <= set(nf.signature.relation_names)

    @pytest.mark.parametrize("text", EQUISAT_CASES)
    def test_equisatisfiable_at_small_sizes(self, text):
        """phi has a model with at most 2 elements iff some disjunct has one; reducts are models of phi"""
        sig, f = parse_document(text)
        expected = any(has_model_of_size(sig, f, n) for n in (1, 2))
        models = [find_model(nf, SearchConfig(max_domain_size=2)) for nf in to_normal_form(f, sig)]
        models = [m for m in models if m is not None]

        assert bool(models) == expected
        for m in models:
            assert naive_eval(m.reduct(sig), f)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(5))
    def test_random_sentences_reduct_models(self, seed):
        """Finder models of random disjuncts satisfy the original sentence"""
        sig = Signature.build({"P": 1, "Q": 1, "R": 2})
        f = random_guarded_sentence(sig, seed=seed, depth=2)

        satisfiable = any(has_model_of_size(sig, f, n) for n in (1, 2))
        models = [find_model(nf, SearchConfig(max_domain_size=2)) for nf in to_normal_form(f, sig)]
        models = [m for m in models if m is not None]

        assert bool(models) == satisfiable
        for m in models:
            assert naive_eval(m.reduct(sig), f)


class TestNNF:
    """Test cases for nnf and guard_of"""

    def test_negated_forall(self):
        """not forall x (P -> Q) becomes exists x (P & not Q)"""
        f = Forall((X,), Implies(atom("P", "x"), atom("Q", "x")))

        assert nnf(Not(f)) == Exists((X,), And(atom("P", "x"), Not(atom("Q", "x"))))

    def test_trivial_guard(self):
        """An unguarded one-variable quantifier gets x = x"""
        guard, matrix = guard_of(Forall((X,), atom("P", "x")))

        assert guard == Eq(X, X)
        assert matrix == atom("P", "x")

    def test_unguarded_two_variables(self):
        """guard_of refuses two free variables"""
        with pytest.raises(FragmentError):
            guard_of(Exists((X, Y), And(atom("P", "x"), atom("P", "y"))))


class TestEnhanceTG:
    """Test cases for enhance_tg_normal_form"""

    def enhanced(self, text):
        sig, f = parse_document(text)
        (nf,) = list(to_normal_form(f, sig))
        return enhance_tg_normal_form(nf)

    def test_tags_and_aux(self):
        """Transitive witness guards are tagged tr, Aux closure is added"""
        nf = self.enhanced(
            "rel P/1; rel Q/1; rel R/2; transitive T;\n"
            "forall x (P(x) -> exists y (T(x,y) & Q(y))) & forall x (Q(x) -> exists y (R(x,y) & P(y)))"
        )

        assert nf.tg_mode
        assert [c.tag for c in nf.forall_exists_conjuncts] == [TR, NTR]
        assert nf.signature.aux_symbol == "_Aux"
        aux = [c for c in nf.forall_conjuncts if c.kind == "aux"]
        assert {c.guard.relation for c in aux} == {"P", "Q", "R", "T", "_Aux"}
        assert len(nf.tr_conjuncts()) == 1
        assert len(nf.ntr_conjuncts()) == 1

    def test_transitive_outer_guard_replaced(self):
        """A transitive outer guard is copied into a fresh binary symbol"""
        nf = self.enhanced("rel P/1; rel R/2; transitive T;\nforall x y (T(x,y) -> exists z (R(y,z) & P(z)))")

        (c,) = nf.forall_exists_conjuncts
        assert c.guard.relation == "_G1"
        assert ForallConjunct((X, Y), Atom("T", (X, Y)), Atom("_G1", (X, Y))) in nf.forall_conjuncts

    def test_two_variable_guard_split(self):
        """A tr-conjunct with a binary outer guard is split through a unary symbol"""
        nf = self.enhanced("rel P/1; rel R/2; transitive T;\nforall x y (R(x,y) -> exists z (T(y,z) & P(z)))")

        (c,) = nf.tr_conjuncts()
        assert c.variables == (Y,)
        assert c.guard == Atom("_G12", (Y,))
        assert ForallConjunct((X, Y), atom("R", "x", "y"), Atom("_G12", (Y,))) in nf.forall_conjuncts

    def test_transitive_in_matrix_rejected(self):
        """Transitive symbols may only guard"""
        sig, f = parse_document("rel R/2; transitive T;\nforall x y (R(x,y) -> T(y,x))")
        (nf,) = list(to_normal_form(f, sig))

        with pytest.raises(FragmentError):
            enhance_tg_normal_form(nf)


class TestSentenceBuilder:
    """Test cases for SentenceBuilder and simulate_existential"""

    @pytest.fixture
    def sig(self):
        return Signature.build({"P": 1, "T": 2}, transitive=["T"])

    def test_loops_rewrite(self, sig):
        """T(v,v) is rewritten to the loop symbol"""
        builder = SentenceBuilder(sig, loops=True)

        assert builder.loops == {"T": "_LoopT_0"}
        assert builder.rewrite(Atom("T", (X, X))) == Atom("_LoopT_0", (X,))
        assert builder.rewrite(Atom("T", (X, Y))) == Atom("T", (X, Y))

    def test_exists_uses_fresh_guard(self, sig):
        """exists adds a fresh witness guard of arity 1 + |y|"""
        builder = SentenceBuilder(sig)
        builder.exists((X,), atom("P", "x"))
        nf = builder.build()

        assert nf.signature.arity("_Ex0") == 2
        (c,) = nf.forall_exists_conjuncts
        assert c.witness_guard == Atom("_Ex0", (Var("_z"), X))

    def test_tagged_build(self, sig):
        """Tagged builders produce valid TG sentences"""
        builder = SentenceBuilder(sig, tagged=True, loops=True)
        builder.exists((X,), atom("P", "x"))
        builder.link_loops(X, Y)
        nf = builder.build(tg_mode=True)

        assert [c.tag for c in nf.forall_exists_conjuncts] == [NTR, TR]

    def test_simulate_existential_anchor_clash(self):
        """The anchor must differ from the witnesses"""
        with pytest.raises(ValueError):
            simulate_existential((Z,), atom("P", "z"), "G", anchor=Z)

    def test_validate_rejects_uncovered_guard(self, sig):
        """The outer guard must mention every universal variable"""
        bad = NormalFormSentence(sig, forall_conjuncts=(ForallConjunct((X, Y), atom("P", "x"), atom("P", "y")),))

        with pytest.raises(FragmentError):
            bad.validate()
