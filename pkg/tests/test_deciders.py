"""
Unit tests for the bounded finite-satisfiability deciders
"""

import pandas as pd
import pytest

from src.analysis.finder import find_model
from src.analysis.modelcheck import evaluate
from src.config import Budgets, SearchConfig
from src.data.corpus import load_corpus, random_guarded_sentence
from src.exceptions import FragmentError
from src.logic.normalform import NormalFormSentence, to_normal_form
from src.logic.parser import parse_document
from src.logic.signature import Signature
from src.models.deciders import (
    FinsatResult, decide_finsat_gftg, decide_finsat_gfutg, enumerate_one_types, type_candidates,
    with_universal,
)

SMALL = Budgets(alpha_max=2, beta_max=2, find_max=3, max_candidates=20, max_saturation_seed=1, max_grid_side=4)


def corpus_entry(corpus, name):
    return next(e for e in load_corpus(corpus) if e.name == name)


class TestGFTG:
    """Test cases for decide_finsat_gftg"""

    def test_trivial_sentence(self):
        """Every element in P has a one-element certificate"""
        sig, f = corpus_entry("gf_tg", "gftg_trivial").parse()
        result = decide_finsat_gftg(f, sig, SMALL)

        assert result
        assert result.method in ("grid", "finder")
        assert result.certificate.signature == sig
        assert evaluate(result.certificate, f)

    def test_contradiction(self):
        """No candidate survives"""
        sig, f = corpus_entry("gf_tg", "gftg_contradiction").parse()
        result = decide_finsat_gftg(f, sig, SMALL)

        assert not result
        assert result.certificate is None
        assert result.candidates_tried <= SMALL.max_candidates

    @pytest.mark.slow
    def test_successor(self):
        """A T-successor in Q is realized by the grid construction"""
        sig, f = corpus_entry("gf_tg", "gftg_successor").parse()
        result = decide_finsat_gftg(f, sig, SMALL)

        assert result
        assert evaluate(result.certificate, f)

    @pytest.mark.slow
    @pytest.mark.integration
    def test_infinity_axiom(self):
        """Serial irreflexive transitive relations need infinite models"""
        sig, f = corpus_entry("gf_tg", "gftg_infinity").parse()

        assert not decide_finsat_gftg(f, sig, SMALL)

    def test_constants_rejected(self):
        sig, f = parse_document("rel P/1; const c;\nP(c)")

        with pytest.raises(FragmentError):
            decide_finsat_gftg(f, sig, SMALL)

    def test_outside_fragment(self):
        """Unguarded universal quantification"""
        sig, f = parse_document("rel P/1; rel R/2;\nforall x y (P(x) -> R(x,y))")

        with pytest.raises(FragmentError):
            decide_finsat_gftg(f, sig, SMALL)


class TestGFUTG:
    """Test cases for decide_finsat_gfutg"""

    def test_equality_rejected(self):
        sig, f = parse_document("rel R/2; universal U;\nforall x y (R(x,y) -> x = y)")

        with pytest.raises(FragmentError):
            decide_finsat_gfutg(f, sig, SMALL)

    def test_constants_rejected(self):
        sig, f = parse_document("rel P/1; const c; universal U;\nP(c)")

        with pytest.raises(FragmentError):
            decide_finsat_gfutg(f, sig, SMALL)

    @pytest.mark.slow
    def test_serial_order(self):
        """A reflexive loop gives a U-biquitous certificate"""
        sig, f = corpus_entry("gfu_tg", "gfutg_serial").parse()
        result = decide_finsat_gfutg(f, sig, SMALL)

        assert result
        assert result.method in ("saturation", "finder")
        assert result.certificate.is_ubiquitous()
        assert evaluate(result.certificate, f)

    @pytest.mark.slow
    def test_saturation_off(self):
        """Without saturation the directly found model is the certificate"""
        sig, f = corpus_entry("gfu_tg", "gfutg_serial").parse()
        result = decide_finsat_gfutg(f, sig, SMALL.model_copy(update={"max_saturation_seed": 0}))

        assert result
        assert result.method == "finder"
        assert result.certificate.is_ubiquitous()

    @pytest.mark.slow
    @pytest.mark.integration
    def test_infinity_axiom(self):
        sig, f = corpus_entry("gfu_tg", "gfutg_infinity").parse()

        assert not decide_finsat_gfutg(f, sig, SMALL)


class TestCandidates:
    """Test cases for type enumeration and candidate order"""

    def test_one_types(self):
        """Every subset of the unary atoms is a 1-type"""
        sig = Signature.build({"P": 1, "Q": 1, "R": 2})
        types = enumerate_one_types(sig)

        assert len(types) == 2 ** 3
        assert len(set(types)) == len(types)
        assert all(t.arity == 1 for t in types)

    def test_seeds_come_first(self):
        sig = Signature.build({"P": 1})
        nf = NormalFormSentence(sig)
        seed = (frozenset(), frozenset())

        assert next(type_candidates(nf, SMALL, [seed])) == seed

    def test_with_universal(self):
        """U is added under a fresh name when needed"""
        plain = Signature.build({"P": 1})
        clashing = Signature.build({"U": 1})

        assert with_universal(plain).universal_symbol == "U"
        assert with_universal(with_universal(plain)) == with_universal(plain)
        fresh = with_universal(clashing).universal_symbol
        assert fresh != "U" and fresh.startswith("U")

    def test_result_summary(self):
        result = FinsatResult(False, candidates_tried=3)
        summary = result.summary()

        assert not result
        assert isinstance(summary, pd.Series)
        assert summary["candidates_tried"] == 3
        assert summary["model_size"] is None

    def test_budgets_seed(self):
        """search_config carries the budget seed unless a flag overrides it"""
        budgets = Budgets(find_max=2, seed=7)

        assert budgets.search_config(transitive=True).seed == 7
        assert budgets.search_config(seed=1).seed == 1
        assert budgets.search_config().max_domain_size == 2


AGREEMENT = Budgets(
    alpha_max=2, beta_max=2, find_max=3, max_candidates=10, max_saturation_seed=0, max_grid_side=4, seed=0,
)


def bounded_satisfiable(f, sig, **flags):
    """Có mô hình kích thước ≤ 3 cho một disjunct dạng chuẩn"""
    cfg = SearchConfig(max_domain_size=3, transitive=True, **flags)
    return any(find_model(nf, cfg) is not None for nf in to_normal_form(f, sig))


class TestAgreement:
    """Deciders agree with a direct bounded model search on random sentences"""

    @pytest.mark.slow
    @pytest.mark.integration
    def test_gftg_random_sentences(self):
        """Every sentence with a model of size 3 is accepted, certificates are models"""
        sig = Signature.build({"P": 1, "Q": 1, "R": 2, "T": 2}, transitive=["T"])
        rows = []
        for seed in range(20):
            f = random_guarded_sentence(sig, seed=seed, depth=2)
            direct = bounded_satisfiable(f, sig)
            result = decide_finsat_gftg(f, sig, AGREEMENT)

            if direct:
                assert result, seed
            if result:
                assert evaluate(result.certificate, f), seed
            rows.append({"seed": seed, "direct": direct, "decider": result.satisfiable, "method": result.method})

        frame = pd.DataFrame(rows).set_index("seed")
        assert len(frame) == 20
        assert frame["direct"].any()

    @pytest.mark.slow
    @pytest.mark.integration
    def test_gfutg_random_sentences(self):
        """Same for U-biquitous models"""
        sig = Signature.build({"P": 1, "Q": 1, "R": 2, "T": 2, "U": 2}, universal="U", transitive=["T"])
        rows = []
        for seed in range(20):
            f = random_guarded_sentence(sig, seed=seed, depth=2)
            direct = bounded_satisfiable(f, sig, ubiquitous=True)
            result = decide_finsat_gfutg(f, sig, AGREEMENT)

            if direct:
                assert result, seed
            if result:
                assert result.certificate.is_ubiquitous()
                assert evaluate(result.certificate, f), seed
            rows.append({"seed": seed, "direct": direct, "decider": result.satisfiable, "method": result.method})

        frame = pd.DataFrame(rows).set_index("seed")
        assert len(frame) == 20
        assert frame["direct"].any()
