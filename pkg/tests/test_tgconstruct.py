"""
Unit tests for the GF+TG small-model construction
"""

from typing import FrozenSet, NamedTuple

import numpy as np
import pytest

from src.analysis.finder import find_model, realized_types, type_counts
from src.analysis.modelcheck import check_model, evaluate
from src.config import SearchConfig
from src.data.corpus import load_corpus, random_guarded_sentence
from src.exceptions import ConstructionError, FragmentError, GridError, TypeMismatchError
from src.logic.normalform import NormalFormSentence, enhance_tg_normal_form, to_normal_form
from src.logic.parser import parse_document
from src.logic.signature import Signature
from src.logic.syntax import Var
from src.models.tgconstruct import (
    adjoin_copy, build_D, build_phi_B, build_phi_C, build_small_model, connect_pair_to_row,
    equalize_realizations, grid_side, interpret_fresh_symbols, is_two_variable, pair_tuples,
    reduce_two_types,
)
from src.structures.operations import disjoint_union
from src.structures.structure import Structure
from src.structures.types import atomic_type

TG_TEXT = (
    "rel P/1; rel Q/1; rel R/2; transitive T;\n"
    "exists x (P(x)) & forall x (T(x,x) -> false)\n"
    "& forall x (P(x) -> exists y (T(x,y) & Q(y))) & forall x (Q(x) -> exists y (R(x,y) & P(y)))"
)


@pytest.fixture(scope="module")
def enhanced():
    """Câu TG mở rộng cùng α, β của một mô hình tìm trực tiếp"""
    sig, f = parse_document(TG_TEXT)
    nf = enhance_tg_normal_form(next(iter(to_normal_form(f, sig))))
    direct = find_model(nf, SearchConfig(max_domain_size=3, transitive=True))
    alpha, beta = realized_types(direct)
    return sig, f, nf, alpha, beta


class TestDerivedSentences:
    """Test cases for phi_B and phi_C"""

    def test_needs_enhanced_form(self):
        """Plain normal forms have no Aux symbol"""
        sig, f = parse_document(TG_TEXT)
        nf = next(iter(to_normal_form(f, sig)))

        with pytest.raises(FragmentError):
            build_phi_B(nf, [], [])

    def test_type_checks(self, enhanced):
        """alpha must be nonempty 1-types, beta non-degenerate guarded 2-types"""
        _, _, nf, alpha, _ = enhanced
        some = sorted(alpha, key=lambda a: a.sort_key)[0]

        with pytest.raises(ValueError):
            build_phi_B(nf, [], [])
        with pytest.raises(TypeMismatchError):
            build_phi_C(nf, alpha, [some])

    def test_phi_B(self, enhanced):
        """phi_B is a plain GF sentence keeping the ntr part"""
        _, _, nf, alpha, beta = enhanced
        phi_B = build_phi_B(nf, alpha, beta)

        assert not phi_B.tg_mode
        assert all(c.tag is None for c in phi_B.forall_exists_conjuncts)
        assert len(phi_B.forall_exists_conjuncts) >= len(nf.ntr_conjuncts()) + len(alpha)

    def test_phi_C(self, enhanced):
        """phi_C is a two-variable TG sentence keeping the tr part"""
        _, _, nf, alpha, beta = enhanced
        phi_C = build_phi_C(nf, alpha, beta)

        assert phi_C.tg_mode
        assert is_two_variable(phi_C)
        assert len(phi_C.tr_conjuncts()) >= len(nf.tr_conjuncts())

    def test_pair_tuples(self):
        """Tuples over x, y using both variables"""
        x, y = Var("x"), Var("y")

        assert pair_tuples(1) == []
        assert pair_tuples(2) == [(x, y), (y, x)]
        assert len(pair_tuples(3)) == 6

    def test_interpret_fresh_symbols(self, enhanced):
        """A model of phi reducts, expanded again, satisfies phi_B's fresh existentials"""
        sig, _, nf, alpha, beta = enhanced
        direct = find_model(nf, SearchConfig(max_domain_size=3, transitive=True))
        phi_B = build_phi_B(nf, alpha, beta)
        expanded = interpret_fresh_symbols(direct, phi_B)

        assert set(phi_B.signature.relation_names) <= set(expanded.signature.relation_names)
        assert expanded.reduct(direct.signature) == direct


class TestEqualize:
    """Test cases for equalize_realizations and adjoin_copy"""

    @pytest.fixture
    def sig(self):
        return Signature.build({"P": 1, "R": 2})

    def test_adjoin_copy(self, sig):
        """The copy shares every fact of the original but none with it"""
        s = Structure(sig, 2, [("P", (0,)), ("R", (0, 1))])
        copied = adjoin_copy(s, 0)

        assert copied.size == 3
        assert copied.holds("P", (2,))
        assert copied.holds("R", (2, 1))
        assert not copied.holds("R", (0, 2))

    def test_equalize(self, sig):
        """Every 1-type is realized equally often in B* and C*"""
        B = Structure(sig, 3, [("P", (0,)), ("P", (1,))])
        C = Structure(sig, 2, [("P", (0,))])
        B_star, C_star = equalize_realizations(B, C)

        assert B_star.size == C_star.size == grid_side(B, C) == 4
        assert sorted(B_star.fact_counts()) == sorted(C_star.fact_counts())

    def test_different_type_sets(self, sig):
        B = Structure(sig, 1, [("P", (0,))])
        C = Structure(sig, 1)

        with pytest.raises(ConstructionError):
            equalize_realizations(B, C)

    def test_fresh_symbols_ignored(self, enhanced):
        """Fresh symbols shared by name between phi_B and phi_C do not split 1-types"""
        sig, _, nf, alpha, beta = enhanced
        phi_B = build_phi_B(nf, alpha, beta)
        phi_C = build_phi_C(nf, alpha, beta)
        shared = (
            set(phi_B.signature.relation_names) & set(phi_C.signature.relation_names)
        ) - set(nf.signature.relation_names)
        assert shared

        cfg = SearchConfig(max_domain_size=4)
        B = find_model(phi_B, cfg.replace(transitive=False))
        C = find_model(phi_C, cfg.replace(transitive=True, max_distinct_elements_per_fact=2, ramified=True))
        marked = C.copy()
        for name in sorted(shared):
            arity = phi_C.signature.arity(name)
            for e in marked.domain:
                marked.add(name, (e,) * arity)

        B_star, C_star = equalize_realizations(B, marked, nf.signature)

        assert B_star.size == C_star.size == grid_side(B, marked, nf.signature)
        counts_B = type_counts(B_star.reduct(nf.signature))
        counts_C = type_counts(C_star.reduct(nf.signature))
        assert counts_B == counts_C


class TestGrid:
    """Test cases for the grid D"""

    @pytest.fixture
    def grid(self):
        sig = Signature.build({"P": 1, "R": 2})
        B = Structure(sig, 2, [("P", (0,)), ("R", (0, 1))])
        C = Structure(sig, 2, [("P", (0,)), ("R", (1, 0))])
        return build_D(B, C)

    def test_rows_and_columns(self, grid):
        """Rows copy B*, columns copy C*"""
        assert grid.side == 2
        assert grid.structure.facts("R") == [("R", (0, 1)), ("R", (1, 3)), ("R", (2, 0)), ("R", (3, 2))]
        assert grid.vertical_pairs() == [(0, 2), (1, 3)]

    def test_type_pattern(self, grid):
        """tp(k, l) is alpha[(k + l) mod K]"""
        K = grid.side
        for k in range(K):
            for l in range(K):
                assert atomic_type(grid.structure, (grid.element(k, l),)) == grid.alpha[(k + l) % K]
        np.testing.assert_array_equal(grid.type_grid(), np.array([[1, 0], [0, 1]]))

    def test_coordinates(self, grid):
        assert grid.coordinates(3) == (1, 1)
        assert grid.row(1) == [2, 3]
        assert grid.column(0) == [0, 2]
        assert grid.is_vertical([1, 3])
        assert grid.is_horizontal([0, 1])

        with pytest.raises(GridError):
            grid.element(2, 0)

    def test_size_mismatch(self):
        sig = Signature.build({"P": 1})
        B = Structure(sig, 1)

        with pytest.raises(GridError):
            build_D(B, disjoint_union([B, B]))


class TestConnect:
    """Test cases for connect_pair_to_row"""

    def test_copies_row_facts(self):
        """Facts between the template and the rest of the row move to the pair"""
        sig = Signature.build({"P": 1, "R": 2})
        s = Structure(sig, 5, [("R", (0, 1)), ("R", (0, 4)), ("P", (4,))])

        assert connect_pair_to_row(s, 2, 3, [0, 1, 4], 0, 1) == [("R", (2, 4))]
        assert not s.holds("R", (2, 3))

    def test_pair_in_row(self):
        sig = Signature.build({"R": 2})
        s = Structure(sig, 3)

        with pytest.raises(GridError):
            connect_pair_to_row(s, 0, 2, [0, 1], 0, 1)


class TestSmallModel:
    """Test cases for build_small_model"""

    @pytest.mark.slow
    def test_small_model(self, enhanced):
        """|A'| = 3K^3 and A' satisfies the input sentence"""
        sig, f, nf, alpha, beta = enhanced
        model = build_small_model(nf, alpha, beta, SearchConfig(max_domain_size=4))

        assert model.structure.size == 3 * model.side ** 3
        assert model.summary()["size"] == model.structure.size
        assert check_model(model.structure, nf, transitive=True).verdict
        assert evaluate(model.structure.reduct(sig), f)

    @pytest.mark.slow
    @pytest.mark.integration
    def test_corpus_sentence(self):
        """Same for a corpus sentence with a top-level existential"""
        entry = next(e for e in load_corpus("gf_tg") if e.name == "gftg_successor")
        sig, f = entry.parse()
        nf = enhance_tg_normal_form(next(iter(to_normal_form(f, sig))))
        direct = find_model(nf, SearchConfig(max_domain_size=3, transitive=True))
        alpha, beta = realized_types(direct)
        model = build_small_model(nf, alpha, beta, SearchConfig(max_domain_size=4))

        assert evaluate(model.structure.reduct(sig), f)


class TestReduceTwoTypes:
    """Test cases for reduce_two_types"""

    def test_merges_equivalent_types(self):
        """Without witness requirements every R-pair gets the symmetric type"""
        sig = Signature.build({"R": 2})
        C = Structure(sig, 4, [("R", (0, 1)), ("R", (2, 3)), ("R", (3, 2))])
        reduced, report = reduce_two_types(C, NormalFormSentence(sig))

        assert len(report.before) == 3
        assert len(report.after) == 1
        assert report.class_count == 1
        assert report.changed_pairs == 1
        assert reduced.holds("R", (1, 0))
        assert report.summary()["after"] == 1

    def test_constants_rejected(self):
        sig = Signature.build({"R": 2}, constants=["c"])
        C = Structure(sig, 1, constants={"c": 0})

        with pytest.raises(ConstructionError):
            reduce_two_types(C, NormalFormSentence(sig))


class BlockInstance(NamedTuple):
    name: str
    nf: NormalFormSentence
    beta: FrozenSet
    phi_C: NormalFormSentence
    B: Structure
    C: Structure


@pytest.fixture(scope="module")
def block_instances():
    """Các bộ (φ_B, φ_C) từ corpus GF+TG và câu ngẫu nhiên, cùng mô hình B, C"""
    sources = [(e.name, *e.parse()) for e in load_corpus("gf_tg") if e.satisfiable]
    sig = Signature.build({"P": 1, "Q": 1, "R": 2, "T": 2}, transitive=["T"])
    sources += [(f"random_{seed}", sig, random_guarded_sentence(sig, seed=seed, depth=2)) for seed in range(40)]
    cfg = SearchConfig(max_domain_size=3, transitive=True)
    found = []
    for name, sig, f in sources:
        nf = enhance_tg_normal_form(next(iter(to_normal_form(f, sig))))
        direct = find_model(nf, cfg)
        if direct is None:
            continue
        alpha, beta = realized_types(direct)
        phi_C = build_phi_C(nf, alpha, beta)
        B = find_model(build_phi_B(nf, alpha, beta), cfg.replace(max_domain_size=4, transitive=False))
        C = find_model(phi_C, cfg.replace(max_domain_size=4, max_distinct_elements_per_fact=2, ramified=True))
        if B is None or C is None:
            continue
        found.append(BlockInstance(name, nf, beta, phi_C, B, C))
        if len(found) == 12:
            break
    return found


@pytest.mark.slow
class TestBlockProperties:
    """Grid laws and 2-type reduction over many (phi_B, phi_C) pairs"""

    def test_enough_instances(self, block_instances):
        assert len(block_instances) >= 10
        assert any(inst.beta for inst in block_instances)

    def test_grid_laws(self, block_instances):
        """Facts of D stay in a row or a column, transitive facts in a column"""
        for inst in block_instances:
            sigma = inst.nf.signature
            B_star, C_star = equalize_realizations(inst.B, inst.C, sigma)
            grid = build_D(B_star, C_star, sigma)
            s = grid.structure
            K = grid.side

            assert s.size == K * K
            for name, t in s.iter_facts():
                distinct = sorted(set(t))
                assert grid.is_vertical(distinct) or grid.is_horizontal(distinct), (inst.name, name, t)
                if sigma.is_transitive(name) and len(distinct) == 2:
                    assert grid.is_vertical(distinct), (inst.name, name, t)
            for k in range(K):
                for l in range(K):
                    assert atomic_type(s, (grid.element(k, l),)) == grid.alpha[(k + l) % K]

    def test_reduced_models(self, block_instances):
        """The reduced structure is still a model of phi_C with the same 1-types"""
        for inst in block_instances:
            reduced, report = reduce_two_types(inst.C, inst.phi_C)

            assert reduced.size == inst.C.size
            assert check_model(reduced, inst.phi_C, transitive=True).verdict, inst.name
            assert realized_types(reduced)[0] == realized_types(inst.C)[0]
            assert report.class_count <= len(report.before)
            assert len(report.after) <= len(report.before)
            assert set(report.after) <= set(report.distinguished.values())
