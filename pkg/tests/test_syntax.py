"""
Unit tests for the formula AST, printer and parser
"""

import itertools

import numpy as np
import pytest

from src.data.corpus import random_guarded_sentence
from src.exceptions import (
    ArityError, FormulaSyntaxError, SignatureError, UndeclaredSymbolError,
)
from src.logic.parser import format_document, parse_document, parse_formula, parse_signature
from src.logic.signature import Signature
from src.logic.syntax import (
    And, Atom, Const, Eq, Exists, Falsum, Forall, Iff, Implies, Not, Or, Var, Verum, atom, constants_used,
    formula_size, print_formula, quantifier_depth, simplify, split_guard, substitute,
    uses_nontrivial_equality, variables,
)

X, Y = variables("x", "y")

ROUND_TRIP_SIG = Signature.build({"P": 1, "Q": 1, "R": 2, "S": 3}, constants=["c", "d"])


def random_ast(sig, seed, depth=4):
    """AST ngẫu nhiên dùng mọi loại nút; mỗi biến ràng buộc có tên riêng"""
    rng = np.random.default_rng(seed)
    counter = itertools.count()
    relations = list(sig.relations)
    constants = [Const(c) for c in sig.constants]

    def term(scope):
        pool = scope + constants
        return pool[int(rng.integers(len(pool)))]

    def leaf(scope):
        k = rng.random()
        if k < 0.1:
            return Verum() if rng.random() < 0.5 else Falsum()
        if k < 0.25:
            return Eq(term(scope), term(scope))
        name, arity = relations[int(rng.integers(len(relations)))]
        return Atom(name, tuple(term(scope) for _ in range(arity)))

    def gen(scope, level):
        r = rng.random()
        if level <= 0 or r < 0.2:
            return leaf(scope)
        if r < 0.35:
            return Not(gen(scope, level - 1))
        if r < 0.7:
            cls = (And, Or, Implies, Iff)[int(rng.integers(4))]
            return cls(gen(scope, level - 1), gen(scope, level - 1))
        block = tuple(Var(f"w{next(counter)}") for _ in range(int(rng.integers(1, 3))))
        cls = Forall if rng.random() < 0.5 else Exists
        return cls(block, gen(scope + list(block), level - 1))

    return gen([], depth)


class TestSignature:
    """Test cases for Signature"""

    def test_build_sorts_relations(self):
        """Relations are stored sorted by name"""
        sig = Signature.build({"R": 2, "P": 1})

        assert sig.relation_names == ("P", "R")
        assert sig.width == 2

    def test_special_symbols_must_be_binary(self):
        """Universal and transitive symbols must be binary"""
        with pytest.raises(SignatureError, match="binary"):
            Signature.build({"U": 1}, universal="U")

        with pytest.raises(SignatureError):
            Signature.build({"P": 1}, transitive=["T"])

    def test_relation_constant_clash(self):
        """A name cannot be both a relation and a constant"""
        with pytest.raises(SignatureError):
            Signature.build({"c": 1}, constants=["c"])

    def test_fresh_name(self):
        """fresh_name skips names in use"""
        sig = Signature.build({"_Ex0": 2, "P": 1})

        assert sig.fresh_name("_Ex") == "_Ex1"
        assert sig.fresh_name("Q") == "Q0"

    def test_extend_and_restrict(self):
        """extend adds symbols, restrict drops them again"""
        sig = Signature.build({"P": 1})
        extended = sig.extend({"T": 2}, transitive=["T"])

        assert extended.is_transitive("T")
        assert extended.restrict(["P"]) == sig

        with pytest.raises(SignatureError):
            sig.extend({"P": 2})


class TestParser:
    """Test cases for parse_document / parse_formula"""

    def test_parse_document(self):
        """Header and formula are parsed together"""
        sig, f = parse_document("rel P/1; rel R/2;\nforall x (P(x) -> exists y (R(x,y) & P(y)))")

        assert sig.arities == {"P": 1, "R": 2}
        expected = Forall((X,), Implies(atom("P", "x"), Exists((Y,), And(atom("R", "x", "y"), atom("P", "y")))))
        assert f == expected

    def test_print_round_trip(self):
        """Printed formulas parse back to the same AST"""
        sig, f = parse_document(
            "rel P/1; rel R/2; universal U;\n"
            "forall x y (U(x,y) -> (R(x,y) | !R(y,x))) & exists x (P(x) <-> P(x))"
        )

        assert parse_formula(print_formula(f), sig) == f
        assert parse_document(format_document(sig, f)) == (sig, f)

    def test_printer_output(self):
        """Binary connectives are always parenthesized"""
        _, f = parse_document("rel P/1; rel R/2;\nforall x (P(x) -> exists y (R(x,y) & P(y)))")

        assert print_formula(f) == "forall x (P(x) -> exists y (R(x,y) & P(y)))"

    def test_precedence(self):
        """& binds tighter than |, which binds tighter than ->"""
        sig = Signature.build({"P": 1, "Q": 1, "S": 1})
        f = parse_formula("forall x (P(x) | Q(x) & S(x) -> !P(x) & Q(x))", sig)

        body = f.body
        assert isinstance(body, Implies)
        assert body.left == Or(atom("P", "x"), And(atom("Q", "x"), atom("S", "x")))
        assert body.right == And(Not(atom("P", "x")), atom("Q", "x"))

    def test_implication_is_right_associative(self):
        """a -> b -> c parses as a -> (b -> c)"""
        sig = Signature.build({"P": 1, "Q": 1, "S": 1})
        f = parse_formula("forall x (P(x) -> Q(x) -> S(x))", sig)

        assert f.body == Implies(atom("P", "x"), Implies(atom("Q", "x"), atom("S", "x")))

    def test_comments_and_whitespace(self):
        """# comments are ignored"""
        sig, f = parse_document("# header\nrel P/1;\n\nexists x (P(x))  # trailing\n")

        assert f == Exists((X,), atom("P", "x"))

    def test_constants_are_terms(self):
        """Declared constants parse as Const, not Var"""
        sig, f = parse_document("rel R/2; const c;\nforall x (R(x,c) -> x = c)")

        assert f.body.left == Atom("R", (X, Const("c")))
        assert constants_used(f) == frozenset({"c"})

    def test_special_declarations_declare_binary_relations(self):
        """universal / transitive / aux declare binary symbols"""
        sig = parse_signature("universal U; transitive T, S; aux A;")

        assert sig.arities == {"A": 2, "S": 2, "T": 2, "U": 2}
        assert sig.universal_symbol == "U"
        assert sig.transitive_symbols == frozenset({"S", "T"})
        assert sig.aux_symbol == "A"

    def test_conflicting_arity(self):
        """rel U/1 cannot be the universal symbol"""
        with pytest.raises(SignatureError):
            parse_signature("rel U/1; universal U;")

    def test_bound_variables_renamed_apart(self):
        """A reused bound variable gets a fresh name"""
        _, f = parse_document("rel P/1;\nexists x (P(x)) & forall x (P(x))")

        assert f.left.variables == (X,)
        assert f.right.variables == (Var("x_1"),)

    def test_syntax_error_has_position(self):
        """Syntax errors carry line and column"""
        with pytest.raises(FormulaSyntaxError) as info:
            parse_document("rel P/1;\nexists x (P(x) & & P(x))")

        assert info.value.line == 2
        assert isinstance(info.value, ValueError)

    def test_unexpected_end(self):
        """Truncated input is a syntax error"""
        with pytest.raises(FormulaSyntaxError):
            parse_document("rel P/1;\nforall x (P(x) ->")

    def test_undeclared_symbol(self):
        """Relations must be declared"""
        sig = Signature.build({"P": 1})

        with pytest.raises(UndeclaredSymbolError, match="Q"):
            parse_formula("exists x (Q(x))", sig)

    def test_arity_mismatch(self):
        """Applying a relation to the wrong number of arguments fails"""
        sig = Signature.build({"R": 2})

        with pytest.raises(ArityError):
            parse_formula("exists x (R(x))", sig)

    def test_constant_cannot_be_quantified(self):
        """forall c is rejected when c is a constant"""
        with pytest.raises(FormulaSyntaxError, match="cannot be quantified"):
            parse_document("rel P/1; const c;\nforall c (P(c))")

    def test_missing_formula(self):
        """A header alone is not a document"""
        with pytest.raises(FormulaSyntaxError):
            parse_document("rel P/1;")


class TestSyntaxHelpers:
    """Test cases for guard recognition and rewriting helpers"""

    def test_split_guard_forall(self):
        """The guard of forall x y (R(x,y) -> P(x)) is R(x,y)"""
        f = Forall((X, Y), Implies(atom("R", "x", "y"), atom("P", "x")))
        split = split_guard(f)

        assert split.guard == atom("R", "x", "y")
        assert split.matrix == atom("P", "x")

    def test_split_guard_searches_conjunction(self):
        """The guard may be any conjunct covering the matrix"""
        f = Exists((Y,), And(atom("P", "y"), atom("R", "x", "y")))
        split = split_guard(f)

        assert split.guard == atom("R", "x", "y")
        assert split.matrix == atom("P", "y")

    def test_unguarded(self):
        """No atom covers both variables"""
        f = Exists((X, Y), And(atom("P", "x"), atom("P", "y")))

        assert split_guard(f) is None

    def test_size_and_depth(self):
        """formula_size counts atom arguments, quantifier_depth nests"""
        f = Forall((X,), Implies(atom("P", "x"), Exists((Y,), atom("R", "x", "y"))))

        assert formula_size(atom("R", "x", "y")) == 3
        assert quantifier_depth(f) == 2

    def test_substitute_respects_binding(self):
        """Bound occurrences are not substituted"""
        f = And(atom("P", "x"), Exists((X,), atom("R", "x", "y")))
        result = substitute(f, {X: Var("z"), Y: Const("c")})

        assert result == And(atom("P", "z"), Exists((X,), Atom("R", (X, Const("c")))))

    def test_simplify(self):
        """Trivial equalities and constants are removed"""
        assert simplify(And(Verum(), atom("P", "x"))) == atom("P", "x")
        assert simplify(Eq(X, X)) == Verum()
        assert simplify(Not(Not(atom("P", "x")))) == atom("P", "x")

    def test_nontrivial_equality(self):
        """x = x is trivial, x = y is not"""
        assert not uses_nontrivial_equality(Forall((X,), Implies(Eq(X, X), atom("P", "x"))))
        assert uses_nontrivial_equality(Eq(X, Y))

    def test_free_vars(self):
        """Quantifiers bind their block"""
        f = Exists((Y,), atom("R", "x", "y"))

        assert f.free_vars == frozenset({X})
        assert not f.is_sentence


class TestRoundTripProperty:
    """Parser and printer agree on generated formulas"""

    def test_random_asts(self):
        """parse(print(f)) == f for 1000 generated ASTs"""
        for seed in range(1000):
            f = random_ast(ROUND_TRIP_SIG, seed)
            text = print_formula(f)
            parsed = parse_formula(text, ROUND_TRIP_SIG)

            assert parsed == f, text
            assert print_formula(parsed) == text

    def test_random_guarded_sentences(self):
        """Same for the guarded generator, transitive guards included"""
        sig = Signature.build({"P": 1, "Q": 1, "R": 2, "T": 2}, transitive=["T"])
        for seed in range(200):
            f = random_guarded_sentence(sig, seed=seed, depth=3)

            assert parse_formula(print_formula(f), sig) == f
