"""
Parser Module

Parse công thức và header khai báo signature bằng lark (Earley).

Văn phạm (xem docs/grammar.md):
    document    := declaration* formula
    declaration := "rel" NAME "/" INT ";" | "const" NAME ("," NAME)* ";"
                 | "universal" NAME ";" | "transitive" NAME ("," NAME)* ";"
                 | "aux" NAME ";"
    formula     := iff với thứ tự ưu tiên <-> < -> < | < & < !, forall, exists

Biến được đổi tên tách biệt ngay khi parse (rename_apart).
"""

from typing import Dict, List, Optional, Set, Tuple

from lark import Lark, Token, Transformer, Tree
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from src.exceptions import ArityError, FormulaSyntaxError, SignatureError, UndeclaredSymbolError
from src.logic.signature import Signature
from src.logic.syntax import (
    And, Atom, Const, Eq, Exists, Falsum, Forall, Formula, Iff, Implies, Not, Or,
    Term, Var, Verum, print_formula, rename_apart,
)

GRAMMAR = r"""
document: declaration* formula

declaration: "rel" NAME "/" INT ";"               -> rel_decl
           | "const" NAME ("," NAME)* ";"         -> const_decl
           | "universal" NAME ";"                 -> universal_decl
           | "transitive" NAME ("," NAME)* ";"    -> transitive_decl
           | "aux" NAME ";"                       -> aux_decl

header: declaration*

?formula: implication
        | implication "<->" implication           -> iff

?implication: disjunction
            | disjunction "->" implication        -> implies

?disjunction: conjunction
            | disjunction "|" conjunction         -> disj

?conjunction: unary
            | conjunction "&" unary               -> conj

?unary: "!" unary                                 -> neg
      | "forall" NAME+ unary                      -> forall
      | "exists" NAME+ unary                      -> exists
      | primary

?primary: NAME "(" NAME ("," NAME)* ")"           -> atom
        | NAME "=" NAME                           -> equality
        | "true"                                  -> verum
        | "false"                                 -> falsum
        | "(" formula ")"

NAME: /(?!(?:forall|exists|true|false|rel|const|universal|transitive|aux)\b)[A-Za-z_][A-Za-z0-9_]*/
COMMENT: /#[^\n]*/

%import common.INT
%import common.WS
%ignore WS
%ignore COMMENT
"""

_parser = Lark(GRAMMAR, start=["document", "formula", "header"], parser="earley", propagate_positions=True)


class _FormulaBuilder(Transformer):
    """Chuyển parse tree thành AST, kiểm tra ký hiệu theo signature"""

    def __init__(self, sig: Signature):
        super().__init__()
        self.sig = sig
        self.constants = set(sig.constants)

    def _term(self, token: Token) -> Term:
        name = str(token)
        return Const(name) if name in self.constants else Var(name)

    def atom(self, items):
        name = str(items[0])
        if not self.sig.has_relation(name):
            raise UndeclaredSymbolError(
                f"Undeclared relation symbol {name} (line {items[0].line}, column {items[0].column})"
            )
        args = tuple(self._term(t) for t in items[1:])
        if len(args) != self.sig.arity(name):
            raise ArityError(
                f"Relation {name} has arity {self.sig.arity(name)} but is applied to {len(args)} "
                f"arguments (line {items[0].line}, column {items[0].column})"
            )
        return Atom(name, args)

    def equality(self, items):
        return Eq(self._term(items[0]), self._term(items[1]))

    def verum(self, _):
        return Verum()

    def falsum(self, _):
        return Falsum()

    def neg(self, items):
        return Not(items[0])

    def conj(self, items):
        return And(items[0], items[1])

    def disj(self, items):
        return Or(items[0], items[1])

    def implies(self, items):
        return Implies(items[0], items[1])

    def iff(self, items):
        return Iff(items[0], items[1])

    def _block(self, items) -> Tuple[Tuple[Var, ...], Formula]:
        names = items[:-1]
        for token in names:
            if str(token) in self.constants:
                raise FormulaSyntaxError(
                    f"Constant {token} cannot be quantified", token.line, token.column
                )
        return tuple(Var(str(t)) for t in names), items[-1]

    def forall(self, items):
        return Forall(*self._block(items))

    def exists(self, items):
        return Exists(*self._block(items))


def _syntax_error(error: UnexpectedInput) -> FormulaSyntaxError:
    if isinstance(error, UnexpectedEOF):
        return FormulaSyntaxError("Unexpected end of input")
    return FormulaSyntaxError("Syntax error", getattr(error, "line", None), getattr(error, "column", None))


def _parse_tree(text: str, start: str) -> Tree:
    try:
        return _parser.parse(text, start=start)
    except UnexpectedInput as e:
        raise _syntax_error(e) from e


def _signature_from_declarations(declarations: List[Tree]) -> Signature:
    relations: Dict[str, int] = {}
    constants: List[str] = []
    transitive: Set[str] = set()
    universal: Optional[str] = None
    aux: Optional[str] = None
    for decl in declarations:
        names = [str(t) for t in decl.children if isinstance(t, Token) and t.type == "NAME"]
        if decl.data == "rel_decl":
            arity = int(decl.children[1])
            if names[0] in relations and relations[names[0]] != arity:
                raise SignatureError(f"Relation {names[0]} declared twice with different arities")
            relations[names[0]] = arity
        elif decl.data == "const_decl":
            constants.extend(names)
        elif decl.data == "universal_decl":
            if universal is not None and universal != names[0]:
                raise SignatureError("Only one universal symbol may be declared")
            universal = names[0]
        elif decl.data == "transitive_decl":
            transitive.update(names)
        elif decl.data == "aux_decl":
            aux = names[0]
    # universal/transitive/aux tự khai báo quan hệ binary nếu thiếu dòng rel
    for name in [universal, aux, *sorted(transitive)]:
        if name is not None:
            relations.setdefault(name, 2)
    return Signature.build(relations, constants, universal, transitive, aux)


def _build(tree: Tree, sig: Signature) -> Formula:
    try:
        f = _FormulaBuilder(sig).transform(tree)
    except VisitError as e:
        raise e.orig_exc from e
    return rename_apart(f, reserved=sig.constants)


def parse_signature(text: str) -> Signature:
    """
    Parse header block

    Args:
        text: Chuỗi gồm các dòng khai báo `rel R/2; const c; ...`

    Returns:
        Signature
    """
    tree = _parse_tree(text, "header")
    return _signature_from_declarations(list(tree.children))


def parse_formula(text: str, sig: Signature) -> Formula:
    """
    Parse một công thức theo signature cho trước

    Args:
        text: Công thức (không có header)
        sig: Signature chứa mọi ký hiệu được dùng

    Returns:
        AST với biến đã đổi tên tách biệt

    Raises:
        FormulaSyntaxError: Lỗi cú pháp (có vị trí)
        UndeclaredSymbolError: Ký hiệu chưa khai báo
        ArityError: Sai số đối số
    """
    return _build(_parse_tree(text, "formula"), sig)


def parse_document(text: str) -> Tuple[Signature, Formula]:
    """
    Parse file .gf: header khai báo signature rồi tới công thức

    Returns:
        (signature, formula)
    """
    tree = _parse_tree(text, "document")
    declarations = [c for c in tree.children if isinstance(c, Tree) and c.data.endswith("_decl")]
    formula_tree = tree.children[-1]
    sig = _signature_from_declarations(declarations)
    if isinstance(formula_tree, Tree):
        return sig, _build(formula_tree, sig)
    raise FormulaSyntaxError("Missing formula after declarations")


def format_document(sig: Signature, f: Formula) -> str:
    """Ghép header và công thức thành nội dung file .gf"""
    header = sig.header()
    body = print_formula(f)
    return f"{header}\n{body}\n" if header else f"{body}\n"
