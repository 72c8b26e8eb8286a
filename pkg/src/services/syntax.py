"""
Concrete syntax: a lark LALR grammar for types, terms and `.lpl` programs,
and a minimal-parentheses printer whose output parses back to the same tree.

    types   A -> B (right assoc), A & B (left assoc, binds tighter), forall X. A
    terms   \\x:A. r   /\\X. r   r s   r {A}   r + s   pi[A](r)   x   x:A
    files   def name = term ;   ...   [term]      # comments

Unicode input aliases: λ Λ π ∀ ∧ ⇒ →.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from lark import Lark, Token, Transformer, Tree
from lark.exceptions import UnexpectedCharacters, UnexpectedInput

from src.core.term_expr import App, Lam, Proj, Sum, TApp, TermExpr, TLam, TypedVar, Var
from src.core.type_expr import Arrow, Conj, Forall, TVar, TypeExpr
from src.errors import LexicalError, ParseError, UnboundVariableError

logger = logging.getLogger(__name__)

GRAMMAR = r"""
    program: definition* (term ";"?)?
    definition: "def" NAME "=" term ";"
    term_only: term
    type_only: type_expr

    ?term: sum_level
         | sum_level "+" binder          -> plus
         | binder

    ?binder: ("\\" | "λ") NAME ":" type_expr "." term     -> lam
           | ("/\\" | "Λ") TYPE_NAME "." term            -> tlam

    ?sum_level: sum_level "+" app_level  -> plus
              | app_level

    ?app_level: app_level atom                -> apply
              | app_level "{" type_expr "}"   -> tapply
              | atom

    ?atom: NAME                                       -> ref
         | NAME ":" type_expr                         -> annot
         | ("pi" | "π") "[" type_expr "]" "(" term ")"  -> proj
         | "(" term ")"

    ?type_expr: arrow_level
              | ("forall" | "∀") TYPE_NAME "." type_expr    -> forall

    ?arrow_level: conj_level ("->" | "⇒" | "→") type_expr  -> arrow
                | conj_level

    ?conj_level: conj_level ("&" | "∧") type_atom  -> conj
               | type_atom

    ?type_atom: TYPE_NAME                -> tvar
              | "(" type_expr ")"

    NAME: /[a-z_][A-Za-z0-9_']*/
    TYPE_NAME: /[A-Z][A-Za-z0-9_']*/
    COMMENT: /#[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""


# lowercase keywords that the NAME terminal would otherwise accept
RESERVED_WORDS = ("def", "forall", "pi")


@dataclass
class Program:
    definitions: List[Tuple[str, TermExpr]] = field(default_factory=list)
    main: Optional[TermExpr] = None


class _TypeBuilder(Transformer):
    def tvar(self, children):
        return TVar(str(children[0]))

    def arrow(self, children):
        return Arrow(children[0], children[1])

    def conj(self, children):
        return Conj(children[0], children[1])

    def forall(self, children):
        return Forall(str(children[0]), children[1])


class Parser:
    def __init__(self):
        self._lark = Lark(GRAMMAR, parser="lalr", start=["program", "term_only", "type_only"])
        self._types = _TypeBuilder()

    def parse_type(self, text: str) -> TypeExpr:
        tree = self._parse(text, "type_only")
        return self._type(tree.children[0])

    def parse_term(self, text: str, definitions: Dict[str, TermExpr] = None) -> TermExpr:
        tree = self._parse(text, "term_only")
        return self._term(tree.children[0], (), definitions or {})

    def parse_program(self, text: str) -> Program:
        tree = self._parse(text, "program")
        program = Program()
        defs: Dict[str, TermExpr] = {}
        for child in tree.children:
            if isinstance(child, Tree) and child.data == "definition":
                name, body = child.children
                self._check_name(name)
                if str(name) in defs:
                    logger.warning(f"Definition '{name}' at line {name.line} shadows an earlier one")
                term = self._term(body, (), defs)
                defs[str(name)] = term
                program.definitions.append((str(name), term))
            else:
                program.main = self._term(child, (), defs)
        logger.debug(f"Parsed program: {len(program.definitions)} definitions, main={'yes' if program.main else 'no'}")
        return program

    def _parse(self, text: str, start: str) -> Tree:
        try:
            return self._lark.parse(text, start=start)
        except UnexpectedCharacters as e:
            raise LexicalError(f"unexpected character {text[e.pos_in_stream]!r}", e.line, e.column) from e
        except UnexpectedInput as e:
            token = getattr(e, "token", None)
            found = "end of input" if token is None or token.type == "$END" else repr(str(token))
            raise ParseError(f"unexpected {found}", getattr(e, "line", None), getattr(e, "column", None)) from e

    def _type(self, tree) -> TypeExpr:
        if isinstance(tree, Token):
            return TVar(str(tree))
        return self._types.transform(tree)

    def _check_name(self, token: Token) -> str:
        if str(token) in RESERVED_WORDS:
            raise ParseError(f"'{token}' is a reserved word and cannot name a variable", token.line, token.column)
        return str(token)

    def _term(self, tree: Tree, env: Tuple[TypedVar, ...], defs: Dict[str, TermExpr]) -> TermExpr:
        kind = tree.data
        c = tree.children
        if kind == "ref":
            name = self._check_name(c[0])
            for binder in env:
                if binder.name == name:
                    return Var(binder)
            if name in defs:
                return defs[name]
            raise UnboundVariableError(f"'{name}' is neither bound nor annotated", c[0].line, c[0].column)
        if kind == "annot":
            return Var(TypedVar(self._check_name(c[0]), self._type(c[1])))
        if kind == "lam":
            binder = TypedVar(self._check_name(c[0]), self._type(c[1]))
            return Lam(binder, self._term(c[2], (binder,) + env, defs))
        if kind == "tlam":
            return TLam(str(c[0]), self._term(c[1], env, defs))
        if kind == "plus":
            return Sum(self._term(c[0], env, defs), self._term(c[1], env, defs))
        if kind == "apply":
            return App(self._term(c[0], env, defs), self._term(c[1], env, defs))
        if kind == "tapply":
            return TApp(self._term(c[0], env, defs), self._type(c[1]))
        if kind == "proj":
            return Proj(self._type(c[0]), self._term(c[1], env, defs))
        raise ParseError(f"unexpected construct {kind}")


# Printing

_TOP, _ARROW_L, _CONJ_L, _CONJ_R = range(4)


def print_type(t: TypeExpr) -> str:
    return _type_text(t, _TOP)


def _type_text(t: TypeExpr, ctx: int) -> str:
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, Forall):
        text = f"forall {t.binder}. {_type_text(t.body, _TOP)}"
        return text if ctx == _TOP else f"({text})"
    if isinstance(t, Arrow):
        text = f"{_type_text(t.domain, _ARROW_L)} -> {_type_text(t.codomain, _TOP)}"
        return text if ctx == _TOP else f"({text})"
    text = f"{_type_text(t.left, _CONJ_L)} & {_type_text(t.right, _CONJ_R)}"
    return f"({text})" if ctx == _CONJ_R else text


_SUM_L, _SUM_R, _APP_F, _APP_A = range(1, 5)


def print_term(r: TermExpr) -> str:
    return _term_text(r, _TOP, ())


def _term_text(r: TermExpr, ctx: int, env: Tuple[TypedVar, ...]) -> str:
    if isinstance(r, Var):
        nearest = next((b for b in env if b.name == r.var.name), None)
        if nearest is not None and nearest == r.var:
            return r.var.name
        return f"{r.var.name}:{print_type(r.var.annotation)}"
    if isinstance(r, Lam):
        body = _term_text(r.body, _TOP, (r.binder,) + env)
        text = f"\\{r.binder.name}:{print_type(r.binder.annotation)}. {body}"
        return text if ctx == _TOP else f"({text})"
    if isinstance(r, TLam):
        text = f"/\\{r.binder}. {_term_text(r.body, _TOP, env)}"
        return text if ctx == _TOP else f"({text})"
    if isinstance(r, Sum):
        text = f"{_term_text(r.left, _SUM_L, env)} + {_term_text(r.right, _SUM_R, env)}"
        return text if ctx in (_TOP, _SUM_L) else f"({text})"
    if isinstance(r, App):
        text = f"{_term_text(r.fun, _APP_F, env)} {_term_text(r.arg, _APP_A, env)}"
        return f"({text})" if ctx == _APP_A else text
    if isinstance(r, TApp):
        text = f"{_term_text(r.fun, _APP_F, env)} {{{print_type(r.arg)}}}"
        return f"({text})" if ctx == _APP_A else text
    return f"pi[{print_type(r.target)}]({_term_text(r.body, _TOP, env)})"


parser = Parser()


def parse_type(text: str) -> TypeExpr:
    return parser.parse_type(text)


def parse_term(text: str, definitions: Dict[str, TermExpr] = None) -> TermExpr:
    return parser.parse_term(text, definitions)


def parse_program(text: str) -> Program:
    return parser.parse_program(text)
