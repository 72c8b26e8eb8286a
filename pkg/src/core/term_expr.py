"""
Terms with explicitly typed variables.

A variable is identified by its name together with the canonical form of
its annotation: `x:A` and `x:B` are different variables unless A and B are
equivalent, so in `\\x:A. x:B` the occurrence is free.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Tuple, Union

from src.core.type_expr import (
    TVar,
    TypeExpr,
    canonical_key,
    canonicalize,
    free_type_vars,
    fresh_type_name,
    subst_type,
    CanonicalType,
)


@dataclass(frozen=True, eq=False)
class TypedVar:
    name: str
    annotation: TypeExpr

    @cached_property
    def key(self) -> Tuple[str, CanonicalType]:
        return (self.name, canonicalize(self.annotation))

    def __eq__(self, other):
        return isinstance(other, TypedVar) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


@dataclass(frozen=True)
class Var:
    var: TypedVar


@dataclass(frozen=True)
class Lam:
    binder: TypedVar
    body: "TermExpr"


@dataclass(frozen=True)
class App:
    fun: "TermExpr"
    arg: "TermExpr"


@dataclass(frozen=True)
class Sum:
    left: "TermExpr"
    right: "TermExpr"


@dataclass(frozen=True)
class Proj:
    target: TypeExpr
    body: "TermExpr"


@dataclass(frozen=True)
class TLam:
    binder: str
    body: "TermExpr"


@dataclass(frozen=True)
class TApp:
    fun: "TermExpr"
    arg: TypeExpr


TermExpr = Union[Var, Lam, App, Sum, Proj, TLam, TApp]


def free_vars(r: TermExpr) -> FrozenSet[TypedVar]:
    if isinstance(r, Var):
        return frozenset({r.var})
    if isinstance(r, Lam):
        return free_vars(r.body) - {r.binder}
    if isinstance(r, App):
        return free_vars(r.fun) | free_vars(r.arg)
    if isinstance(r, Sum):
        return free_vars(r.left) | free_vars(r.right)
    if isinstance(r, TApp):
        return free_vars(r.fun)
    return free_vars(r.body)


def type_env(r: TermExpr) -> FrozenSet[CanonicalType]:
    """Canonical types of the free variables of `r`."""
    return frozenset(v.key[1] for v in free_vars(r))


def free_type_vars_term(r: TermExpr) -> FrozenSet[str]:
    if isinstance(r, Var):
        return free_type_vars(r.var.annotation)
    if isinstance(r, Lam):
        return free_type_vars(r.binder.annotation) | free_type_vars_term(r.body)
    if isinstance(r, App):
        return free_type_vars_term(r.fun) | free_type_vars_term(r.arg)
    if isinstance(r, Sum):
        return free_type_vars_term(r.left) | free_type_vars_term(r.right)
    if isinstance(r, Proj):
        return free_type_vars(r.target) | free_type_vars_term(r.body)
    if isinstance(r, TLam):
        return free_type_vars_term(r.body) - {r.binder}
    return free_type_vars_term(r.fun) | free_type_vars(r.arg)


def fresh_term_name(base: str, avoid) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def subst_term(r: TermExpr, x: TypedVar, s: TermExpr) -> TermExpr:
    """Capture-avoiding r[s/x]; only occurrences with x's identity key are replaced."""
    if isinstance(r, Var):
        return s if r.var == x else r
    if isinstance(r, App):
        return App(subst_term(r.fun, x, s), subst_term(r.arg, x, s))
    if isinstance(r, Sum):
        return Sum(subst_term(r.left, x, s), subst_term(r.right, x, s))
    if isinstance(r, Proj):
        return Proj(r.target, subst_term(r.body, x, s))
    if isinstance(r, TApp):
        return TApp(subst_term(r.fun, x, s), r.arg)
    if isinstance(r, Lam):
        if r.binder == x or x not in free_vars(r.body):
            return r
        binder, body = r.binder, r.body
        fv_s = free_vars(s)
        if binder in fv_s:
            avoid = {v.name for v in fv_s | free_vars(body)} | {x.name}
            renamed = TypedVar(fresh_term_name(binder.name, avoid), binder.annotation)
            body = subst_term(body, binder, Var(renamed))
            binder = renamed
        return Lam(binder, subst_term(body, x, s))
    # TLam: occurrences annotated with the bound type variable are other variables
    if r.binder in free_type_vars(x.annotation) or x not in free_vars(r.body):
        return r
    binder, body = r.binder, r.body
    ftv_s = free_type_vars_term(s)
    if binder in ftv_s:
        renamed = fresh_type_name(binder, ftv_s | free_type_vars_term(body) | free_type_vars(x.annotation))
        body = subst_type_in_term(body, binder, TVar(renamed))
        binder = renamed
    return TLam(binder, subst_term(body, x, s))


def subst_type_in_term(r: TermExpr, x: str, b: TypeExpr) -> TermExpr:
    """r[b/x]: substitutes in every annotation, renaming Λ binders that would capture b."""
    if isinstance(r, Var):
        return Var(TypedVar(r.var.name, subst_type(r.var.annotation, x, b)))
    if isinstance(r, App):
        return App(subst_type_in_term(r.fun, x, b), subst_type_in_term(r.arg, x, b))
    if isinstance(r, Sum):
        return Sum(subst_type_in_term(r.left, x, b), subst_type_in_term(r.right, x, b))
    if isinstance(r, Proj):
        return Proj(subst_type(r.target, x, b), subst_type_in_term(r.body, x, b))
    if isinstance(r, TApp):
        return TApp(subst_type_in_term(r.fun, x, b), subst_type(r.arg, x, b))
    if isinstance(r, Lam):
        binder, body = r.binder, r.body
        moved = TypedVar(binder.name, subst_type(binder.annotation, x, b))
        fv = free_vars(body)
        # a free x:B that only becomes equal to the binder after substitution must stay free
        if any(w.name == binder.name and w != binder
               and TypedVar(w.name, subst_type(w.annotation, x, b)) == moved for w in fv):
            renamed = TypedVar(fresh_term_name(binder.name, {w.name for w in fv}), binder.annotation)
            body = subst_term(body, binder, Var(renamed))
            moved = TypedVar(renamed.name, moved.annotation)
        return Lam(moved, subst_type_in_term(body, x, b))
    if r.binder == x:
        return r
    binder, body = r.binder, r.body
    ftv_b = free_type_vars(b)
    if binder in ftv_b and x in free_type_vars_term(body):
        renamed = fresh_type_name(binder, ftv_b | free_type_vars_term(body) | {x})
        body = subst_type_in_term(body, binder, TVar(renamed))
        binder = renamed
    return TLam(binder, subst_type_in_term(body, x, b))


def _type_key(t: TypeExpr, tenv: Tuple[str, ...]) -> tuple:
    return canonical_key(canonicalize(t, tenv))


def term_key(r: TermExpr, venv: Tuple[TypedVar, ...] = (), tenv: Tuple[str, ...] = ()) -> tuple:
    """
    Nameless key: bound variables become binder distances, annotations become
    canonical keys. Keys are totally ordered and equal exactly for alpha-equivalent terms.
    """
    if isinstance(r, Var):
        for i, binder in enumerate(venv):
            if binder == r.var:
                return ("var", 0, i)
        return ("var", 1, r.var.name, _type_key(r.var.annotation, tenv))
    if isinstance(r, Lam):
        return ("lam", _type_key(r.binder.annotation, tenv), term_key(r.body, (r.binder,) + venv, tenv))
    if isinstance(r, App):
        return ("app", term_key(r.fun, venv, tenv), term_key(r.arg, venv, tenv))
    if isinstance(r, Sum):
        return ("sum", term_key(r.left, venv, tenv), term_key(r.right, venv, tenv))
    if isinstance(r, Proj):
        return ("proj", _type_key(r.target, tenv), term_key(r.body, venv, tenv))
    if isinstance(r, TLam):
        return ("tlam", term_key(r.body, venv, (r.binder,) + tenv))
    return ("tapp", term_key(r.fun, venv, tenv), _type_key(r.arg, tenv))


def alpha_eq(r: TermExpr, s: TermExpr) -> bool:
    return term_key(r) == term_key(s)


def term_size(r: TermExpr) -> int:
    if isinstance(r, Var):
        return 1
    if isinstance(r, (App, Sum)):
        left, right = (r.fun, r.arg) if isinstance(r, App) else (r.left, r.right)
        return 1 + term_size(left) + term_size(right)
    if isinstance(r, TApp):
        return 1 + term_size(r.fun)
    return 1 + term_size(r.body)
