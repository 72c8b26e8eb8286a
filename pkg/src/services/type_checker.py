import logging
from functools import lru_cache

from src.core.term_expr import App, Lam, Proj, Sum, TApp, TermExpr, TLam, Var, free_vars
from src.core.type_expr import (
    CanonicalType,
    Forall,
    PArrow,
    PForall,
    canonicalize,
    conj_remainder,
    conj_union,
    factor_arrow,
    free_type_vars,
    read_back,
    read_back_prime,
    subst_type,
)
from src.errors import (
    DomainMismatch,
    EscapingTypeVariable,
    IllTyped,
    NotAConjunctionContaining,
    NotAnArrow,
    NotUniversal,
    TypingError,
)
from src.services.syntax import print_term, print_type

logger = logging.getLogger(__name__)


def _show(c: CanonicalType) -> str:
    return print_type(read_back(c))


class TypeChecker:
    """
    Syntax-directed checker. The equivalence rule never has to be searched for:
    every judgement is computed on canonical types, so each term gets exactly one
    canonical type or a TypingError.
    """

    def __init__(self, cache_size: int = 8192):
        self._infer = lru_cache(maxsize=cache_size)(self._infer_uncached)

    def infer(self, r: TermExpr) -> CanonicalType:
        return self._infer(r)

    def infer_checked(self, r: TermExpr) -> CanonicalType:
        """Like infer, but wraps failures as IllTyped for the reduction services."""
        try:
            return self._infer(r)
        except IllTyped:
            raise
        except TypingError as e:
            logger.debug(f"Rejected ill-typed input: {e}")
            raise IllTyped(e) from e

    def is_well_typed(self, r: TermExpr) -> bool:
        try:
            self._infer(r)
            return True
        except TypingError:
            return False

    def _infer_uncached(self, r: TermExpr) -> CanonicalType:
        if isinstance(r, Var):
            return canonicalize(r.var.annotation)

        if isinstance(r, Lam):
            domain = canonicalize(r.binder.annotation)
            body = self._infer(r.body)
            # arrows sharing a domain are ordered by codomain, so this stays sorted
            return CanonicalType(tuple(PArrow(domain, p) for p in body.primes))

        if isinstance(r, App):
            fun, arg = self._infer(r.fun), self._infer(r.arg)
            result = factor_arrow(fun, arg)
            if result is not None:
                return result
            if not all(isinstance(p, PArrow) for p in fun.primes):
                raise NotAnArrow(
                    f"{print_term(r.fun)} : {_show(fun)} is not a function type",
                    r, (fun, arg))
            raise DomainMismatch(
                f"{print_term(r.fun)} : {_show(fun)} cannot be applied to an argument of type {_show(arg)}",
                r, (fun, arg))

        if isinstance(r, Sum):
            return conj_union(self._infer(r.left), self._infer(r.right))

        if isinstance(r, Proj):
            body = self._infer(r.body)
            target = canonicalize(r.target)
            if conj_remainder(body, target) is None:
                raise NotAConjunctionContaining(
                    f"{print_term(r.body)} : {_show(body)} is not a conjunction containing {_show(target)}",
                    r, (body, target))
            return target

        if isinstance(r, TLam):
            escaping = [v for v in free_vars(r.body) if r.binder in free_type_vars(v.annotation)]
            if escaping:
                raise EscapingTypeVariable(
                    f"{r.binder} is free in the type of {', '.join(v.name for v in escaping)}",
                    r, tuple(v.key[1] for v in escaping))
            body = self._infer(r.body)
            return canonicalize(Forall(r.binder, read_back(body)))

        if isinstance(r, TApp):
            fun = self._infer(r.fun)
            if len(fun) != 1 or not isinstance(fun.primes[0], PForall):
                raise NotUniversal(
                    f"{print_term(r.fun)} : {_show(fun)} is not a universal type",
                    r, (fun,))
            quantified = read_back_prime(fun.primes[0])
            return canonicalize(subst_type(quantified.body, quantified.binder, r.arg))

        raise TypeError(f"not a term: {r!r}")


type_checker = TypeChecker()


def infer(r: TermExpr) -> CanonicalType:
    return type_checker.infer(r)
