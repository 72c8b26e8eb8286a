"""
Seeded generators of types and well-typed terms.

Terms are built along typing derivations, so every output type-checks; the
checker is consulted only to read off the types of generated subterms.
"""
import logging
import random
from typing import List, Sequence

from src.core.term_expr import App, Lam, Proj, Sum, TApp, TermExpr, TLam, TypedVar, Var, free_vars
from src.core.type_expr import (
    Arrow,
    CanonicalType,
    Conj,
    Forall,
    TVar,
    TypeExpr,
    canonical_key,
    free_type_vars,
    fresh_type_name,
    read_back,
)
from src.services.type_checker import TypeChecker, type_checker

logger = logging.getLogger(__name__)

DEFAULT_VAR_POOL = ("A", "B")

DEFAULT_TYPE_POOL = (
    TVar("A"),
    TVar("B"),
    TVar("X"),
    Arrow(TVar("A"), TVar("B")),
    Conj(TVar("A"), TVar("B")),
    Arrow(TVar("X"), TVar("A")),
)

TERM_NAMES = ("x", "y", "z", "w")
TYPE_BINDERS = ("X", "Y", "Z")

# closed polymorphic head used for type applications of free variables
POLY_IDENTITY = Forall("X", Arrow(TVar("X"), TVar("X")))

CONSTRUCTORS = ("var", "lam", "app", "sum", "proj", "tlam", "tapp")


def _ordered(vs) -> List[TypedVar]:
    return sorted(vs, key=lambda v: (v.name, canonical_key(v.key[1])))


class TermGenerator:
    def __init__(self, seed: int, checker: TypeChecker = None):
        self.random = random.Random(seed)
        self.checker = checker or type_checker

    # Types

    def gen_type(self, size_budget: int, var_pool: Sequence[str] = DEFAULT_VAR_POOL) -> TypeExpr:
        if size_budget < 1:
            raise ValueError("size budget must be at least 1")
        return self._type(size_budget, tuple(var_pool))

    def _type(self, budget: int, pool) -> TypeExpr:
        if budget == 1 or self.random.random() < 0.25:
            return TVar(self.random.choice(pool))
        kinds = ["forall"] if budget == 2 else ["arrow", "conj", "forall"]
        kind = self.random.choice(kinds)
        if kind == "forall":
            binder = self.random.choice(TYPE_BINDERS)
            return Forall(binder, self._type(budget - 1, pool + (binder,)))
        left = self.random.randint(1, budget - 2)
        right = self.random.randint(1, budget - 1 - left)
        a, b = self._type(left, pool), self._type(right, pool)
        return Arrow(a, b) if kind == "arrow" else Conj(a, b)

    # Terms

    def gen_term(self, size_budget: int, type_pool: Sequence[TypeExpr] = DEFAULT_TYPE_POOL) -> TermExpr:
        if size_budget < 1:
            raise ValueError("size budget must be at least 1")
        return self._term(size_budget, tuple(type_pool))

    def _var(self, pool) -> TermExpr:
        return Var(TypedVar(self.random.choice(TERM_NAMES), self.random.choice(pool)))

    def _split(self, budget: int) -> (int, int):
        """Two positive sizes adding up to at most `budget`."""
        left = self.random.randint(1, budget - 1)
        right = self.random.randint(1, budget - left)
        return left, right

    def _term(self, budget: int, pool) -> TermExpr:
        kinds = ["var"]
        if budget >= 2:
            kinds += ["lam", "tlam"]
        if budget >= 3:
            kinds += ["app", "sum"]
        if budget >= 4:
            kinds += ["proj", "tapp"]
        kind = self.random.choice(kinds)
        return getattr(self, f"_gen_{kind}")(budget, pool)

    def _gen_var(self, budget, pool) -> TermExpr:
        return self._var(pool)

    def _gen_lam(self, budget, pool) -> TermExpr:
        body = self._term(budget - 1, pool)
        free = _ordered(free_vars(body))
        if free and self.random.random() < 0.7:
            return Lam(self.random.choice(free), body)
        return Lam(TypedVar(self.random.choice(TERM_NAMES), self.random.choice(pool)), body)

    def _gen_app(self, budget, pool) -> TermExpr:
        arg_size, rest = self._split(budget - 1)
        arg = self._term(arg_size, pool)
        domain_type = self.checker.infer(arg)
        domain = read_back(domain_type)
        if rest >= 6 and self.random.random() < 0.4:
            return App(self._projection_head(rest, domain_type, pool), arg)
        if rest >= 2 and self.random.random() < 0.7:
            body = self._term(rest - 1, pool)
            matching = [v for v in _ordered(free_vars(body)) if v.key[1] == domain_type]
            binder = self.random.choice(matching) if matching else TypedVar(self.random.choice(TERM_NAMES), domain)
            return App(Lam(binder, body), arg)
        fun = TypedVar("f", Arrow(domain, self.random.choice(pool)))
        return App(Var(fun), arg)

    def _projection_head(self, budget, domain_type, pool) -> TermExpr:
        """`pi[dom -> T](\\x:dom. r + \\x:dom. s)` of size at most budget, with T the type of r."""
        left, right = self._split(budget - 4)
        pool = (read_back(domain_type),) + pool
        first, second = self._term(left, pool), self._term(right, pool)
        matching = [v for v in _ordered(free_vars(first)) if v.key[1] == domain_type]
        binder = self.random.choice(matching) if matching else TypedVar(self.random.choice(TERM_NAMES), read_back(domain_type))
        target = Arrow(binder.annotation, read_back(self.checker.infer(first)))
        return Proj(target, Sum(Lam(binder, first), Lam(binder, second)))

    def _gen_sum(self, budget, pool) -> TermExpr:
        left, right = self._split(budget - 1)
        return Sum(self._term(left, pool), self._term(right, pool))

    def _gen_proj(self, budget, pool) -> TermExpr:
        left, right = self._split(budget - 2)
        body = Sum(self._term(left, pool), self._term(right, pool))
        if self.random.random() < 0.5:
            return Proj(read_back(self.checker.infer(body.left)), body)
        primes = self.checker.infer(body).primes
        k = self.random.randint(1, len(primes) - 1)
        picked = sorted(self.random.sample(range(len(primes)), k))
        return Proj(read_back(CanonicalType(tuple(primes[i] for i in picked))), body)

    def _gen_tlam(self, budget, pool) -> TermExpr:
        body = self._term(budget - 1, pool)
        return TLam(self._free_binder(body), body)

    def _free_binder(self, body: TermExpr) -> str:
        taken = set()
        for v in free_vars(body):
            taken |= free_type_vars(v.annotation)
        allowed = [x for x in TYPE_BINDERS if x not in taken]
        if allowed:
            return self.random.choice(allowed)
        return fresh_type_name("X", taken)

    def _gen_tapp(self, budget, pool) -> TermExpr:
        arg = self.random.choice(pool)
        if self.random.random() < 0.2:
            return TApp(Var(TypedVar("f", POLY_IDENTITY)), arg)
        body = self._term(budget - 2, pool)
        return TApp(TLam(self._free_binder(body), body), arg)


def gen_type(seed: int, size_budget: int, var_pool: Sequence[str] = DEFAULT_VAR_POOL) -> TypeExpr:
    return TermGenerator(seed).gen_type(size_budget, var_pool)


def gen_term(seed: int, size_budget: int, type_pool: Sequence[TypeExpr] = DEFAULT_TYPE_POOL) -> TermExpr:
    return TermGenerator(seed).gen_term(size_budget, type_pool)
