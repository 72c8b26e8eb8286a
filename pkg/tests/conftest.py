import pytest

from src.core.term_expr import App, Lam, Proj, Sum, TApp, TLam, TypedVar, Var, subst_term, subst_type_in_term
from src.core.type_expr import Arrow, Conj, TVar, canonicalize
from src.services.rewriter import structural_normalize
from src.services.syntax import parse_program, parse_term, parse_type

# a sum of three projections with a shared summand
NESTED_PROJECTIONS = "pi[A](x:A + pi[A](y:A + z:A) + z:A)"

BOOLEANS = """
def true = \\x:A. \\y:B. x;
def false = \\x:A. \\y:B. y;
def tf = \\x:A. \\y:B. (x + y);
"""


def booleans():
    return dict(parse_program(BOOLEANS).definitions)


def term(text: str):
    return parse_term(text, booleans())


def nf(text: str):
    return structural_normalize(term(text))


def canon(text: str):
    return canonicalize(parse_type(text))


def rename_binders(r):
    """An alpha-variant of r with every binder given a new name."""
    if isinstance(r, Lam):
        fresh = TypedVar(r.binder.name + "_r", r.binder.annotation)
        return Lam(fresh, rename_binders(subst_term(r.body, r.binder, Var(fresh))))
    if isinstance(r, TLam):
        fresh = r.binder + "_r"
        return TLam(fresh, rename_binders(subst_type_in_term(r.body, r.binder, TVar(fresh))))
    if isinstance(r, App):
        return App(rename_binders(r.fun), rename_binders(r.arg))
    if isinstance(r, Sum):
        return Sum(rename_binders(r.left), rename_binders(r.right))
    if isinstance(r, Proj):
        return Proj(r.target, rename_binders(r.body))
    if isinstance(r, TApp):
        return TApp(rename_binders(r.fun), r.arg)
    return r


def rewrites(t):
    """Every type one axiom instance away from t, in either direction, at any position."""
    if isinstance(t, Conj):
        yield Conj(t.right, t.left)
        if isinstance(t.left, Conj):
            yield Conj(t.left.left, Conj(t.left.right, t.right))
        if isinstance(t.right, Conj):
            yield Conj(Conj(t.left, t.right.left), t.right.right)
        if isinstance(t.left, Arrow) and isinstance(t.right, Arrow) and t.left.domain == t.right.domain:
            yield Arrow(t.left.domain, Conj(t.left.codomain, t.right.codomain))
        for left in rewrites(t.left):
            yield Conj(left, t.right)
        for right in rewrites(t.right):
            yield Conj(t.left, right)
    elif isinstance(t, Arrow):
        if isinstance(t.codomain, Conj):
            yield Conj(Arrow(t.domain, t.codomain.left), Arrow(t.domain, t.codomain.right))
        for domain in rewrites(t.domain):
            yield Arrow(domain, t.codomain)
        for codomain in rewrites(t.codomain):
            yield Arrow(t.domain, codomain)


@pytest.fixture
def nested_projections():
    return parse_term(NESTED_PROJECTIONS)
