import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.term_expr import (
    App,
    Lam,
    Proj,
    Sum,
    TApp,
    TLam,
    TypedVar,
    Var,
    alpha_eq,
    free_vars,
    subst_term,
    subst_type_in_term,
)
from src.core.type_expr import (
    Arrow,
    CanonicalType,
    Conj,
    Forall,
    PArrow,
    TVar,
    canonical_key,
    canonicalize,
    free_type_vars,
    read_back,
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
from src.services.syntax import parse_term, parse_type
from src.services.term_generator import gen_term, gen_type
from src.services.type_checker import TypeChecker, infer, type_checker
from tests.conftest import canon, rename_binders, term


@pytest.mark.parametrize("text, expected", [
    ("\\x:A & B. x", "((A & B) -> A) & ((A & B) -> B)"),
    ("pi[A -> B -> A](tf)", "A -> B -> A"),
    ("true + false", "(A -> B -> A) & (A -> B -> B)"),
    ("tf", "(A -> B -> A) & (A -> B -> B)"),
    ("f:(B & A) -> C x:A & B", "C"),
    ("(\\x:A. x + y:B) z:A", "A & B"),
    ("/\\X. \\x:X. x", "forall X. X -> X"),
    ("(/\\X. \\x:X. x) {A & B}", "A & B -> A & B"),
    ("pi[A](x:A + y:B)", "A"),
    ("pi[B & A](x:A + y:B + z:C)", "A & B"),
])
def test_infer(text, expected):
    assert infer(term(text)) == canon(expected)


@pytest.mark.parametrize("text, error", [
    ("pi[A](x:A)", NotAConjunctionContaining),
    ("pi[C](x:A + y:B)", NotAConjunctionContaining),
    ("pi[A & B](x:A + y:B)", NotAConjunctionContaining),
    ("x:A y:A", NotAnArrow),
    ("x:(A -> B) & C y:A", NotAnArrow),
    ("f:A -> B y:B", DomainMismatch),
    ("(f:A -> B + g:C -> B) x:A", DomainMismatch),
    ("/\\X. x:X", EscapingTypeVariable),
    ("x:A {B}", NotUniversal),
    ("((/\\X. \\x:X. x) + (/\\Y. \\y:Y. y)) {A}", NotUniversal),
])
def test_typing_errors(text, error):
    with pytest.raises(error) as excinfo:
        infer(term(text))
    assert excinfo.value.exit_code == 2
    assert excinfo.value.subterm is not None


def test_errors_carry_the_types_involved():
    with pytest.raises(DomainMismatch) as excinfo:
        infer(parse_term("f:A -> B y:B"))
    assert excinfo.value.types == (canon("A -> B"), canon("B"))
    assert "DomainMismatch" in str(excinfo.value)


def test_infer_checked_wraps_failures():
    with pytest.raises(IllTyped) as excinfo:
        type_checker.infer_checked(parse_term("pi[A](x:A)"))
    assert isinstance(excinfo.value.cause, NotAConjunctionContaining)
    assert not type_checker.is_well_typed(parse_term("pi[A](x:A)"))
    assert type_checker.is_well_typed(parse_term("x:A"))


def test_separate_checkers_agree():
    r = term("pi[A -> B -> A](tf) r:A s:B")
    assert TypeChecker(cache_size=4).infer(r) == infer(r) == canon("A")

SEEDS = range(1, 501)


@pytest.mark.parametrize("seed", SEEDS)
def test_typing_is_invariant_under_renaming(seed):
    r = gen_term(seed, 10)
    renamed = rename_binders(r)
    assert alpha_eq(r, renamed)
    assert infer(renamed) == infer(r)


@pytest.mark.parametrize("seed", SEEDS)
def test_term_substitution_preserves_type(seed):
    r = gen_term(seed, 10)
    free = sorted(free_vars(r), key=lambda v: (v.name, canonical_key(v.key[1])))
    if not free:
        return
    x = free[0]
    # a non-trivial term of x's type
    s = Proj(x.annotation, Sum(Var(TypedVar("s", x.annotation)), gen_term(seed + 1000, 4)))
    assert infer(s) == x.key[1]
    assert infer(subst_term(r, x, s)) == infer(r)


@pytest.mark.parametrize("seed", SEEDS)
def test_type_substitution_commutes_with_typing(seed):
    r = gen_term(seed, 10)
    b = gen_type(seed, 3, ("A", "B"))
    expected = canonicalize(subst_type(read_back(infer(r)), "X", b))
    assert infer(subst_type_in_term(r, "X", b)) == expected


# Declarative rules, with the equivalence rule searched for explicitly

RAW_TYPES = tuple(parse_type(t) for t in (
    "A", "B", "X", "A -> B", "A & B", "A -> A & B", "(A -> B) & (A -> A)", "forall X. X -> X",
))


def sub_multisets(primes, strict):
    top = len(primes) - 1 if strict else len(primes)
    for k in range(1, top + 1):
        for picked in combinations(range(len(primes)), k):
            yield CanonicalType(tuple(primes[i] for i in picked))


def derivable(r):
    """Every canonical type some derivation assigns to r."""
    if isinstance(r, Var):
        return {canonicalize(r.var.annotation)}
    if isinstance(r, Lam):
        return {canonicalize(Arrow(r.binder.annotation, read_back(b))) for b in derivable(r.body)}
    if isinstance(r, App):
        found = set()
        for fun in derivable(r.fun):
            codomains = [p.codomain for p in fun.primes if isinstance(p, PArrow)]
            for arg in derivable(r.arg):
                for c in sub_multisets(codomains, strict=False):
                    if canonicalize(Arrow(read_back(arg), read_back(c))) == fun:
                        found.add(canonicalize(read_back(c)))
        return found
    if isinstance(r, Sum):
        return {canonicalize(Conj(read_back(a), read_back(b))) for a in derivable(r.left) for b in derivable(r.right)}
    if isinstance(r, Proj):
        target = canonicalize(r.target)
        return {target for body in derivable(r.body) for rest in sub_multisets(body.primes, strict=True)
                if canonicalize(Conj(r.target, read_back(rest))) == body}
    if isinstance(r, TLam):
        if any(r.binder in free_type_vars(v.annotation) for v in free_vars(r.body)):
            return set()
        return {canonicalize(Forall(r.binder, read_back(b))) for b in derivable(r.body)}
    found = set()
    for fun in derivable(r.fun):
        quantified = read_back(fun)
        if isinstance(quantified, Forall):
            found.add(canonicalize(subst_type(quantified.body, quantified.binder, r.arg)))
    return found


def raw_term(rng, budget, env=()):
    """A small term that need not be well typed."""
    kinds = ["var"] + (["lam", "tlam"] if budget >= 2 else []) + (["app", "sum", "proj", "tapp"] if budget >= 3 else [])
    kind = rng.choice(kinds)
    if kind == "var":
        if env and rng.random() < 0.6:
            return Var(rng.choice(env))
        return Var(TypedVar(rng.choice("xy"), rng.choice(RAW_TYPES)))
    if kind == "lam":
        binder = TypedVar(rng.choice("xy"), rng.choice(RAW_TYPES))
        return Lam(binder, raw_term(rng, budget - 1, (binder,) + env))
    if kind == "tlam":
        return TLam(rng.choice("XY"), raw_term(rng, budget - 1, env))
    if kind == "tapp":
        return TApp(raw_term(rng, budget - 1, env), rng.choice(RAW_TYPES))
    if kind == "proj":
        return Proj(rng.choice(RAW_TYPES), raw_term(rng, budget - 1, env))
    left = rng.randint(1, budget - 2)
    right = rng.randint(1, budget - 1 - left)
    parts = raw_term(rng, left, env), raw_term(rng, right, env)
    return App(*parts) if kind == "app" else Sum(*parts)


@settings(max_examples=2000, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_inference_matches_the_declarative_rules(seed, size):
    r = raw_term(random.Random(seed), size)
    types = derivable(r)
    try:
        assert types == {infer(r)}
    except TypingError:
        assert types == set()


def test_declarative_rules_cover_projection_and_distribution():
    r = parse_term("pi[A -> B](f:(A -> B) & (A -> A)) a:A")
    assert derivable(r) == {canonicalize(TVar("B"))} == {infer(r)}
    assert derivable(parse_term("pi[A](x:A)")) == set()
    assert derivable(parse_term("f:A -> A & B a:A")) == {canon("A & B")}
