"""
Types of the calculus and their canonical forms.

Two types are equivalent when they are related by commutativity and
associativity of `&` and by distributivity of `->` over a conjunctive
codomain. A canonical form distributes every arrow over its codomain,
flattens conjunctions into a sorted multiset of primes, and replaces
`forall` binders by de Bruijn indices, so equivalence becomes equality.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Optional, Sequence, Tuple, Union


# Surface syntax

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class Arrow:
    domain: "TypeExpr"
    codomain: "TypeExpr"


@dataclass(frozen=True)
class Conj:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class Forall:
    binder: str
    body: "TypeExpr"


TypeExpr = Union[TVar, Arrow, Conj, Forall]


# Canonical forms

@dataclass(frozen=True)
class PVar:
    """A free type variable (`name`) or a bound one (`index`, de Bruijn)."""
    name: Optional[str] = None
    index: Optional[int] = None


@dataclass(frozen=True)
class PArrow:
    domain: "CanonicalType"
    codomain: "PrimeType"


@dataclass(frozen=True)
class PForall:
    body: "CanonicalType"


PrimeType = Union[PVar, PArrow, PForall]


@dataclass(frozen=True)
class CanonicalType:
    primes: Tuple[PrimeType, ...]

    def __post_init__(self):
        if not self.primes:
            raise ValueError("a canonical type holds at least one prime")

    def __len__(self):
        return len(self.primes)


@lru_cache(maxsize=65536)
def prime_key(p: PrimeType) -> tuple:
    """Sort key realising the total order: PVar < PArrow < PForall, indices before names."""
    if isinstance(p, PVar):
        if p.index is not None:
            return (0, (0, p.index))
        return (0, (1, p.name))
    if isinstance(p, PArrow):
        return (1, (canonical_key(p.domain), prime_key(p.codomain)))
    return (2, canonical_key(p.body))


def canonical_key(c: CanonicalType) -> tuple:
    return tuple(prime_key(p) for p in c.primes)


def compare_canonical(a: Union[CanonicalType, PrimeType], b: Union[CanonicalType, PrimeType]) -> int:
    """Three-way comparison: -1, 0 or 1."""
    ka = canonical_key(a) if isinstance(a, CanonicalType) else prime_key(a)
    kb = canonical_key(b) if isinstance(b, CanonicalType) else prime_key(b)
    return (ka > kb) - (ka < kb)


def _sorted_primes(primes: Sequence[PrimeType]) -> Tuple[PrimeType, ...]:
    return tuple(sorted(primes, key=prime_key))


def canonicalize(t: TypeExpr, bound: Tuple[str, ...] = ()) -> CanonicalType:
    """
    Canonical form of `t`. `bound` lists enclosing binder names, innermost first;
    occurrences of those names become de Bruijn indices.
    """
    return CanonicalType(_sorted_primes(_primes_of(t, bound)))


def _primes_of(t: TypeExpr, bound: Tuple[str, ...]) -> list:
    if isinstance(t, TVar):
        if t.name in bound:
            return [PVar(index=bound.index(t.name))]
        return [PVar(name=t.name)]
    if isinstance(t, Conj):
        return _primes_of(t.left, bound) + _primes_of(t.right, bound)
    if isinstance(t, Arrow):
        domain = canonicalize(t.domain, bound)
        return [PArrow(domain, p) for p in _primes_of(t.codomain, bound)]
    if isinstance(t, Forall):
        return [PForall(canonicalize(t.body, (t.binder,) + bound))]
    raise TypeError(f"not a type expression: {t!r}")


def type_equiv(a: TypeExpr, b: TypeExpr) -> bool:
    return canonicalize(a) == canonicalize(b)


def conj_union(a: CanonicalType, b: CanonicalType) -> CanonicalType:
    return CanonicalType(_sorted_primes(a.primes + b.primes))


def factor_arrow(c: CanonicalType, dom: CanonicalType) -> Optional[CanonicalType]:
    """The B with c equivalent to dom -> B, when every prime of c is an arrow out of dom."""
    codomains = []
    for p in c.primes:
        if not isinstance(p, PArrow) or p.domain != dom:
            return None
        codomains.append(p.codomain)
    return CanonicalType(_sorted_primes(codomains))


def conj_remainder(c: CanonicalType, a: CanonicalType) -> Optional[CanonicalType]:
    """The non-empty B with c equivalent to a & B, if a is a strict sub-multiset of c."""
    if len(a) >= len(c):
        return None
    remaining = Counter(c.primes)
    remaining.subtract(Counter(a.primes))
    if any(n < 0 for n in remaining.values()):
        return None
    rest = []
    for p in c.primes:
        if remaining[p] > 0:
            rest.append(p)
            remaining[p] -= 1
    return CanonicalType(tuple(rest))


# Free variables and substitution

def free_type_vars(t: TypeExpr) -> FrozenSet[str]:
    if isinstance(t, TVar):
        return frozenset({t.name})
    if isinstance(t, Arrow):
        return free_type_vars(t.domain) | free_type_vars(t.codomain)
    if isinstance(t, Conj):
        return free_type_vars(t.left) | free_type_vars(t.right)
    return free_type_vars(t.body) - {t.binder}


def fresh_type_name(base: str, avoid) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def subst_type(a: TypeExpr, x: str, b: TypeExpr) -> TypeExpr:
    """Capture-avoiding a[b/x]."""
    if isinstance(a, TVar):
        return b if a.name == x else a
    if isinstance(a, Arrow):
        return Arrow(subst_type(a.domain, x, b), subst_type(a.codomain, x, b))
    if isinstance(a, Conj):
        return Conj(subst_type(a.left, x, b), subst_type(a.right, x, b))
    if a.binder == x or x not in free_type_vars(a.body):
        return a
    binder, body = a.binder, a.body
    fv_b = free_type_vars(b)
    if binder in fv_b:
        binder = fresh_type_name(binder, fv_b | free_type_vars(body) | {x})
        body = subst_type(body, a.binder, TVar(binder))
    return Forall(binder, subst_type(body, x, b))


# Read-back

_BINDER_NAMES = ("X", "Y", "Z", "W")


def _free_names(c: CanonicalType, acc: set) -> set:
    for p in c.primes:
        _free_names_prime(p, acc)
    return acc


def _free_names_prime(p: PrimeType, acc: set):
    if isinstance(p, PVar):
        if p.name is not None:
            acc.add(p.name)
    elif isinstance(p, PArrow):
        _free_names(p.domain, acc)
        _free_names_prime(p.codomain, acc)
    else:
        _free_names(p.body, acc)


def _binder_name(avoid) -> str:
    for name in _BINDER_NAMES:
        if name not in avoid:
            return name
    n = 1
    while f"X{n}" in avoid:
        n += 1
    return f"X{n}"


def read_back(c: CanonicalType, env: Tuple[str, ...] = ()) -> TypeExpr:
    """A type whose canonical form is `c`: primes in sorted order, right-nested under `&`."""
    avoid = _free_names(c, set()) | set(env)
    return _read_back(c, env, avoid)


def read_back_prime(p: PrimeType, env: Tuple[str, ...] = ()) -> TypeExpr:
    avoid = set(env)
    _free_names_prime(p, avoid)
    return _read_back_prime(p, env, avoid)


def _read_back(c: CanonicalType, env, avoid) -> TypeExpr:
    parts = [_read_back_prime(p, env, avoid) for p in c.primes]
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Conj(part, result)
    return result


def _read_back_prime(p: PrimeType, env, avoid) -> TypeExpr:
    if isinstance(p, PVar):
        if p.index is None:
            return TVar(p.name)
        if p.index >= len(env):
            raise ValueError(f"dangling de Bruijn index {p.index}")
        return TVar(env[p.index])
    if isinstance(p, PArrow):
        return Arrow(_read_back(p.domain, env, avoid), _read_back_prime(p.codomain, env, avoid))
    name = _binder_name(avoid)
    return Forall(name, _read_back(p.body, (name,) + env, avoid | {name}))


def type_size(t: TypeExpr) -> int:
    if isinstance(t, TVar):
        return 1
    if isinstance(t, Arrow):
        return 1 + type_size(t.domain) + type_size(t.codomain)
    if isinstance(t, Conj):
        return 1 + type_size(t.left) + type_size(t.right)
    return 1 + type_size(t.body)


