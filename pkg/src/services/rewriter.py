"""
Structural congruence, one-step reduction and reduction graphs.

Congruence is decided by rewriting to a representative: sums float out of
lambda bodies and application heads, a projection at the head of an
application absorbs the argument, and sums are flattened into a sorted
multiset of summands. Reduction (beta, type beta and projection choice) is
then explored on those representatives.
"""
import logging
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb, prod
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from src.config import settings
from src.core.term_expr import (
    App,
    Lam,
    Proj,
    Sum,
    TApp,
    TermExpr,
    TLam,
    TypedVar,
    Var,
    subst_term,
    subst_type_in_term,
    term_key,
)
from src.core.type_expr import CanonicalType, canonicalize, factor_arrow, read_back
from src.services.syntax import print_term
from src.services.type_checker import TypeChecker, type_checker

logger = logging.getLogger(__name__)

BETA, TYPE_BETA, PI = "Beta", "TypeBeta", "Pi"

# node statuses
NORMAL_FORM, EXPANDED, BUDGET_TRUNCATED = "NormalForm", "Expanded", "BudgetTruncated"

COMPLETE, TRUNCATED = "Complete", "Truncated"

STRATEGIES = ("lo", "in")


def join_sum(summands: Sequence[TermExpr]) -> TermExpr:
    """Right-nested sum of `summands`, in the given order."""
    result = summands[-1]
    for s in reversed(summands[:-1]):
        result = Sum(s, result)
    return result


def flatten_sum(r: TermExpr) -> List[TermExpr]:
    if isinstance(r, Sum):
        return flatten_sum(r.left) + flatten_sum(r.right)
    return [r]


@dataclass(frozen=True, eq=False)
class StructuralNF:
    """Representative of a congruence class: sorted summands, none of them a Sum."""

    summands: Tuple[TermExpr, ...]

    @cached_property
    def key(self) -> tuple:
        return tuple(term_key(s) for s in self.summands)

    @cached_property
    def term(self) -> TermExpr:
        return join_sum(self.summands)

    def __eq__(self, other):
        return isinstance(other, StructuralNF) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return print_term(self.term)


@dataclass(frozen=True)
class StepLabel:
    rule: str
    position: Tuple[int, ...]
    choice: Optional[Tuple[TermExpr, ...]] = None


@dataclass(frozen=True)
class Redex:
    rule: str
    position: Tuple[int, ...]
    # for Pi: the candidate sub-multisets and how many summand selections realise each
    choices: Tuple[Tuple[TermExpr, ...], ...] = ()
    multiplicities: Tuple[int, ...] = ()


class Step(NamedTuple):
    label: StepLabel
    probability: Fraction
    target: StructuralNF


class NormalFormsResult(NamedTuple):
    forms: Tuple[StructuralNF, ...]
    status: str


class ReductionGraph:
    """Explored reduction graph over StructuralNF nodes, kept in a networkx DiGraph."""

    def __init__(self, root: StructuralNF, strategy: str):
        self.root = root
        self.strategy = strategy
        self.graph = nx.DiGraph()
        self.graph.add_node(root, status=EXPANDED, stuck=False, order=0)

    @property
    def nodes(self) -> List[StructuralNF]:
        return sorted(self.graph.nodes, key=lambda n: self.graph.nodes[n]["order"])

    @property
    def edges(self) -> List[Tuple[StructuralNF, StepLabel, StructuralNF]]:
        result = []
        for source in self.nodes:
            for target in sorted(self.graph.successors(source), key=lambda n: self.graph.nodes[n]["order"]):
                result.append((source, self.graph.edges[source, target]["labels"][0], target))
        return result

    def status(self, node: StructuralNF) -> str:
        return self.graph.nodes[node]["status"]

    def is_stuck(self, node: StructuralNF) -> bool:
        return self.graph.nodes[node]["stuck"]

    def probability(self, source: StructuralNF, target: StructuralNF) -> Fraction:
        return self.graph.edges[source, target]["probability"]

    @property
    def truncated(self) -> bool:
        return any(self.status(n) == BUDGET_TRUNCATED for n in self.graph.nodes)

    def add_node(self, node: StructuralNF):
        self.graph.add_node(node, status=EXPANDED, stuck=False, order=self.graph.number_of_nodes())

    def add_edge(self, step: Step, source: StructuralNF):
        if self.graph.has_edge(source, step.target):
            data = self.graph.edges[source, step.target]
            data["labels"].append(step.label)
            data["probability"] += step.probability
        else:
            self.graph.add_edge(source, step.target, labels=[step.label], probability=step.probability)


# Positions

def _children(r: TermExpr) -> Tuple[TermExpr, ...]:
    if isinstance(r, App):
        return (r.fun, r.arg)
    if isinstance(r, Sum):
        return (r.left, r.right)
    if isinstance(r, TApp):
        return (r.fun,)
    if isinstance(r, Var):
        return ()
    return (r.body,)


def subterm_at(r: TermExpr, position: Sequence[int]) -> TermExpr:
    for i in position:
        r = _children(r)[i]
    return r


def position_of(r: TermExpr, target: TermExpr) -> Optional[Tuple[int, ...]]:
    """Pre-order position of `target` in r, matched by identity first and then by equality."""
    for same in (lambda u: u is target, lambda u: u == target):
        stack = [((), r)]
        while stack:
            position, u = stack.pop()
            if same(u):
                return position
            children = _children(u)
            stack.extend((position + (i,), c) for i, c in reversed(list(enumerate(children))))
    return None


def replace_at(r: TermExpr, position: Sequence[int], new: TermExpr) -> TermExpr:
    if not position:
        return new
    i, rest = position[0], position[1:]
    if isinstance(r, App):
        return App(replace_at(r.fun, rest, new), r.arg) if i == 0 else App(r.fun, replace_at(r.arg, rest, new))
    if isinstance(r, Sum):
        return Sum(replace_at(r.left, rest, new), r.right) if i == 0 else Sum(r.left, replace_at(r.right, rest, new))
    if isinstance(r, TApp):
        return TApp(replace_at(r.fun, rest, new), r.arg)
    if isinstance(r, Lam):
        return Lam(r.binder, replace_at(r.body, rest, new))
    if isinstance(r, TLam):
        return TLam(r.binder, replace_at(r.body, rest, new))
    if isinstance(r, Proj):
        return Proj(r.target, replace_at(r.body, rest, new))
    raise IndexError(f"no subterm at {tuple(position)}")


class Rewriter:
    def __init__(self, checker: TypeChecker = None, weighting: str = None):
        self.checker = checker or type_checker
        self.weighting = weighting or settings.PI_WEIGHTING

    # Structural congruence

    def structural_normalize(self, r: TermExpr) -> StructuralNF:
        self.checker.infer_checked(r)
        return StructuralNF(tuple(self._norm(r, (), ())))

    def normalize_with_stats(self, r: TermExpr) -> Tuple[StructuralNF, int]:
        """Representative of r and the number of oriented rule applications it took."""
        self.checker.infer_checked(r)
        counts = Counter()
        nf = StructuralNF(tuple(self._norm(r, (), (), counts)))
        return nf, counts["rules"]

    def _sorted(self, summands: List[TermExpr], venv, tenv) -> List[TermExpr]:
        return sorted(summands, key=lambda s: term_key(s, venv, tenv))

    def _norm(self, r: TermExpr, venv: Tuple[TypedVar, ...], tenv: Tuple[str, ...],
              counts: Counter = None) -> List[TermExpr]:
        if counts is None:
            counts = Counter()
        if isinstance(r, Var):
            return [r]
        if isinstance(r, Sum):
            return self._sorted(self._norm(r.left, venv, tenv, counts) + self._norm(r.right, venv, tenv, counts), venv, tenv)
        if isinstance(r, Lam):
            bodies = self._norm(r.body, (r.binder,) + venv, tenv, counts)
            if len(bodies) > 1:
                counts["rules"] += len(bodies) - 1
            return self._sorted([Lam(r.binder, b) for b in bodies], venv, tenv)
        if isinstance(r, App):
            heads = self._norm(r.fun, venv, tenv, counts)
            arg = join_sum(self._norm(r.arg, venv, tenv, counts))
            if len(heads) > 1:
                counts["rules"] += len(heads) - 1
            result = []
            for head in heads:
                result.extend(self._apply(head, arg, venv, tenv, counts))
            return self._sorted(result, venv, tenv)
        if isinstance(r, Proj):
            return [Proj(r.target, join_sum(self._norm(r.body, venv, tenv, counts)))]
        if isinstance(r, TLam):
            return [TLam(r.binder, join_sum(self._norm(r.body, venv, (r.binder,) + tenv, counts)))]
        if isinstance(r, TApp):
            return [TApp(join_sum(self._norm(r.fun, venv, tenv, counts)), r.arg)]
        raise TypeError(f"not a term: {r!r}")

    def _apply(self, head: TermExpr, arg: TermExpr, venv, tenv, counts: Counter) -> List[TermExpr]:
        """Summands of `head arg` for an already normalized, sum-free head."""
        if isinstance(head, Proj):
            domain = self.checker.infer(arg)
            narrowed = factor_arrow(canonicalize(head.target), domain)
            if narrowed is not None and factor_arrow(self.checker.infer(head.body), domain) is not None:
                counts["rules"] += 1
                body = []
                for inner in flatten_sum(head.body):
                    body.extend(self._apply(inner, arg, venv, tenv, counts))
                body = self._sorted(body, venv, tenv)
                return [Proj(read_back(narrowed), join_sum(body))]
        return [App(head, arg)]

    # Projection candidates

    def pi_choices(self, target: CanonicalType, summands: Sequence[TermExpr],
                   venv=(), tenv=()) -> List[Tuple[Tuple[TermExpr, ...], int]]:
        """Distinct proper sub-multisets typed `target`, each with the number of selections realising it."""
        groups: Dict[tuple, List[TermExpr]] = {}
        for s in summands:
            groups.setdefault(term_key(s, venv, tenv), []).append(s)
        keys = sorted(groups)
        types = [Counter(self.checker.infer(groups[k][0]).primes) for k in keys]
        wanted = Counter(target.primes)
        total = len(summands)
        found = []

        def search(i: int, counts: List[int], have: Counter):
            if i == len(keys):
                chosen = sum(counts)
                if have == wanted and 0 < chosen < total:
                    picked = tuple(s for k, n in zip(keys, counts) for s in groups[k][:n])
                    weight = prod(comb(len(groups[k]), n) for k, n in zip(keys, counts))
                    found.append((picked, weight))
                return
            for n in range(len(groups[keys[i]]) + 1):
                grown = have.copy()
                for _ in range(n):
                    grown.update(types[i])
                if any(grown[p] > wanted[p] for p in grown):
                    break
                search(i + 1, counts + [n], grown)

        search(0, [], Counter())
        found.sort(key=lambda item: tuple(term_key(s, venv, tenv) for s in item[0]))
        return found

    def pi_candidates(self, target: CanonicalType, summands: Sequence[TermExpr],
                      venv=(), tenv=()) -> List[Tuple[TermExpr, ...]]:
        return [choice for choice, _ in self.pi_choices(target, summands, venv, tenv)]

    # Redexes and steps

    def find_redexes(self, nf: StructuralNF, order: str = "lo") -> List[Redex]:
        """Redexes of nf: 'lo' lists them outermost first, 'in' innermost first, both left to right."""
        if order not in STRATEGIES:
            raise ValueError(f"unknown redex order {order!r}")
        return list(self._redexes(nf.term, (), (), (), order == "in"))

    def _redexes(self, r: TermExpr, position, venv, tenv, innermost: bool) -> Iterator[Redex]:
        here = self._redex_here(r, position, venv, tenv)
        if here is not None and not innermost:
            yield here
        if isinstance(r, Lam):
            inner = [(r.body, (r.binder,) + venv, tenv)]
        elif isinstance(r, TLam):
            inner = [(r.body, venv, (r.binder,) + tenv)]
        else:
            inner = [(child, venv, tenv) for child in _children(r)]
        for i, (child, cvenv, ctenv) in enumerate(inner):
            yield from self._redexes(child, position + (i,), cvenv, ctenv, innermost)
        if here is not None and innermost:
            yield here

    def _redex_here(self, r: TermExpr, position, venv, tenv) -> Optional[Redex]:
        if isinstance(r, App) and isinstance(r.fun, Lam):
            return Redex(BETA, position)
        if isinstance(r, TApp) and isinstance(r.fun, TLam):
            return Redex(TYPE_BETA, position)
        if isinstance(r, Proj) and isinstance(r.body, Sum):
            choices = self.pi_choices(canonicalize(r.target), flatten_sum(r.body), venv, tenv)
            if choices:
                return Redex(PI, position, tuple(c for c, _ in choices), tuple(w for _, w in choices))
        return None

    def fire(self, nf: StructuralNF, redex: Redex) -> List[Step]:
        """Successors of nf through one redex; Pi branches carry their choice probability."""
        term = nf.term
        r = subterm_at(term, redex.position)
        if redex.rule == BETA:
            contractum = subst_term(r.fun.body, r.fun.binder, r.arg)
            return [Step(StepLabel(BETA, redex.position), Fraction(1), self._renormalize(term, redex.position, contractum))]
        if redex.rule == TYPE_BETA:
            contractum = subst_type_in_term(r.fun.body, r.fun.binder, r.arg)
            return [Step(StepLabel(TYPE_BETA, redex.position), Fraction(1), self._renormalize(term, redex.position, contractum))]
        weights = redex.multiplicities if self.weighting == "multiplicity" else (1,) * len(redex.choices)
        total = sum(weights)
        return [
            Step(StepLabel(PI, redex.position, choice), Fraction(w, total),
                 self._renormalize(term, redex.position, join_sum(choice)))
            for choice, w in zip(redex.choices, weights)
        ]

    def _renormalize(self, term: TermExpr, position, contractum: TermExpr) -> StructuralNF:
        return StructuralNF(tuple(self._norm(replace_at(term, position, contractum), (), ())))

    def enumerate_steps(self, nf: StructuralNF) -> List[Tuple[StepLabel, StructuralNF]]:
        """All one-step successors under any context, deduplicated, first label kept."""
        seen = set()
        result = []
        for redex in self.find_redexes(nf, "lo"):
            for step in self.fire(nf, redex):
                if step.target not in seen:
                    seen.add(step.target)
                    result.append((step.label, step.target))
        return result

    def strategy_steps(self, nf: StructuralNF, strategy: str = "lo") -> List[Step]:
        """The weighted successors taken by a strategy: its first redex, every choice there."""
        redexes = self.find_redexes(nf, strategy)
        if not redexes:
            return []
        merged: Dict[StructuralNF, Step] = {}
        for step in self.fire(nf, redexes[0]):
            if step.target in merged:
                prev = merged[step.target]
                merged[step.target] = Step(prev.label, prev.probability + step.probability, prev.target)
            else:
                merged[step.target] = step
        return list(merged.values())

    def _all_steps(self, nf: StructuralNF) -> List[Step]:
        steps = []
        for redex in self.find_redexes(nf, "lo"):
            steps.extend(self.fire(nf, redex))
        return steps

    # Exploration

    def normal_forms(self, r: TermExpr, max_steps: int = None) -> NormalFormsResult:
        """Breadth-first closure of enumerate_steps; the budget counts expanded terms."""
        max_steps = settings.MAX_STEPS if max_steps is None else max_steps
        root = self.structural_normalize(r)
        seen = {root}
        queue = deque([root])
        forms = []
        expanded = 0
        status = COMPLETE
        while queue:
            node = queue.popleft()
            if not self.find_redexes(node):
                forms.append(node)
                continue
            if expanded >= max_steps:
                status = TRUNCATED
                logger.warning(f"Step budget {max_steps} exhausted with {len(queue) + 1} terms unexplored")
                break
            expanded += 1
            for _, target in self.enumerate_steps(node):
                if target not in seen:
                    seen.add(target)
                    queue.append(target)
        logger.debug(f"normal_forms: {len(forms)} forms, {expanded} expansions, {status}")
        return NormalFormsResult(tuple(sorted(forms)), status)

    def build_graph(self, r: TermExpr, max_nodes: int = None, strategy: str = None) -> ReductionGraph:
        """Reduction graph following a strategy ('lo', 'in') or every redex ('all')."""
        max_nodes = settings.MAX_NODES if max_nodes is None else max_nodes
        strategy = strategy or settings.DEFAULT_STRATEGY
        return self.explore(self.structural_normalize(r), strategy, max_nodes=max_nodes)

    def explore(self, root: StructuralNF, strategy: str, max_nodes: int = None,
                max_steps: int = None) -> ReductionGraph:
        if strategy not in STRATEGIES + ("all",):
            raise ValueError(f"unknown strategy {strategy!r}")
        graph = ReductionGraph(root, strategy)
        queue = deque([root])
        expanded = 0
        while queue:
            node = queue.popleft()
            if not self.find_redexes(node):
                graph.graph.nodes[node].update(status=NORMAL_FORM, stuck=_has_projection(node.term))
                continue
            if max_steps is not None and expanded >= max_steps:
                graph.graph.nodes[node]["status"] = BUDGET_TRUNCATED
                continue
            steps = self._all_steps(node) if strategy == "all" else self.strategy_steps(node, strategy)
            fresh = {s.target for s in steps if s.target not in graph.graph}
            if max_nodes is not None and graph.graph.number_of_nodes() + len(fresh) > max_nodes:
                graph.graph.nodes[node]["status"] = BUDGET_TRUNCATED
                continue
            expanded += 1
            for step in steps:
                if step.target not in graph.graph:
                    graph.add_node(step.target)
                    queue.append(step.target)
                graph.add_edge(step, node)
        if graph.truncated:
            logger.warning(f"Reduction graph truncated at {graph.graph.number_of_nodes()} nodes")
        logger.debug(f"Explored {graph.graph.number_of_nodes()} nodes, "
                     f"{graph.graph.number_of_edges()} edges with strategy {strategy}")
        return graph

    def reduce_first(self, r: TermExpr, max_steps: int = None) -> Tuple[StructuralNF, str, bool]:
        """
        One normal form by leftmost-outermost reduction, taking the first candidate
        at every projection. Also reports whether some projection had other candidates.
        """
        max_steps = settings.MAX_STEPS if max_steps is None else max_steps
        node = self.structural_normalize(r)
        branched = False
        for _ in range(max_steps):
            redexes = self.find_redexes(node, "lo")
            if not redexes:
                return node, COMPLETE, branched
            steps = self.fire(node, redexes[0])
            branched = branched or len(steps) > 1
            node = steps[0].target
        status = COMPLETE if not self.find_redexes(node, "lo") else TRUNCATED
        return node, status, branched


def _has_projection(r: TermExpr) -> bool:
    return isinstance(r, Proj) or any(_has_projection(c) for c in _children(r))


rewriter = Rewriter()


def structural_normalize(r: TermExpr) -> StructuralNF:
    return rewriter.structural_normalize(r)


def normalize_with_stats(r: TermExpr) -> Tuple[StructuralNF, int]:
    return rewriter.normalize_with_stats(r)


def pi_candidates(target: CanonicalType, summands: Sequence[TermExpr]) -> List[Tuple[TermExpr, ...]]:
    return rewriter.pi_candidates(target, summands)


def find_redexes(nf: StructuralNF, order: str = "lo") -> List[Redex]:
    return rewriter.find_redexes(nf, order)


def enumerate_steps(nf: StructuralNF) -> List[Tuple[StepLabel, StructuralNF]]:
    return rewriter.enumerate_steps(nf)


def strategy_steps(nf: StructuralNF, strategy: str = "lo") -> List[Step]:
    return rewriter.strategy_steps(nf, strategy)


def normal_forms(r: TermExpr, max_steps: int = None) -> NormalFormsResult:
    return rewriter.normal_forms(r, max_steps)


def build_graph(r: TermExpr, max_nodes: int = None, strategy: str = None) -> ReductionGraph:
    return rewriter.build_graph(r, max_nodes, strategy)
