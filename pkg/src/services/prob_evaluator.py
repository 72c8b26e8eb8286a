"""Exact outcome distributions of the projection choices, under a fixed strategy."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

import networkx as nx

from src.config import settings
from src.core.term_expr import TermExpr
from src.services.rewriter import BUDGET_TRUNCATED, NORMAL_FORM, Rewriter, ReductionGraph, StructuralNF, rewriter

logger = logging.getLogger(__name__)


@dataclass
class Distribution:
    outcomes: Dict[StructuralNF, Fraction] = field(default_factory=dict)
    # mass of paths cut by the budget, ending in a stuck projection, or caught in a cycle
    residual: Fraction = Fraction(0)
    truncated: bool = False

    def __getitem__(self, nf: StructuralNF) -> Fraction:
        return self.outcomes.get(nf, Fraction(0))

    @property
    def total(self) -> Fraction:
        return sum(self.outcomes.values(), Fraction(0)) + self.residual

    def items(self) -> List[Tuple[StructuralNF, Fraction]]:
        return sorted(self.outcomes.items(), key=lambda item: item[0].key)

    def to_text(self) -> str:
        lines = [f"{p}\t{nf}" for nf, p in self.items()]
        lines.append(f"residual\t{self.residual}")
        return "\n".join(lines)


@dataclass
class StrategyReport:
    distributions: Dict[str, Distribution]
    # (strategy, strategy, outcome or "residual", first probability, second probability)
    disagreements: List[Tuple[str, str, str, Fraction, Fraction]] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return not self.disagreements

    def to_text(self) -> str:
        if self.agree:
            return f"agree: {', '.join(self.distributions)}"
        return "\n".join(f"differ: {a} vs {b} on {what}: {p} vs {q}" for a, b, what, p, q in self.disagreements)


class ProbEvaluator:
    def __init__(self, rw: Rewriter = None):
        self.rewriter = rw or rewriter

    def distribution(self, r: TermExpr, strategy: str = None, max_steps: int = None) -> Distribution:
        strategy = strategy or settings.DEFAULT_STRATEGY
        max_steps = settings.MAX_STEPS if max_steps is None else max_steps
        root = self.rewriter.structural_normalize(r)
        graph = self.rewriter.explore(root, strategy, max_steps=max_steps)
        return self.distribution_of_graph(graph)

    def distribution_of_graph(self, graph: ReductionGraph) -> Distribution:
        g = graph.graph
        cyclic = set()
        for component in nx.strongly_connected_components(g):
            if len(component) > 1 or any(g.has_edge(n, n) for n in component):
                cyclic |= component
        if cyclic:
            logger.warning(f"{len(cyclic)} terms lie on reduction cycles; their mass goes to the residual")

        # each node maps to (outcomes, residual), computed successors first
        mass: Dict[StructuralNF, Tuple[Dict[StructuralNF, Fraction], Fraction]] = {}
        condensed = nx.condensation(g)
        for component in reversed(list(nx.topological_sort(condensed))):
            for node in condensed.nodes[component]["members"]:
                mass[node] = self._node_mass(graph, node, node in cyclic, mass)

        outcomes, residual = mass[graph.root]
        return Distribution({nf: p for nf, p in outcomes.items() if p}, residual, graph.truncated)

    def _node_mass(self, graph: ReductionGraph, node: StructuralNF, cyclic: bool, mass):
        status = graph.status(node)
        if cyclic or status == BUDGET_TRUNCATED:
            return {}, Fraction(1)
        if status == NORMAL_FORM:
            if graph.is_stuck(node):
                return {}, Fraction(1)
            return {node: Fraction(1)}, Fraction(0)
        outcomes: Dict[StructuralNF, Fraction] = {}
        residual = Fraction(0)
        for target in graph.graph.successors(node):
            p = graph.probability(node, target)
            sub_outcomes, sub_residual = mass[target]
            for nf, q in sub_outcomes.items():
                outcomes[nf] = outcomes.get(nf, Fraction(0)) + p * q
            residual += p * sub_residual
        return outcomes, residual

    def compare_strategies(self, r: TermExpr, strategies: Sequence[str] = ("lo", "in"),
                           max_steps: int = None) -> StrategyReport:
        report = StrategyReport({s: self.distribution(r, s, max_steps) for s in strategies})
        for a, b in combinations(strategies, 2):
            da, db = report.distributions[a], report.distributions[b]
            for nf in sorted(set(da.outcomes) | set(db.outcomes)):
                if da[nf] != db[nf]:
                    report.disagreements.append((a, b, str(nf), da[nf], db[nf]))
            if da.residual != db.residual:
                report.disagreements.append((a, b, "residual", da.residual, db.residual))
        if not report.agree:
            logger.info(f"Strategies disagree in {len(report.disagreements)} places")
        return report


prob_evaluator = ProbEvaluator()


def distribution(r: TermExpr, strategy: str = None, max_steps: int = None) -> Distribution:
    return prob_evaluator.distribution(r, strategy, max_steps)


def compare_strategies(r: TermExpr, strategies: Sequence[str] = ("lo", "in"), max_steps: int = None) -> StrategyReport:
    return prob_evaluator.compare_strategies(r, strategies, max_steps)
