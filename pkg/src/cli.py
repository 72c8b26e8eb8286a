import argparse
import logging
import sys

from src.config import STRATEGY_NAMES, settings
from src.core.type_expr import read_back, type_equiv
from src.errors import ParseError, TypingError
from src.services.prob_evaluator import prob_evaluator
from src.services.rewriter import BETA, PI, TRUNCATED, ReductionGraph, position_of, rewriter
from src.services.syntax import parse_program, parse_type, print_term, print_type
from src.services.type_checker import type_checker
from src.templates import CHECK_RESULT, REDUCE_NOTICE, REDUCTION_GRAPH_DOT
from src.utils import read_source

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_NO, EXIT_TRUNCATED = 0, 1, 4

EDGE_RULE_NAMES = {BETA: "beta", PI: "pi"}


def _infer_located(term):
    """Canonical type of term; a TypingError is tagged with the position and text of the offending subterm."""
    try:
        return type_checker.infer(term)
    except TypingError as e:
        position = position_of(term, e.subterm) if e.subterm is not None else None
        if position is not None:
            path = ".".join(map(str, position)) or "root"
            e.location = f"{path} ({print_term(e.subterm)})"
        raise


def _load_term(source: str):
    program = parse_program(read_source(source))
    if program.main is None:
        raise ParseError("no term to evaluate: the source only holds definitions")
    _infer_located(program.main)
    return program.main


def check_command(args) -> int:
    """Print the canonical type of the term, or of every definition when there is none."""
    program = parse_program(read_source(args.source))
    if program.main is None:
        for name, term in program.definitions:
            print(f"{name} {CHECK_RESULT.format(type=print_type(read_back(_infer_located(term))))}")
        return EXIT_OK
    print(CHECK_RESULT.format(type=print_type(read_back(_infer_located(program.main)))))
    return EXIT_OK


def equiv_command(args) -> int:
    same = type_equiv(parse_type(args.left), parse_type(args.right))
    print("yes" if same else "no")
    return EXIT_OK if same else EXIT_NO


def reduce_command(args) -> int:
    term = _load_term(args.source)
    if args.all:
        forms, status = rewriter.normal_forms(term, args.max_steps)
        for nf in forms:
            print(nf)
    else:
        nf, status, branched = rewriter.reduce_first(term, args.max_steps)
        print(nf)
        if branched:
            print(REDUCE_NOTICE, file=sys.stderr)
    if status == TRUNCATED:
        print(f"Truncated: step budget {args.max_steps} exhausted", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def dist_command(args) -> int:
    dist = prob_evaluator.distribution(_load_term(args.source), args.strategy, args.max_steps)
    print(dist.to_text())
    if dist.truncated:
        print(f"Truncated: step budget {args.max_steps} exhausted", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def render_dot(graph: ReductionGraph) -> str:
    ids = {node: i for i, node in enumerate(graph.nodes)}
    nodes = [
        {"id": i, "label": str(node), "root": node == graph.root,
         "status": graph.status(node), "stuck": graph.is_stuck(node)}
        for node, i in ids.items()
    ]
    edges = []
    for source, label, target in graph.edges:
        name = EDGE_RULE_NAMES.get(label.rule, "tbeta")
        if label.rule == PI:
            name = f"{name} {graph.probability(source, target)}"
        edges.append({"source": ids[source], "target": ids[target], "label": name})
    return REDUCTION_GRAPH_DOT.render(nodes=nodes, edges=edges)


def graph_command(args) -> int:
    graph = rewriter.build_graph(_load_term(args.source), args.max_nodes, args.strategy)
    sys.stdout.write(render_dot(graph))
    if graph.truncated:
        print(f"Truncated: node budget {args.max_nodes} reached", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def compare_command(args) -> int:
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    unknown = [s for s in strategies if s not in STRATEGY_NAMES]
    if unknown:
        raise ParseError(f"unknown strategies: {', '.join(unknown)}")
    report = prob_evaluator.compare_strategies(_load_term(args.source), strategies, args.max_steps)
    print(report.to_text())
    return EXIT_OK if report.agree else EXIT_NO


def setup_commands(subparsers):
    """Registers command handlers to the parser."""
    check = subparsers.add_parser("check", help="print the canonical type of a term")
    check.add_argument("source", help=f"{settings.SOURCE_EXTENSION} file or inline program")
    check.set_defaults(handler=check_command)

    equiv = subparsers.add_parser("equiv", help="decide type equivalence")
    equiv.add_argument("left")
    equiv.add_argument("right")
    equiv.set_defaults(handler=equiv_command)

    reduce = subparsers.add_parser("reduce", help="reduce a term to normal form")
    reduce.add_argument("source")
    reduce.add_argument("--max-steps", type=int, default=settings.MAX_STEPS)
    reduce.add_argument("--all", action="store_true", help="print every reachable normal form")
    reduce.set_defaults(handler=reduce_command)

    dist = subparsers.add_parser("dist", help="exact distribution over normal forms")
    dist.add_argument("source")
    dist.add_argument("--strategy", choices=STRATEGY_NAMES, default=settings.DEFAULT_STRATEGY)
    dist.add_argument("--max-steps", type=int, default=settings.MAX_STEPS)
    dist.set_defaults(handler=dist_command)

    graph = subparsers.add_parser("graph", help="reduction graph in DOT")
    graph.add_argument("source")
    graph.add_argument("--max-nodes", type=int, default=settings.MAX_NODES)
    graph.add_argument("--strategy", choices=STRATEGY_NAMES + ("all",), default=settings.DEFAULT_STRATEGY)
    graph.set_defaults(handler=graph_command)

    compare = subparsers.add_parser("compare", help="compare distributions across strategies")
    compare.add_argument("source")
    compare.add_argument("--strategies", default=",".join(STRATEGY_NAMES))
    compare.add_argument("--max-steps", type=int, default=settings.MAX_STEPS)
    compare.set_defaults(handler=compare_command)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpl", description="Typed lambda calculus with non-deterministic projection")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    subparsers = parser.add_subparsers(dest="command", required=True)
    setup_commands(subparsers)
    return parser
