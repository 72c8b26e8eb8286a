import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.term_expr import App, Lam, Proj, Sum, TApp, TLam, TypedVar, Var, free_vars
from src.core.type_expr import Arrow, Conj, Forall, TVar
from src.errors import LexicalError, ParseError, UnboundVariableError
from src.services.syntax import parse_program, parse_term, parse_type, print_term, print_type
from src.services.term_generator import gen_term, gen_type

A, B, C, X = TVar("A"), TVar("B"), TVar("C"), TVar("X")


def v(name, t):
    return Var(TypedVar(name, t))


@pytest.mark.parametrize("text, expected", [
    ("A -> B & C", Arrow(A, Conj(B, C))),
    ("A -> B -> C", Arrow(A, Arrow(B, C))),
    ("A & B & C", Conj(Conj(A, B), C)),
    ("A & (B & C)", Conj(A, Conj(B, C))),
    ("(A -> B) -> C", Arrow(Arrow(A, B), C)),
    ("forall X. X -> X", Forall("X", Arrow(X, X))),
    ("A -> forall X. X", Arrow(A, Forall("X", X))),
    ("((A))", A),
    ("A ∧ B ⇒ C", Arrow(Conj(A, B), C)),
    ("∀X. X → X", Forall("X", Arrow(X, X))),
    ("A'", TVar("A'")),
])
def test_parse_type(text, expected):
    assert parse_type(text) == expected


@pytest.mark.parametrize("text, printed", [
    ("((A))", "A"),
    ("A -> (B -> C)", "A -> B -> C"),
    ("(A -> B) -> C", "(A -> B) -> C"),
    ("A & (B & C)", "A & (B & C)"),
    ("(A & B) & C", "A & B & C"),
    ("(A -> B) & C", "(A -> B) & C"),
    ("(forall X. X) & A", "(forall X. X) & A"),
    ("A -> (forall X. X)", "A -> forall X. X"),
])
def test_print_type(text, printed):
    assert print_type(parse_type(text)) == printed


def test_parse_term_shapes():
    x = TypedVar("x", Conj(A, B))
    assert parse_term("\\x:A&B. x") == Lam(x, Var(x))
    assert parse_term("f:A -> A -> A x:A y:A") == App(App(v("f", Arrow(A, Arrow(A, A))), v("x", A)), v("y", A))
    assert parse_term("f:A -> A x:A + y:A") == Sum(App(v("f", Arrow(A, A)), v("x", A)), v("y", A))
    assert parse_term("x:A + y:A + z:A") == Sum(Sum(v("x", A), v("y", A)), v("z", A))
    assert parse_term("pi[A](x:A + y:B)") == Proj(A, Sum(v("x", A), v("y", B)))
    assert parse_term("/\\X. \\x:X. x") == TLam("X", Lam(TypedVar("x", X), v("x", X)))
    assert parse_term("f:forall X. X {A} y:A") == App(TApp(v("f", Forall("X", X)), A), v("y", A))


def test_lambda_body_extends_right():
    assert parse_term("\\x:A. x + y:B") == Lam(TypedVar("x", A), Sum(v("x", A), v("y", B)))
    assert parse_term("y:B + \\x:A. x") == Sum(v("y", B), Lam(TypedVar("x", A), v("x", A)))


def test_unicode_aliases():
    assert parse_term("λx:A∧B. x") == parse_term("\\x:A&B. x")
    assert parse_term("ΛX. π[X](x:X + y:A)") == parse_term("/\\X. pi[X](x:X + y:A)")


def test_annotated_occurrence_binding():
    # bound when the annotation is equivalent to the binder's
    assert free_vars(parse_term("\\x:A & B. x:B & A")) == frozenset()
    assert free_vars(parse_term("\\x:A. x:B")) == {TypedVar("x", B)}


def test_nearest_binder_wins():
    r = parse_term("\\x:A. \\x:B. x")
    assert r.body.body == v("x", B)


def test_print_term():
    assert print_term(Proj(A, Sum(v("x", A), v("y", B)))) == "pi[A](x:A + y:B)"
    assert print_term(parse_term("\\x:A. x")) == "\\x:A. x"
    assert print_term(parse_term("\\x:A. x:B")) == "\\x:A. x:B"
    assert print_term(parse_term("(\\x:A. x) y:A")) == "(\\x:A. x) y:A"
    assert print_term(parse_term("f:A -> A -> A (x:A + y:A)")) == "f:A -> A -> A (x:A + y:A)"
    assert print_term(parse_term("x:A + (y:A + z:A)")) == "x:A + (y:A + z:A)"
    assert print_term(parse_term("(/\\X. \\x:X. x) {A -> A}")) == "(/\\X. \\x:X. x) {A -> A}"


def test_program_definitions_are_inlined():
    program = parse_program("""
        # booleans
        def tf = \\x:A.\\y:B.(x+y);
        pi[A->B->A](tf) r:A s:B
    """)
    assert [name for name, _ in program.definitions] == ["tf"]
    tf = program.definitions[0][1]
    assert program.main == App(App(Proj(Arrow(A, Arrow(B, A)), tf), v("r", A)), v("s", B))
    assert parse_term("pi[A->B->A](tf) r:A s:B", {"tf": tf}) == program.main


def test_program_without_main_term():
    program = parse_program("def id = \\x:A. x;\n")
    assert program.main is None
    assert len(program.definitions) == 1


def test_bound_names_shadow_definitions():
    program = parse_program("def x = y:B; \\x:A. x")
    assert program.main == Lam(TypedVar("x", A), v("x", A))


@pytest.mark.parametrize("text, error", [
    ("\\x:A. ", ParseError),
    ("x:A +", ParseError),
    ("pi[A](x:A", ParseError),
    ("x:A $ y:A", LexicalError),
    ("x", UnboundVariableError),
    ("\\x:A. y", UnboundVariableError),
])
def test_syntax_errors(text, error):
    with pytest.raises(error) as excinfo:
        parse_term(text)
    assert excinfo.value.exit_code == 3


def test_syntax_errors_report_position():
    with pytest.raises(UnboundVariableError) as excinfo:
        parse_program("def a = x:A;\n\\y:A. z")
    assert (excinfo.value.line, excinfo.value.column) == (2, 7)
    with pytest.raises(LexicalError) as excinfo:
        parse_term("x:A\n  @")
    assert excinfo.value.line == 2


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12))
def test_term_round_trip(seed, size):
    r = gen_term(seed, size)
    assert parse_term(print_term(r)) == r


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12))
def test_type_round_trip(seed, size):
    t = gen_type(seed, size, ("A", "B", "C"))
    assert parse_type(print_type(t)) == t


@pytest.mark.parametrize("source", [
    "\\pi:A. pi",
    "\\pi:A. x:A",
    "pi:A",
    "\\def:A. def",
    "\\forall:A. x:A",
])
def test_reserved_words_cannot_name_variables(source):
    with pytest.raises(ParseError):
        parse_term(source)


def test_reserved_words_cannot_name_definitions():
    with pytest.raises(ParseError) as e:
        parse_program("def pi = x:A;")
    assert e.value.exit_code == 3


def test_names_may_start_with_a_reserved_word():
    assert parse_term("\\pick:A. pick") == Lam(TypedVar("pick", TVar("A")), Var(TypedVar("pick", TVar("A"))))
