import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinor_forge.dsl import (
    Add,
    ArityError,
    Call,
    Coord,
    Div,
    DomainError,
    ExpressionError,
    MetricSpec,
    Mul,
    Neg,
    Num,
    ParseError,
    Pow,
    SignatureViolation,
    Sub,
    UnknownIdentifierError,
    coordinate_table,
    evaluate,
    metric_signature,
    parse,
    to_source,
)

R = Coord(1)
TH = Coord(2)


def test_parse_examples():
    assert parse("1 - 2/r") == Sub(Num(1.0), Div(Num(2.0), R))
    assert parse("-(r^2)") == Neg(Pow(R, Num(2.0)))
    assert parse("sin(th)^2 * r^2") == Mul(Pow(Call("sin", TH), Num(2.0)), Pow(R, Num(2.0)))


def test_precedence_and_associativity():
    assert parse("2^3^2") == Pow(Num(2.0), Pow(Num(3.0), Num(2.0)))
    assert parse("8/4/2") == Div(Div(Num(8.0), Num(4.0)), Num(2.0))
    assert parse("1-2-3") == Sub(Sub(Num(1.0), Num(2.0)), Num(3.0))
    # ^ binds tighter than unary minus
    assert parse("-r^2") == Neg(Pow(R, Num(2.0)))
    assert parse("r^-2") == Pow(R, Neg(Num(2.0)))
    assert parse(" x1\t*  t ") == Mul(R, Coord(0))
    assert parse("1e-3 + .5") == Add(Num(1e-3), Num(0.5))


def test_eval_examples():
    assert evaluate(parse("1 - 2/r"), [0, 10, 0, 0]) == pytest.approx(0.8, abs=1e-15)
    assert evaluate(parse("r^2"), [0, 3, 0, 0]) == 9.0
    with pytest.raises(DomainError):
        evaluate(parse("1/r"), [0, 0, 0, 0])


def test_fractional_powers():
    assert evaluate(parse("t^(2/3)"), [8.0, 0, 0, 0]) == pytest.approx(4.0, rel=1e-15)
    assert evaluate(parse("t^(4/3)"), [1.0, 0, 0, 0]) == 1.0
    with pytest.raises(DomainError):
        evaluate(parse("t^(2/3)"), [-1.0, 0, 0, 0])
    # integer exponents allow negative bases
    assert evaluate(parse("t^3"), [-2.0, 0, 0, 0]) == -8.0


@pytest.mark.parametrize("src,point", [
    ("sqrt(r)", [0, -1, 0, 0]),
    ("ln(r)", [0, 0, 0, 0]),
    ("ln(r)", [0, -3, 0, 0]),
    ("r^-1", [0, 0, 0, 0]),
    ("exp(r)", [0, 1e4, 0, 0]),
])
def test_domain_errors(src, point):
    with pytest.raises(DomainError):
        evaluate(parse(src), point)


@pytest.mark.parametrize("src,exc,offset", [
    ("1 + ", ParseError, 4),
    ("(r", ParseError, 2),
    ("r $ 2", ParseError, 2),
    ("1 2", ParseError, 2),
    ("foo + 1", UnknownIdentifierError, 0),
    ("1 + sin(r, t)", ArityError, 4),
    ("r(2)", ArityError, 0),
    ("sin r", ParseError, 4),
])
def test_parse_errors_carry_offsets(src, exc, offset):
    with pytest.raises(exc) as info:
        parse(src)
    assert isinstance(info.value, ExpressionError)
    assert info.value.offset == offset
    assert f"offset {offset}" in str(info.value)


def test_custom_coordinate_names():
    table = coordinate_table(("t", "x", "y", "z"))
    assert parse("x*y - z", table) == Sub(Mul(Coord(1), Coord(2)), Coord(3))
    with pytest.raises(UnknownIdentifierError):
        parse("r", table)
    with pytest.raises(ValueError):
        coordinate_table(("t", "sin", "y", "z"))
    with pytest.raises(ValueError):
        coordinate_table(("t", "x"))


# --- random expressions ---------------------------------------------------------

NAMES = ["t", "r", "th", "ph", "x0", "x1", "x2", "x3"]


def random_pair(rng: random.Random, depth: int) -> tuple[str, str]:
    """Random DSL source and the equivalent fully parenthesised Python source."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.5:
            name = rng.choice(NAMES)
            return name, name
        lit = repr(round(rng.uniform(0.1, 5.0), rng.randint(0, 3)))
        return lit, lit
    kind = rng.choice(["+", "-", "*", "/", "^", "neg", "call"])
    if kind == "neg":
        d, p = random_pair(rng, depth - 1)
        return f"-({d})", f"(-({p}))"
    if kind == "call":
        f = rng.choice(["sin", "cos", "sqrt", "exp", "ln"])
        d, p = random_pair(rng, depth - 1)
        return f"{f}({d})", f"{f}({p})"
    if kind == "^":
        exp = rng.choice(["2", "3", "(2/3)", "0.5", "-1", "(4/3)"])
        d, p = random_pair(rng, depth - 1)
        return f"({d})^{exp}", f"pw({p}, {exp})"
    (d1, p1), (d2, p2) = random_pair(rng, depth - 1), random_pair(rng, depth - 1)
    return f"({d1}) {kind} ({d2})", f"(({p1}) {kind} ({p2}))"


def random_source(rng: random.Random, depth: int) -> str:
    return random_pair(rng, depth)[0]


class Oracle:
    """Direct interpreter: Python's own evaluator on the translated source."""

    def __init__(self, point):
        self.env = {n: point[int(n[1])] if n.startswith("x") else point[NAMES.index(n)] for n in NAMES}
        self.env.update(sin=math.sin, cos=math.cos, exp=math.exp, sqrt=self._sqrt, ln=self._ln, pw=self._pw)

    @staticmethod
    def _sqrt(v):
        if v < 0:
            raise DomainError
        return math.sqrt(v)

    @staticmethod
    def _ln(v):
        if v <= 0:
            raise DomainError
        return math.log(v)

    @staticmethod
    def _pw(base, exponent):
        if float(exponent).is_integer():
            return base ** int(exponent)
        if base <= 0:
            raise DomainError
        return base ** exponent

    def __call__(self, py: str) -> float:
        try:
            v = eval(py, {"__builtins__": {}}, self.env)
        except (ZeroDivisionError, OverflowError, ValueError):
            raise DomainError from None
        if not math.isfinite(v):
            raise DomainError
        return v


def test_eval_matches_oracle_on_random_expressions():
    rng = random.Random(1234)
    compared = 0
    while compared < 1000:
        src, py = random_pair(rng, 4)
        point = [rng.uniform(0.2, 4.0) for _ in range(4)]
        try:
            want = Oracle(point)(py)
        except DomainError:
            with pytest.raises(DomainError):
                evaluate(parse(src), point)
            continue
        got = evaluate(parse(src), point)
        assert got == pytest.approx(want, rel=1e-14, abs=1e-14), src
        compared += 1


@settings(max_examples=200, deadline=None, derandomize=True)
@given(st.integers(0, 10**9))
def test_print_parse_round_trip(seed):
    src = random_source(random.Random(seed), 5)
    e = parse(src)
    printed = to_source(e)
    assert parse(printed) == e
    assert to_source(parse(printed)) == printed


def test_printer_is_minimal_on_examples():
    assert to_source(parse("1 - 2/r")) == "1.0 - 2.0 / x1"
    assert to_source(parse("(1-2)-3")) == "1.0 - 2.0 - 3.0"
    assert to_source(parse("1-(2-3)")) == "1.0 - (2.0 - 3.0)"
    assert to_source(parse("(r^2)^3")) == "(x1 ^ 2.0) ^ 3.0"
    assert to_source(parse("-(r+1)")) == "-(x1 + 1.0)"


# --- metric specs -----------------------------------------------------------------


def schwarzschild_spec(overrides=None):
    comps = {(m, n): Num(0.0) for m in range(4) for n in range(m, 4)}
    comps[0, 0] = parse("1 - 2/r")
    comps[1, 1] = parse("-1/(1 - 2/r)")
    comps[2, 2] = parse("-r^2")
    comps[3, 3] = parse("-r^2 * sin(th)^2")
    comps.update(overrides or {})
    return MetricSpec("s", comps, domain=parse("r - 2"))


def test_metric_spec():
    spec = schwarzschild_spec()
    x = [0.0, 10.0, 1.0, 0.5]
    g = spec.metric(x)
    assert g[0, 0] == pytest.approx(0.8)
    assert g[3, 3] == pytest.approx(-100 * math.sin(1.0) ** 2)
    assert np.array_equal(g, g.T)
    spec.check_signature(x)
    assert spec.in_domain(x) and not spec.in_domain([0.0, 1.0, 1.0, 0.5])


def test_metric_spec_rejects_bad_signature_and_missing():
    bad = schwarzschild_spec({(0, 0): parse("-1")})
    with pytest.raises(SignatureViolation):
        bad.check_signature([0.0, 10.0, 1.0, 0.5])
    comps = dict(schwarzschild_spec().components)
    del comps[3, 3]
    with pytest.raises(ValueError, match="g33"):
        MetricSpec("s", comps)


def test_metric_signature_counts():
    assert metric_signature(np.diag([1.0, -1, -1, -1])) == (1, 3)
    assert metric_signature(np.diag([-1.0, -1, -1, -1])) == (0, 4)
    assert metric_signature(np.diag([1.0, 0, -1, -1])) == (1, 2)
