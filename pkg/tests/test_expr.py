import math

import numpy as np
import pytest

from ccdeg import expr as ex
from ccdeg.errors import ExprParseError


def parse1(text):
    return ex.parse(text, ("x",))


def parse2(text):
    return ex.parse(text, ("x", "y"))


class TestParseEval:
    @pytest.mark.parametrize(
        "text,point,expected",
        [
            ("1/3", (0.0,), 1.0 / 3.0),
            ("x + 1", (2.0,), 3.0),
            ("2*x - 3", (5.0,), 7.0),
            ("-x^2", (3.0,), -9.0),
            ("(1 + x)^2", (2.0,), 9.0),
            ("x^-1", (4.0,), 0.25),
            ("min(x, 0.5)", (0.2,), 0.2),
            ("max(x, 0.5)", (0.2,), 0.5),
            ("abs(-x)", (2.5,), 2.5),
            ("exp(0) + sin(0) + cos(0)", (0.0,), 2.0),
            ("min(max(-x/2, -1/2), 1/2)", (2.0,), -0.5),
            ("2e-3 + x", (0.0,), 0.002),
            ("pi - pi", (0.0,), 0.0),
        ],
    )
    def test_scalar(self, text, point, expected):
        assert ex.evaluate(parse1(text), point) == pytest.approx(expected, abs=1e-15)

    def test_two_variables(self):
        e = parse2("x*y - y^2")
        assert ex.evaluate(e, (3.0, 2.0)) == pytest.approx(2.0)

    def test_precedence(self):
        assert ex.evaluate(parse1("2 + 3 * 4"), (0.0,)) == 14.0
        assert ex.evaluate(parse1("2 * 3 ^ 2"), (0.0,)) == 18.0
        assert ex.evaluate(parse1("-2 ^ 2"), (0.0,)) == -4.0  # unary minus binds last

    @pytest.mark.parametrize(
        "text,col",
        [
            ("(1 + 2", 7),
            ("1 +", 4),
            ("foo(3)", 1),
            ("min(1)", 6),
            ("x ~ 2", 3),
            ("x ^ y", 5),
        ],
    )
    def test_errors_carry_position(self, text, col):
        with pytest.raises(ExprParseError) as err:
            ex.parse(text, ("x",), line=3)
        assert err.value.line == 3
        assert err.value.col == col

    def test_round_trip_via_text(self):
        e = parse2("min(max(-x/2, -1/2), 1/2) + y^3")
        text = ex.to_text(e, ("x", "y"))
        e2 = ex.parse(text, ("x", "y"))
        for p in [(-2.0, 0.3), (0.1, -1.2), (4.0, 2.0)]:
            assert ex.evaluate(e, p) == pytest.approx(ex.evaluate(e2, p), rel=1e-15)


class TestBatchEval:
    def test_matches_scalar(self, rng):
        exprs = [
            parse1("x^3 - 2*x + 1"),
            parse1("sin(3*x) * exp(x/2)"),
            parse1("min(x, 1 - x) + abs(x - 1/2)"),
        ]
        xs = np.linspace(-2.0, 2.0, 101)
        for e in exprs:
            batch = ex.evaluate_batch(e, [xs])
            for i, x in enumerate(xs):
                assert batch[i] == pytest.approx(ex.evaluate(e, (x,)), rel=1e-14, abs=1e-14)


class TestSubstitute:
    def test_binds_and_reindexes(self):
        # H(x, t) = t * x: fixing t = 1/2 leaves x as variable 0.
        e = ex.Binary("*", ex.Var(1), ex.Var(0))
        s = ex.substitute(e, 1, 0.5)
        assert ex.variables(s) == {0}
        assert ex.evaluate(s, (3.0,)) == pytest.approx(1.5)

    def test_binding_first_variable_shifts(self):
        e = ex.Binary("+", ex.Var(0), ex.Binary("*", ex.Const(2.0), ex.Var(1)))
        s = ex.substitute(e, 0, 1.0)
        assert ex.variables(s) == {0}
        assert ex.evaluate(s, (4.0,)) == pytest.approx(9.0)


class TestIntervalEnclosure:
    @pytest.mark.parametrize(
        "text,box",
        [
            ("x^2 - x", [(-1.0, 2.0)]),
            ("sin(3*x)", [(0.0, 2.0)]),
            ("cos(x) * x", [(-3.0, 1.0)]),
            ("min(x, 1-x) + max(x, 0)", [(-2.0, 2.0)]),
            ("abs(x - 1/2)", [(0.0, 1.0)]),
            ("exp(-x^2)", [(-1.0, 1.0)]),
            ("1 / (x + 3)", [(-1.0, 1.0)]),
            ("x^3", [(-2.0, 1.0)]),
        ],
    )
    def test_enclosure_contains_samples(self, text, box):
        e = parse1(text)
        lo, hi = ex.evaluate_interval(e, box)
        for t in np.linspace(box[0][0], box[0][1], 257):
            v = ex.evaluate(e, (t,))
            assert lo - 1e-12 <= v <= hi + 1e-12

    def test_division_through_zero_is_whole_line(self):
        lo, hi = ex.evaluate_interval(parse1("1/x"), [(-1.0, 1.0)])
        assert lo == -math.inf and hi == math.inf

    def test_even_power_nonnegative(self):
        lo, hi = ex.evaluate_interval(parse1("x^2"), [(-2.0, 1.0)])
        assert lo == 0.0 and hi == 4.0

    def test_two_variable_enclosure(self):
        e = parse2("x*y")
        lo, hi = ex.evaluate_interval(e, [(-1.0, 2.0), (3.0, 4.0)])
        assert lo == -4.0 and hi == 8.0
