from fractions import Fraction

import mpmath
import pytest
import sympy

from src.counting.counting import count_points, count_series, growth_fit, semi_rational_count
from src.counting.enumeration import enumerate_bounded, farey_count, parse_box
from src.counting.heights import k_height
from src.counting.samples import (
    SampleSpecError,
    build_expression,
    expression_k_height,
    parse_sample,
)
from src.linalg.algebraic import AlgebraicNumber
from src.linalg.gram import EnumerationBoundError

IDENTITY_GRAPH = {"kind": "graph", "expr": {"op": "var"}, "domain": [0, 1]}
SQUARE_GRAPH = {"kind": "graph", "expr": {"op": "mul", "args": ["x", "x"]}, "domain": [0, 1]}
EXP2_GRAPH = {"kind": "graph", "expr": {"op": "pow", "args": [2, "x"]}, "domain": [1, 2]}


# -- k-heights ------------------------------------------------------------------

def test_k_height_of_rationals():
    assert k_height(Fraction(3, 7), 1).value == 7
    assert k_height(Fraction(-3, 4), 2).value == 4
    assert k_height(0, 1).value == 1


def test_k_height_of_quadratic_irrationals():
    sqrt2 = AlgebraicNumber.from_sympy(sympy.sqrt(2))
    assert k_height(sqrt2, 1).value is None
    assert not k_height(sqrt2, 1).is_finite
    h2 = k_height(sqrt2, 2)
    assert h2.value == 2
    assert h2.witness == (1, 0, -2)
    assert k_height(sqrt2, 3).value == 2
    golden = AlgebraicNumber.from_sympy((1 + sympy.sqrt(5)) / 2)
    assert k_height(golden, 2).value == 1


def test_k_height_rejects_k_zero():
    with pytest.raises(ValueError):
        k_height(1, 0)


def test_expression_k_height():
    assert expression_k_height(sympy.Rational(5, 3), 1).value == 5
    assert expression_k_height(sympy.sqrt(2), 1).value is None
    assert expression_k_height(sympy.sqrt(2), 2).value == 2
    assert expression_k_height(sympy.Integer(2) ** sympy.Rational(1, 3), 2).value is None
    assert expression_k_height(sympy.exp(1), 3).value is None


# -- enumeration ----------------------------------------------------------------

def test_farey_count():
    assert [farey_count(t) for t in (1, 2, 3)] == [2, 3, 5]


def test_rationals_of_bounded_height():
    found = enumerate_bounded(1, 3, [0, 1])
    assert [a.as_fraction() for a in found] == [
        Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)
    ]


def test_quadratic_numbers_of_height_one():
    found = enumerate_bounded(2, 1, [0, 2])
    values = [float(mpmath.re(a.value())) for a in found]
    expected = [0.0, (5 ** 0.5 - 1) / 2, 1.0, (5 ** 0.5 + 1) / 2]
    assert len(values) == len(expected)
    for got, want in zip(values, expected):
        assert abs(got - want) < 1e-12


def test_enumeration_bounds():
    with pytest.raises(EnumerationBoundError):
        enumerate_bounded(4, 2, [0, 1])
    with pytest.raises(EnumerationBoundError):
        enumerate_bounded(1, 0, [0, 1])
    with pytest.raises(EnumerationBoundError):
        enumerate_bounded(3, 40, [0, 1])
    with pytest.raises(ValueError):
        parse_box([1, 0])


# -- samples --------------------------------------------------------------------

def test_build_expression():
    x = sympy.Symbol("x")
    assert build_expression({"op": "add", "args": ["x", "1/2"]}, {"x": x}) == x + sympy.Rational(1, 2)
    assert build_expression({"op": "const", "value": "3/4"}, {"x": x}) == sympy.Rational(3, 4)
    with pytest.raises(SampleSpecError):
        build_expression({"op": "sub", "args": ["x"]}, {"x": x})
    with pytest.raises(SampleSpecError):
        build_expression("y", {"x": x})
    with pytest.raises(SampleSpecError):
        build_expression(True, {"x": x})


def test_parse_sample_rejects_unknown_kind():
    with pytest.raises(SampleSpecError):
        parse_sample({"kind": "blob"})


def test_graph_membership():
    z = parse_sample(SQUARE_GRAPH)
    assert z.contains((0.5, 0.25))
    assert not z.contains((0.5, 0.3))
    assert not z.contains((2.0, 4.0))
    assert z.parametrize(0.5) == (0.5, 0.25)


def test_points_sample_validation():
    with pytest.raises(SampleSpecError):
        parse_sample({"kind": "points", "points": [[1, 2], [1, 2, 3]]})
    assert count_points(parse_sample({"kind": "empty"}), 1, 5).count == 0


# -- counting -------------------------------------------------------------------

def test_square_graph_count():
    result = count_points(parse_sample(SQUARE_GRAPH), 1, 3, keep_witnesses=True)
    assert result.count == 2
    assert result.witnesses == [("0", "0"), ("1", "1")]


def test_identity_graph_matches_farey():
    z = parse_sample(IDENTITY_GRAPH)
    for t in (1, 2, 5, 8):
        assert count_points(z, 1, t).count == farey_count(t)


def test_exponential_graph_has_few_rational_points():
    z = parse_sample(EXP2_GRAPH)
    assert count_points(z, 1, 3).count == 1
    for t in (4, 6, 9):
        assert count_points(z, 1, t).count == 2


def test_points_sample_modes():
    z = parse_sample({"kind": "points", "points": [[0, 1], [1, 1], ["1/2", 2]]})
    assert count_points(z, 1, 2).count == 3
    images = semi_rational_count(z, 1, 2)
    assert images.count == 2
    assert images.mode == "pi2-image"


def test_images_are_distinguished_beyond_double_precision():
    near_third = str(Fraction(1, 3) + Fraction(1, 10 ** 20))
    z = parse_sample({"kind": "points", "points": [[0, "1/3"], [1, "2/6"], [1, near_third]]})
    assert semi_rational_count(z, 1, 1).count == 2


def test_curve_projection_counts_irrational_images():
    z = parse_sample(
        {
            "kind": "curve",
            "coords": [{"op": "mul", "args": ["t", "t"]}, "t"],
            "domain": [-1, 1],
            "box": [-1, 1],
        }
    )
    assert count_points(z, 1, 2).count == 3
    assert semi_rational_count(z, 1, 2).count == 5


def test_non_isolated_fiber_is_reported():
    z = parse_sample({"kind": "curve", "coords": ["1", "t"], "domain": [0, 1], "box": [0, 2]})
    result = semi_rational_count(z, 1, 1)
    assert result.count == 0
    assert len(result.warnings) == 1
    assert "non-isolated" in result.warnings[0]


def test_count_series():
    z = parse_sample(IDENTITY_GRAPH)
    series = count_series(z, 1, [1, 2, 3])
    assert [r.count for r in series] == [2, 3, 5]
    assert series[0].csv_row()[:3] == [1, 2, "full"]
    with pytest.raises(ValueError):
        count_series(z, 1, [1], mode="bogus")


def test_growth_fit_on_farey_counts():
    fit = growth_fit([(t, farey_count(t)) for t in (10, 20, 40, 80)])
    assert 1.8 <= fit.epsilon <= 2.2
    assert len(fit.residuals) == 4


def test_growth_fit_needs_three_points():
    with pytest.raises(ValueError):
        growth_fit([(10, 33), (20, 129), (40, 0)])
