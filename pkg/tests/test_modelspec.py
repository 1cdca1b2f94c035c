from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from covphase.modelspec import (
    BinOp, Call, ExprField, Model, Name, Neg, Num, ParseError, Pow,
    ValidationError, Var, available_models, derivative, eval_expr,
    load_builtin, parse_expr, parse_model_text, sample_points, to_text,
    tokenize, validate_model,
)
from covphase.smooth import OutsideBoxError, seed_jets

from numutil import central_grad


class TestParser:
    def test_tokens_carry_offsets(self):
        toks = tokenize("x1 + sin(k)")
        assert [(k, t) for k, t, _ in toks] == [
            ("name", "x1"), ("op", "+"), ("name", "sin"), ("op", "("),
            ("name", "k"), ("op", ")")]
        assert [off for _, _, off in toks] == [0, 3, 5, 8, 9, 10]

    def test_precedence(self):
        assert parse_expr("1 + 2*x1") == BinOp("+", Num(1.0),
                                               BinOp("*", Num(2.0), Var(1)))
        assert parse_expr("2*x1 + 1") == BinOp("+",
                                               BinOp("*", Num(2.0), Var(1)),
                                               Num(1.0))
        assert parse_expr("-x1^2") == Neg(Pow(Var(1), Fraction(2)))

    def test_exponents(self):
        assert parse_expr("x1^2") == Pow(Var(1), Fraction(2))
        assert parse_expr("x1^-2") == Pow(Var(1), Fraction(-2))
        assert parse_expr("x1^(1/2)") == Pow(Var(1), Fraction(1, 2))
        assert parse_expr("x1^(-3/2)") == Pow(Var(1), Fraction(-3, 2))

    def test_names_and_calls(self):
        assert parse_expr("B/2 * x1") == BinOp("*", BinOp("/", Name("B"),
                                                          Num(2.0)), Var(1))
        assert parse_expr("cos(x0)") == Call("cos", Var(0))

    @pytest.mark.parametrize("text,offset", [
        ("x1 + * 2", 5),
        ("(x1", 3),
        ("x1 $ 2", 3),
        ("x1^2.5", 3),
        ("1 +", 3),
    ])
    def test_errors_carry_offsets(self, text, offset):
        with pytest.raises(ParseError) as err:
            parse_expr(text)
        assert err.value.offset == offset

    def test_unknown_name_fails_at_evaluation(self):
        fld = ExprField("bogus + 1")
        with pytest.raises(ValueError, match="unknown name"):
            fld.value(np.zeros(4))


_leaf = st.one_of(
    st.builds(Num, st.floats(min_value=0, max_value=3, allow_nan=False,
                             allow_infinity=False)),
    st.builds(Var, st.integers(0, 3)),
)
_exprs = st.recursive(
    _leaf,
    lambda ch: st.one_of(
        st.builds(Neg, ch),
        st.builds(BinOp, st.sampled_from(list("+-*")), ch, ch),
        st.builds(Call, st.sampled_from(["sin", "cos"]), ch),
    ),
    max_leaves=12,
)


@given(_exprs)
def test_print_parse_round_trip(node):
    assert parse_expr(to_text(node)) == node


@given(_exprs, st.integers(0, 3))
def test_derivative_never_raises_on_safe_ops(node, i):
    d = derivative(node, i)
    coords = seed_jets([0.3, -0.7, 0.2, 0.5], 0)
    v = eval_expr(d, coords, {})
    v = v.f if hasattr(v, "f") else v
    assert np.isfinite(v)


class TestDerivatives:
    exprs = [
        "x1^2 * x2 + sin(x0*x3)",
        "exp(x0/2) / (1 + x1^2)",
        "sqrt(4 + x2^2) - cos(x1)*x3",
        "x0*x1*x2*x3",
    ]

    @pytest.mark.parametrize("text", exprs)
    def test_against_finite_differences(self, text):
        fld = ExprField(text)
        p = np.array([0.4, -0.3, 0.8, 0.2])
        num = central_grad(lambda x: fld.value(x), p)
        for i in range(4):
            assert fld.partial(i).value(p) == pytest.approx(num[i], rel=1e-6,
                                                            abs=1e-8)

    def test_nested_partials_are_exact(self):
        fld = ExprField("x1^2 * x2")
        p = np.array([0.0, 3.0, 5.0, 0.0])
        assert fld.partial(1).partial(1).value(p) == 2.0 * 5.0
        assert fld.partial(1).partial(2).value(p) == 2.0 * 3.0
        assert fld.partial(1).partial(1).partial(2).value(p) == 2.0
        assert fld.partial(1).partial(1).partial(2).partial(0).value(p) == 0.0

    def test_phase_chart_embedding(self):
        # an expression field ignores the fibre coordinates of a larger chart
        fld = ExprField("x1 * x3")
        p7 = np.array([0.0, 2.0, 0.0, 7.0, 1.0, 2.0, 3.0])
        assert fld.value(p7) == 14.0
        assert fld.partial(1).value(p7) == 7.0
        assert fld.partial(5).value(p7) == 0.0
        g = fld.gradient(p7)
        assert g.shape == (7,)
        assert g[3] == 2.0 and not g[4:].any()

    def test_half_integer_powers(self):
        fld = ExprField("x1^(3/2)")
        p = np.array([0.0, 4.0, 0.0, 0.0])
        assert fld.value(p) == 8.0
        assert fld.partial(1).value(p) == pytest.approx(1.5 * 2.0)

    def test_params_resolve(self):
        fld = ExprField("B/2 * x1", {"B": 3.0})
        assert fld.value(np.array([0.0, 2.0, 0.0, 0.0])) == 3.0

    def test_arithmetic_stays_expression_backed(self):
        a = ExprField("x1^2")
        b = ExprField("sin(x0)")
        c = (a * b + 2.0) / ExprField("1 + x2^2")
        assert isinstance(c, ExprField)
        d3 = c.partial(1).partial(1).partial(0)
        p = np.array([0.0, 1.0, 0.0, 0.0])
        assert d3.value(p) == pytest.approx(2.0)

    def test_phase_coordinates_in_expressions(self):
        fld = ExprField("x1 * x4")  # spacetime times fibre coordinate
        p = np.array([0.0, 3.0, 0.0, 0.0, 5.0, 0.0, 0.0])
        assert fld.value(p) == 15.0
        assert fld.partial(4).value(p) == 3.0
        assert fld.partial(4).partial(1).value(p) == 1.0


GOOD_GALILEI = """
[model]
kind = galilei
name = demo

[constants]
m = 1.0 M
q = -1.0 T^-1 L^3/2 M^1/2
hbar = 1.0 T^-1 L^2 M

[params]
k = 0.2

[box]
lo = -1, -1, -1, -1
hi = 1, 1, 1, 1

[metric]
g11 = 1 + k*x1^2
g22 = 1
g33 = 1

[potential]
A1 = -k * x2
"""


class TestModelLoading:
    def test_galilei_model_round_trip(self):
        model = parse_model_text(GOOD_GALILEI)
        validate_model(model)
        assert model.kind == "galilei"
        assert model.charge == -1.0
        assert model.coupling == -1.0
        p = np.array([0.0, 0.5, 0.5, 0.0])
        g = model.metric_at(p)
        assert g[0, 0] == pytest.approx(1 + 0.2 * 0.25)
        assert g[1, 1] == 1.0
        assert model.potential[1].value(p) == pytest.approx(-0.1)

    def test_box_guard(self):
        model = parse_model_text(GOOD_GALILEI)
        with pytest.raises(OutsideBoxError):
            model.metric[0][0].value(np.array([0.0, 2.0, 0.0, 0.0]))

    def test_metric_must_be_positive_definite(self):
        bad = GOOD_GALILEI.replace("g11 = 1 + k*x1^2", "g11 = x1")
        with pytest.raises(ValidationError) as err:
            validate_model(parse_model_text(bad))
        assert err.value.witness is not None
        assert "positive definite" in str(err.value)

    def test_light_speed_rejected_in_galilei(self):
        bad = GOOD_GALILEI.replace("hbar = 1.0 T^-1 L^2 M",
                                   "hbar = 1.0 T^-1 L^2 M\nc = 1.0 T^-1 L")
        with pytest.raises(ValueError, match="light-speed"):
            parse_model_text(bad)

    def test_wrong_dimension_tag(self):
        bad = GOOD_GALILEI.replace("m = 1.0 M", "m = 1.0 L")
        with pytest.raises(ValidationError, match="dimension"):
            parse_model_text(bad)

    def test_missing_diagonal_entry(self):
        bad = GOOD_GALILEI.replace("g22 = 1\n", "")
        with pytest.raises(ValueError, match="g22"):
            parse_model_text(bad)

    def test_phase_coordinates_rejected_in_model_files(self):
        bad = GOOD_GALILEI.replace("A1 = -k * x2", "A1 = -k * x5")
        with pytest.raises(ValueError, match="spacetime"):
            parse_model_text(bad)

    def test_einstein_signature_enforced(self):
        text = GOOD_GALILEI.replace("kind = galilei", "kind = einstein") \
            .replace("hbar = 1.0 T^-1 L^2 M",
                     "hbar = 1.0 T^-1 L^2 M\nc = 1.0 T^-1 L") \
            .replace("[metric]\ng11", "[metric]\ng00 = 1\ng11")
        with pytest.raises(ValidationError, match="signature"):
            validate_model(parse_model_text(text))

    def test_non_closed_gravity_form(self):
        text = GOOD_GALILEI + "\n[gravity]\nPhi12 = x0\n"
        with pytest.raises(ValidationError, match="not closed"):
            validate_model(parse_model_text(text))

    def test_closed_gravity_form_accepted(self):
        text = GOOD_GALILEI + "\n[gravity]\nPhi01 = -x2\nPhi02 = -x1\n"
        model = parse_model_text(text)
        validate_model(model)
        assert model.gravity2.comps[(0, 1)].value(np.array([0, 0.5, 0.25, 0])) \
            == pytest.approx(-0.25)


class TestBuiltinModels:
    def test_catalogue(self):
        names = available_models()
        assert "flat-free" in names and "uniform-b" in names
        assert "minkowski" in names and "uniform-e" in names
        assert len(names) == 8
        assert "schwarzschild-like" in names

    @pytest.mark.parametrize("name", [
        "flat-free", "uniform-b", "curved-galilei", "curved-gravity",
        "minkowski", "uniform-e", "curved-einstein", "schwarzschild-like"])
    def test_all_builtins_validate(self, name):
        model = load_builtin(name, validate=True)
        assert isinstance(model, Model)
        assert model.mass == 1.0 and model.hbar == 1.0

    def test_sample_points_deterministic_and_inside(self):
        model = load_builtin("uniform-b", validate=False)
        a = sample_points(model)
        b = sample_points(model)
        assert np.array_equal(a, b)
        assert a.shape == (49, 4)
        assert np.all(a >= model.box_lo) and np.all(a <= model.box_hi)
