"""Potential construction, expression parsing with jet derivatives, Q
bundles, and turning-point location."""

import math

import numpy as np
import pytest

from uniwkb import exprparse
from uniwkb.exprparse import ExprError
from uniwkb.potentials import (
    NoBoundRegionError,
    ParameterError,
    WellShapeError,
    find_minimum,
    find_turning_points,
    make_builtin,
    parse_potential,
    q_bundle,
)
from uniwkb.rootfind import BracketError


def test_builtin_values():
    h = make_builtin("harmonic", {"k": 0.5})
    assert h.eval(2.0) == (2.0, 2.0, 1.0, 0.0)
    m = make_builtin("morse", {"gamma": 4.5, "alpha": 1.0})
    V, V1, V2, V3 = m.eval(0.0)
    assert abs(V - (-10.125)) < 1e-14
    assert abs(V1) < 1e-14  # q = 0 is the Morse minimum
    p = make_builtin("poschl_teller", {"lambda": 5.0, "alpha": 1.0})
    V, V1, V2, V3 = p.eval(0.0)
    assert abs(V - (-10.0)) < 1e-14
    assert abs(V1) < 1e-14


def test_builtin_derivative_consistency():
    """Analytic V', V'', V''' must match finite differences of V."""
    pots = [
        make_builtin("harmonic", {"k": 0.8}),
        make_builtin("morse", {"gamma": 4.5, "alpha": 1.0}),
        make_builtin("morse", {"gamma": 3.0, "alpha": 0.7}, hbar=2.0, mass=1.5),
        make_builtin("poschl_teller", {"lambda": 5.0, "alpha": 1.0}),
        make_builtin("poschl_teller", {"lambda": 3.3, "alpha": 1.4}),
    ]
    h = 0.02
    w1 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / (60 * h)
    w2 = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / (180 * h * h)
    w3 = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / (8 * h ** 3)
    for pot in pots:
        for q in (-1.3, -0.4, 0.35, 1.1):
            vals = np.array([pot.eval(q + k * h)[0] for k in range(-3, 4)])
            V, V1, V2, V3 = pot.eval(q)
            scale = max(1.0, abs(V1), abs(V2), abs(V3))
            assert abs(w1 @ vals - V1) < 1e-7 * scale
            assert abs(w2 @ vals - V2) < 1e-6 * scale
            assert abs(w3 @ vals - V3) < 1e-5 * scale


def test_parameter_validation():
    with pytest.raises(ParameterError):
        make_builtin("harmonic", {"k": -1.0})
    with pytest.raises(ParameterError):
        make_builtin("morse", {"gamma": 0.4})
    with pytest.raises(ParameterError):
        make_builtin("poschl_teller", {"lambda": 1.0})
    with pytest.raises(ParameterError):
        make_builtin("coulomb", {})


def test_param_aliases():
    m = make_builtin("morse", {"g": 4.5})
    assert m.params["gamma"] == 4.5
    p = make_builtin("poschl_teller", {"lam": 5.0})
    assert p.params["lambda"] == 5.0


def test_expression_matches_builtin_morse():
    m = make_builtin("morse", {"gamma": 4.5, "alpha": 1.0})
    e = parse_potential("g^2/2*(exp(-2*q) - 2*exp(-q))", {"g": 4.5})
    for q in (-1.0, 0.0, 2.0):
        for a, b in zip(m.eval(q), e.eval(q)):
            assert abs(a - b) <= 1e-14 * max(1.0, abs(a))


def test_expression_basics():
    f = parse_potential("0.5*q^2", {}).eval
    assert f(1.0) == (0.5, 1.0, 1.0, 0.0)
    # integer powers must accept negative bases
    V, V1, V2, V3 = f(-2.0)
    assert (V, V1, V2, V3) == (2.0, -2.0, 1.0, 0.0)
    g = parse_potential("q^4/4 - q^2 + 3", {}).eval
    V, V1, V2, V3 = g(-1.5)
    assert abs(V - (1.5 ** 4 / 4 - 1.5 ** 2 + 3)) < 1e-14
    assert abs(V1 - (4 * (-1.5) ** 3 / 4 - 2 * (-1.5))) < 1e-14


def test_expression_errors_carry_positions():
    with pytest.raises(ExprError) as err:
        exprparse.parse("q^")
    assert err.value.column == 3
    with pytest.raises(ExprError):
        exprparse.parse("(q + 1")
    with pytest.raises(ExprError) as err:
        exprparse.parse("q + $")
    assert err.value.column == 5
    with pytest.raises(ExprError) as err:
        exprparse.compile_expr("k*q^2 + zz", {"k": 1.0})
    assert err.value.column == 9
    with pytest.raises(exprparse.EvalDomainError):
        exprparse.compile_expr("ln(q)", {})(-1.0)
    with pytest.raises(exprparse.EvalDomainError):
        exprparse.compile_expr("1/q", {})(0.0)


# expression fragments combined at random; all total functions of q
_FRAGMENTS = [
    "sin({c1}*q + {c2})",
    "cos({c1}*q)",
    "tanh({c1}*q + {c2})",
    "sinh({c1}*q)",
    "exp({c1}*q)",
    "exp(-q^2/{d})",
    "q^2*{c1}",
    "q^3/{d}",
    "({c1} + q^2)",
    "sqrt({d} + q^2)",
    "ln({d} + q^2)",
    "1/({d} + q^2)",
    "cosh({c1}*q)",
]


def _random_expr(rng):
    parts = []
    for _ in range(rng.integers(1, 4)):
        frag = _FRAGMENTS[rng.integers(0, len(_FRAGMENTS))]
        parts.append(frag.format(c1=round(rng.uniform(-1.5, 1.5), 3),
                                 c2=round(rng.uniform(-1.0, 1.0), 3),
                                 d=round(rng.uniform(1.5, 4.0), 3)))
    ops = [" + ", " * ", " - "]
    s = parts[0]
    for p in parts[1:]:
        s += ops[rng.integers(0, 3)] + p
    return s


def test_jet_derivatives_against_finite_differences():
    """100 random expression/point pairs, derivatives to 3rd order."""
    rng = np.random.default_rng(20250814)
    h = 0.01
    w1 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / (60 * h)
    w2 = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / (180 * h * h)
    w3 = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / (8 * h ** 3)
    checked = 0
    while checked < 100:
        src = _random_expr(rng)
        q = float(rng.uniform(-2.0, 2.0))
        f = exprparse.compile_expr(src, {})
        vals = np.array([f(q + k * h)[0] for k in range(-3, 4)])
        V, V1, V2, V3 = f(q)
        for fd, an in ((w1 @ vals, V1), (w2 @ vals, V2), (w3 @ vals, V3)):
            assert abs(fd - an) < 1e-6 * max(1.0, abs(an), abs(V)), (src, q)
        checked += 1


def test_q_bundle():
    h = make_builtin("harmonic", {"k": 0.5})
    b = q_bundle(h, 0.0, 0.5, 1.0)
    assert (b.Q, b.dQ, b.d2Q, b.d3Q) == (-1.0, 0.0, 2.0, 0.0)
    assert q_bundle(h, 1.0, 0.5, 1.0).Q == 0.0
    m = make_builtin("morse", {"gamma": 4.5, "alpha": 1.0})
    assert abs(q_bundle(m, 40.0, -8.0, 1.0).Q - 16.0) < 1e-12


def test_find_minimum():
    assert abs(find_minimum(make_builtin("harmonic", {"k": 0.5}))) < 1e-12
    assert abs(find_minimum(make_builtin("morse", {"gamma": 4.5}))) < 1e-12
    assert abs(find_minimum(make_builtin("poschl_teller", {"lambda": 5.0}))) < 1e-12
    shifted = parse_potential("(q - 1.25)^2", {})
    assert abs(find_minimum(shifted) - 1.25) < 1e-10
    with pytest.raises(WellShapeError):
        find_minimum(parse_potential("(q^2 - 4)^2", {}))  # double well


def test_find_turning_points():
    h = make_builtin("harmonic", {"k": 0.5})
    tp = find_turning_points(h, 0.5, 1.0)
    assert abs(tp.q_minus + 1.0) < 1e-12
    assert abs(tp.q_plus - 1.0) < 1e-12
    assert abs(tp.q_m) < 1e-12
    m = make_builtin("morse", {"gamma": 4.5, "alpha": 1.0})
    tp = find_turning_points(m, -8.0, 1.0)
    y = 1.0 + math.sqrt(1.0 - 16.0 / 20.25)
    assert abs(tp.q_minus - (-math.log(y))) < 1e-10
    y = 1.0 - math.sqrt(1.0 - 16.0 / 20.25)
    assert abs(tp.q_plus - (-math.log(y))) < 1e-10
    assert tp.q_minus < tp.q_m < tp.q_plus


def test_turning_point_residual_bound():
    for pot, E in [
        (make_builtin("harmonic", {"k": 0.5}), 3.5),
        (make_builtin("morse", {"gamma": 4.5}), -0.504),
        (make_builtin("poschl_teller", {"lambda": 5.0}), -0.495),
    ]:
        tp = find_turning_points(pot, E, 1.0)
        q_cap = max(abs(q_bundle(pot, tp.q_m, E, 1.0).Q), 2.0 * abs(E))
        assert abs(q_bundle(pot, tp.q_minus, E, 1.0).Q) <= 1e-10 * q_cap
        assert abs(q_bundle(pot, tp.q_plus, E, 1.0).Q) <= 1e-10 * q_cap


def test_turning_point_errors():
    h = make_builtin("harmonic", {"k": 0.5})
    with pytest.raises(NoBoundRegionError):
        find_turning_points(h, 0.0, 1.0)  # E = V_min
    m = make_builtin("morse", {"gamma": 4.5})
    with pytest.raises(BracketError):
        find_turning_points(m, 0.5, 1.0)  # above dissociation, right side open
