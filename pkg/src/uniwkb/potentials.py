"""Potential models: built-in wells, parsed expressions, Q bundles, and
turning-point location.

Every model evaluates V together with its first three derivatives, since the
downstream mean/phase machinery differentiates Q''/Q' once more.  Built-ins
carry analytic derivatives; expressions get theirs from the degree-3 Taylor
arithmetic in exprparse.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

from . import exprparse
from .rootfind import BracketError, hybrid_root, march_to_sign_change

BUILTIN_KINDS = ("harmonic", "morse", "poschl_teller")
_PARAM_ALIASES = {"g": "gamma", "lam": "lambda", "l": "lambda"}

# search window half-width for minima and turning points, divided by the
# potential's inverse length scale alpha
SEARCH_HALF_WIDTH = 30.0
TP_REL_TOL = 1e-12


@dataclass(frozen=True)
class PotentialModel:
    kind: str
    params: dict
    hbar: float
    mass: float
    eval: Callable  # q -> (V, V', V'', V''')
    alpha: float = field(default=1.0)  # inverse length scale for windows


@dataclass(frozen=True)
class QBundle:
    q: float
    Q: float
    dQ: float
    d2Q: float
    d3Q: float


@dataclass(frozen=True)
class TurningPoints:
    q_minus: float
    q_plus: float
    q_m: float


class ParameterError(ValueError):
    """Potential parameters outside their admissible domain."""


class WellShapeError(ValueError):
    """The potential is not a single well in the search window."""


class NoBoundRegionError(ValueError):
    """Energy at or below the well minimum; no classically allowed region."""


def _normalize_params(params):
    out = {}
    for name, value in params.items():
        out[_PARAM_ALIASES.get(name, name)] = float(value)
    return out


_BUILTIN_PARAMS = {"harmonic": ("k",),
                   "morse": ("gamma", "alpha"),
                   "poschl_teller": ("lambda", "alpha")}


def make_builtin(kind, params, hbar=1.0, mass=1.0):
    """Construct one of the closed-form wells with analytic derivatives."""
    params = _normalize_params(params)
    known = _BUILTIN_PARAMS.get(kind)
    if known is not None:
        stray = sorted(set(params) - set(known))
        if stray:
            raise ParameterError("%s does not take parameter(s) %s; knows %s"
                                 % (kind, ", ".join(stray), ", ".join(known)))
    if kind == "harmonic":
        k = params.setdefault("k", 0.5)
        if k <= 0:
            raise ParameterError("harmonic requires k > 0")

        def ev(q):
            return (k * q * q, 2 * k * q, 2 * k, 0.0)

        return PotentialModel(kind, params, hbar, mass, ev, alpha=1.0)
    if kind == "morse":
        g = params.setdefault("gamma", 4.5)
        al = params.setdefault("alpha", 1.0)
        if g <= 0.5 or al <= 0:
            raise ParameterError("morse requires gamma > 1/2 and alpha > 0")
        A = g * g * hbar * hbar * al * al / (2 * mass)

        def ev(q):
            e1 = math.exp(-al * q)
            e2 = e1 * e1
            return (A * (e2 - 2 * e1),
                    A * al * (-2 * e2 + 2 * e1),
                    A * al * al * (4 * e2 - 2 * e1),
                    A * al ** 3 * (-8 * e2 + 2 * e1))

        return PotentialModel(kind, params, hbar, mass, ev, alpha=al)
    if kind == "poschl_teller":
        lam = params.setdefault("lambda", 5.0)
        al = params.setdefault("alpha", 1.0)
        if lam <= 1 or al <= 0:
            raise ParameterError("poschl_teller requires lambda > 1 and alpha > 0")
        B = lam * (lam - 1) * hbar * hbar * al * al / (2 * mass)

        def ev(q):
            s = 1.0 / math.cosh(al * q)
            t = math.tanh(al * q)
            s2 = s * s
            return (-B * s2,
                    2 * B * al * s2 * t,
                    2 * B * al * al * (s2 * s2 - 2 * s2 * t * t),
                    2 * B * al ** 3 * (-8 * s2 * s2 * t + 4 * s2 * t * t * t))

        return PotentialModel(kind, params, hbar, mass, ev, alpha=al)
    raise ParameterError("unknown builtin potential kind %r" % (kind,))


def parse_potential(expr, params, hbar=1.0, mass=1.0):
    """Expression-defined potential; derivatives via Taylor-mode jets."""
    params = {k: float(v) for k, v in params.items()}
    ev = exprparse.compile_expr(expr, params)
    return PotentialModel("expression", dict(params, _expr=expr), hbar, mass,
                          ev, alpha=1.0)


def q_bundle(potential, q, E, mass):
    V, V1, V2, V3 = potential.eval(q)
    m2 = 2.0 * mass
    return QBundle(q, m2 * (V - E), m2 * V1, m2 * V2, m2 * V3)


def q_bundle_many(potential, q, E, mass):
    """QBundle with array fields; eval closures stay scalar-only."""
    import numpy as np

    q = np.asarray(q, dtype=float)
    rows = [potential.eval(qi) for qi in q.ravel().tolist()]
    V, V1, V2, V3 = (np.array(col).reshape(q.shape) for col in zip(*rows))
    m2 = 2.0 * mass
    return QBundle(q, m2 * (V - E), m2 * V1, m2 * V2, m2 * V3)


def find_minimum(potential):
    """Locate the unique local minimum of V in the search window.

    Scans a coarse grid, rejects multi-well shapes, then polishes the zero
    of V' by bisection with secant refinement.
    """
    half = SEARCH_HALF_WIDTH / potential.alpha
    n = 1201
    qs = [(-half + 2 * half * i / (n - 1)) for i in range(n)]
    vs = [potential.eval(q)[0] for q in qs]
    minima = [i for i in range(1, n - 1)
              if vs[i] <= vs[i - 1] and vs[i] <= vs[i + 1]]
    # collapse plateaus of equal samples into one candidate
    distinct = []
    for i in minima:
        if not distinct or i - distinct[-1] > 1:
            distinct.append(i)
    if not distinct:
        raise WellShapeError("no interior minimum in the search window")
    if len(distinct) > 1:
        raise WellShapeError("multiple local minima; single-well methods only")
    i = distinct[0]
    dv = lambda q: potential.eval(q)[1]
    lo, hi = qs[i - 1], qs[i + 1]
    flo, fhi = dv(lo), dv(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        # sampling artifact; widen by one cell
        lo, hi = qs[max(i - 2, 0)], qs[min(i + 2, n - 1)]
        flo, fhi = dv(lo), dv(hi)
    q_m = hybrid_root(dv, lo, hi, flo=flo, fhi=fhi, rel_tol=1e-14,
                      abs_tol=1e-14 * half)
    return q_m


def find_turning_points(potential, E, mass, q_m=None):
    """Classical turning points around the well minimum at energy E.

    q_m may be passed in when already known to skip the minimum search.
    """
    if q_m is None:
        q_m = find_minimum(potential)
    v_min = potential.eval(q_m)[0]
    if not E > v_min:
        raise NoBoundRegionError(
            "E = %g does not exceed the well minimum %g" % (E, v_min))
    half = SEARCH_HALF_WIDTH / potential.alpha
    limit = abs(q_m) + 2 * half
    Qf = lambda q: q_bundle(potential, q, E, mass).Q
    f0 = Qf(q_m)
    step = max(1e-3 * half, 1e-6)
    try:
        a, b, fa, fb = march_to_sign_change(Qf, q_m, f0, -step, limit)
        q_minus = hybrid_root(Qf, b, a, flo=fb, fhi=fa, rel_tol=TP_REL_TOL)
        a, b, fa, fb = march_to_sign_change(Qf, q_m, f0, step, limit)
        q_plus = hybrid_root(Qf, a, b, flo=fa, fhi=fb, rel_tol=TP_REL_TOL)
    except BracketError as exc:
        raise BracketError("turning point search left the window: %s" % exc)
    return TurningPoints(q_minus, q_plus, q_m)
