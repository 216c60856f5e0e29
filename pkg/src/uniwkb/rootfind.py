"""Bracketed scalar root finding.

One hybrid solver covers every root problem in the package: bisection for
guaranteed bracket shrinkage, secant steps for the polish.  No derivatives
required, deterministic, and safe on functions that are merely continuous.
"""


class BracketError(ValueError):
    """No sign change in the supplied or searched interval."""


def hybrid_root(f, lo, hi, flo=None, fhi=None, rel_tol=1e-12, abs_tol=0.0,
                max_iter=200, f_tol=0.0):
    """Root of f in [lo, hi] with f(lo), f(hi) of opposite sign.

    Bisection steps are forced whenever the bracket fails to halve, so the
    worst case is plain bisection; secant steps give the usual superlinear
    finish.  Terminates when the bracket is below abs_tol + rel_tol*|x|,
    or earlier when |f| drops to f_tol (for residual-controlled solves).
    """
    a, b = float(lo), float(hi)
    fa = f(a) if flo is None else flo
    if fa == 0.0:
        return a
    fb = f(b) if fhi is None else fhi
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise BracketError("no sign change on [%g, %g]" % (lo, hi))
    x0, f0, x1, f1 = a, fa, b, fb
    width = abs(b - a)
    for _ in range(max_iter):
        tol = abs_tol + rel_tol * max(abs(a), abs(b), 1e-300)
        if abs(b - a) <= tol:
            break
        x2 = None
        if f1 != f0:
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        lo_, hi_ = (a, b) if a < b else (b, a)
        if x2 is None or not (lo_ < x2 < hi_) or abs(b - a) > 0.5 * width:
            x2 = 0.5 * (a + b)
        width = abs(b - a)
        f2 = f(x2)
        if abs(f2) <= f_tol:
            return x2
        if (fa > 0) == (f2 > 0):
            a, fa = x2, f2
        else:
            b, fb = x2, f2
        x0, f0, x1, f1 = x1, f1, x2, f2
    return a if abs(fa) <= abs(fb) else b


def march_to_sign_change(f, x0, f0, step, limit, grow=1.5):
    """Walk from x0 in the direction of step until f changes sign.

    Returns (a, b, fa, fb) with the sign change inside; raises BracketError
    if |x| exceeds limit first.
    """
    if f0 == 0.0:
        return x0, x0, 0.0, 0.0
    x_prev, f_prev = x0, f0
    h = step
    while True:
        x = x_prev + h
        if abs(x) > limit:
            raise BracketError(
                "no sign change between %g and the search limit %g" % (x0, limit))
        fx = f(x)
        if fx == 0.0 or (fx > 0) != (f0 > 0):
            return x_prev, x, f_prev, fx
        x_prev, f_prev = x, fx
        h *= grow
