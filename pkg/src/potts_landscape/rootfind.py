"""Bracketed scalar root finding: bisection with optional Newton polish."""

from __future__ import annotations

from .errors import NumericalError


def bisect_root(f, lo: float, hi: float, xtol: float = 1e-12,
                flo: float = None, fhi: float = None) -> float:
    """Root of ``f`` inside [lo, hi] by bisection to interval width ``xtol``.

    ``f(lo)`` and ``f(hi)`` must have opposite signs; raises NumericalError
    otherwise (bracket failure).
    """
    flo = f(lo) if flo is None else flo
    fhi = f(hi) if fhi is None else fhi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NumericalError(
            f"no sign change on bracket [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at floating-point resolution
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def bisect_then_newton(f, lo: float, hi: float, df, xtol: float = 1e-12) -> float:
    """Bisection to width ``xtol`` followed by one Newton step with the
    analytic derivative ``df``, clipped back to the bracket."""
    root = bisect_root(f, lo, hi, xtol=xtol)
    d = df(root)
    if d != 0.0:
        step = f(root) / d
        polished = root - step
        if lo < polished < hi:
            root = polished
    return root
