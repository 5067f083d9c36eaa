"""Conversions between exact rationals and mpmath reals."""

from __future__ import annotations

from fractions import Fraction

from mpmath import mp, mpf

DPS = 60


def to_mpf(x) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def mpf_to_fraction(x: mpf) -> Fraction:
    """Exact value of a binary mpmath float."""
    man, exp = x.man_exp
    if exp >= 0:
        return Fraction(int(man) << int(exp))
    return Fraction(int(man), 1 << int(-exp))


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    return mpf_to_fraction(mpf(x))


def fmt_real(x, digits: int = 12) -> str:
    """Human/serialisable rendering of a real that may be far outside float range."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        with mp.workdps(DPS):
            return mp.nstr(to_mpf(x), digits)
    if isinstance(x, int):
        return str(x)
    with mp.workdps(DPS):
        return mp.nstr(mpf(x), digits)


def fmt_exact(x) -> str:
    if x is None or isinstance(x, bool):
        return fmt_real(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return fmt_real(x, 17)
