"""Exact rational scalars: parsing and canonical formatting.

Every probability, map coefficient and LP number in this package is a
`fractions.Fraction`.  Floats are rejected everywhere; the canonical text
form is always "num/den" with the denominator written out ("3" -> "3/1").
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" (optional sign, optional "/q") into a Fraction.

    Floats and float-looking strings ("0.5", "1e-3") are rejected.
    """
    if not isinstance(text, str):
        raise ValueError(f"rational must be a string, got {type(text).__name__}")
    s = text.strip()
    if not s:
        raise ValueError("empty rational string")
    if any(c in s for c in ".eE"):
        raise ValueError(f"not an exact rational: {text!r} (floats are rejected)")
    if "/" in s:
        num_s, _, den_s = s.partition("/")
        try:
            num, den = int(num_s), int(den_s)
        except ValueError:
            raise ValueError(f"malformed rational: {text!r}") from None
        if den <= 0:
            raise ValueError(f"denominator must be positive: {text!r}")
        return Fraction(num, den)
    try:
        return Fraction(int(s))
    except ValueError:
        raise ValueError(f"malformed rational: {text!r}") from None


def format_rational(x: Fraction) -> str:
    """Canonical "p/q" form, lowest terms, denominator always explicit."""
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def ensure_fraction(x) -> Fraction:
    """Coerce int/Fraction/str to Fraction; reject floats."""
    if isinstance(x, bool):
        raise ValueError("bool is not a rational")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise ValueError(f"cannot use {type(x).__name__} as an exact rational")
