"""Exact fixed-point decimals.

Values are stored as Python ints counting quanta of ``1 / SCALE``.  The quantum
defaults to ``1e-9`` and can be overridden with ``OMEGA_FORGE_FP_SCALE``
(e.g. ``OMEGA_FORGE_FP_SCALE=1e-12``).  All membership and comparison
predicates work on these ints, never on floats.
"""
from __future__ import annotations

import os
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from fractions import Fraction
from numbers import Rational

DEFAULT_QUANTUM = "1e-9"


def _scale_from_env() -> int:
    raw = os.environ.get("OMEGA_FORGE_FP_SCALE", DEFAULT_QUANTUM)
    quantum = Fraction(Decimal(raw.strip()))
    if quantum <= 0 or quantum.numerator != 1:
        raise ValueError(f"OMEGA_FORGE_FP_SCALE must be 1/N for an integer N, got {raw!r}")
    return quantum.denominator


SCALE: int = _scale_from_env()


def _decimal_digits(scale: int) -> int | None:
    text = str(scale)
    if text == "1" + "0" * (len(text) - 1):
        return len(text) - 1
    return None


DIGITS = _decimal_digits(SCALE)


def as_fraction(value) -> Fraction:
    """Parse ``value`` into an exact rational.

    Accepts ``"1/64"``, ``"0.25"``, ``"1e-3"``, ints, Decimals and Fractions.
    Floats are taken at their exact binary value.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not decimals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty decimal string")
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(Decimal(num.strip())) / Fraction(Decimal(den.strip()))
        return Fraction(Decimal(text))
    raise TypeError(f"cannot interpret {value!r} as a decimal")


def to_fixed(value) -> int:
    """Convert a decimal-like value to raw fixed-point quanta (half-even rounding)."""
    return round(as_fraction(value) * SCALE)


def is_exact(value) -> bool:
    return (as_fraction(value) * SCALE).denominator == 1


def to_decimal(raw: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = max(28, len(str(abs(raw))) + 4)
        d = Decimal(raw) / Decimal(SCALE)
        if DIGITS is not None:
            d = d.quantize(Decimal(1).scaleb(-DIGITS), rounding=ROUND_HALF_EVEN)
    return d


def fmt(raw: int) -> str:
    """Canonical decimal string for a raw value, trailing zeros stripped."""
    d = to_decimal(raw)
    text = format(d, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def from_raw(raw: int) -> Fraction:
    """Exact rational for a raw value; feeding it back to ``to_fixed`` is lossless."""
    return Fraction(raw, SCALE)
