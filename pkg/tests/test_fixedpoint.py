import os
import subprocess
import sys
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from omega_forge.fixedpoint import SCALE, as_fraction, fmt, from_raw, is_exact, to_decimal, to_fixed


def test_parse_forms():
    assert to_fixed("1/64") == SCALE // 64
    assert to_fixed("0.25") == SCALE // 4
    assert to_fixed(Fraction(1, 8)) == SCALE // 8
    assert to_fixed(Decimal("0.5")) == SCALE // 2
    assert to_fixed(2) == 2 * SCALE
    assert as_fraction("1e-3") == Fraction(1, 1000)


def test_rejects_garbage():
    with pytest.raises(TypeError):
        to_fixed(True)
    with pytest.raises(TypeError):
        to_fixed([1])
    with pytest.raises(ValueError):
        to_fixed("")


def test_half_even_rounding():
    half = Fraction(1, 2 * SCALE)
    assert to_fixed(half) == 0
    assert to_fixed(3 * half) == 2
    assert not is_exact(half)
    assert is_exact("1/64")


def test_format():
    assert fmt(SCALE // 64) == "0.015625"
    assert fmt(0) == "0"
    assert fmt(3 * SCALE) == "3"
    assert to_decimal(SCALE // 4) == Decimal("0.25")


@given(st.integers(min_value=-(10**15), max_value=10**15))
def test_raw_round_trip(raw):
    assert to_fixed(from_raw(raw)) == raw
    assert to_fixed(fmt(raw)) == raw


def test_scale_override_from_env():
    env = dict(os.environ, OMEGA_FORGE_FP_SCALE="1e-12")
    out = subprocess.run(
        [sys.executable, "-c", "from omega_forge.fixedpoint import SCALE; print(SCALE)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == str(10**12)
