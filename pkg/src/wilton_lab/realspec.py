"""Presentations of a point x in (0, 1).

Three variants are supported:

* :class:`Rational` -- an exact reduced fraction ``num/den``.
* :class:`Dyadic` -- ``bits / 2**width``, the form random samples take.
* :class:`CFCoeffs` -- explicit partial quotients ``[0; a1, a2, ...]``,
  either terminating or ending in a repeating block.

Text syntax (used by the CLI)::

    13/29                 Rational
    0xDEADBEEF/2^64       Dyadic (hex or decimal numerator)
    dyadic:42             Dyadic, 64 random bits drawn from seed 42
    [0;2,4,3]             terminating continued fraction
    [0;(1)]               golden ratio conjugate, (sqrt(5)-1)/2
    [0;1,(2)]             prefix followed by a repeating block
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DomainError, ParseError


@dataclass(frozen=True)
class Rational:
    num: int
    den: int

    def __post_init__(self):
        if not (0 < self.num < self.den):
            raise DomainError(f"Rational needs 0 < num < den, got {self.num}/{self.den}")
        if math.gcd(self.num, self.den) != 1:
            raise DomainError(f"Rational {self.num}/{self.den} is not reduced")

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)


@dataclass(frozen=True)
class Dyadic:
    bits: int
    width: int = 64

    def __post_init__(self):
        if self.width < 1:
            raise DomainError("Dyadic width must be positive")
        if not (0 < self.bits < (1 << self.width)):
            raise DomainError(f"Dyadic needs 0 < bits < 2^{self.width}")

    def to_fraction(self) -> Fraction:
        return Fraction(self.bits, 1 << self.width)


@dataclass(frozen=True)
class CFCoeffs:
    """``[0; prefix..., (period...)]``; ``period=None`` means the expansion stops."""

    prefix: Tuple[int, ...] = ()
    period: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(a) for a in self.prefix))
        if self.period is not None:
            object.__setattr__(self, "period", tuple(int(a) for a in self.period))
            if not self.period:
                raise DomainError("periodic tail must be nonempty")
        if any(a < 1 for a in self.prefix + (self.period or ())):
            raise DomainError("partial quotients must be >= 1")
        if self.period is None:
            if not self.prefix:
                raise DomainError("terminating CF needs at least one quotient")
            if self.prefix[-1] == 1 and len(self.prefix) > 1:
                # [0; ..., a, 1] == [0; ..., a+1]; keep the canonical form only
                raise DomainError("terminating CF must not end in 1")
            if self.prefix == (1,):
                raise DomainError("[0;1] equals 1, outside (0,1)")

    @property
    def terminates(self) -> bool:
        return self.period is None

    def quotient(self, k: int) -> int:
        """Partial quotient a_k, k >= 1."""
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        if self.period is None:
            raise IndexError(k)
        return self.period[(k - len(self.prefix) - 1) % len(self.period)]

    def to_fraction(self) -> Fraction:
        if self.period is not None:
            raise DomainError("periodic CF is irrational")
        x = Fraction(0)
        for a in reversed(self.prefix):
            x = 1 / (a + x)
        return x


RealSpec = Union[Rational, Dyadic, CFCoeffs]


def is_exact_rational(x: RealSpec) -> bool:
    return isinstance(x, (Rational, Dyadic)) or (isinstance(x, CFCoeffs) and x.terminates)


def dyadic_from_seed(seed: int, width: int = 64) -> Dyadic:
    rng = np.random.Generator(np.random.Philox(key=seed % (1 << 64)))
    while True:
        words = rng.integers(0, 1 << 32, size=(width + 31) // 32, dtype=np.uint64)
        bits = 0
        for w in words:
            bits = (bits << 32) | int(w)
        bits &= (1 << width) - 1
        if bits:
            return Dyadic(bits, width)


_RAT = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*$")
_DYA = re.compile(r"^\s*(0[xX][0-9a-fA-F]+|\d+)\s*/\s*2\s*\^\s*(\d+)\s*$")
_SEED = re.compile(r"^\s*dyadic\s*:\s*(\d+)\s*$")
_CF = re.compile(r"^\s*\[\s*0\s*;(.*)\]\s*$")


def _int_list(text: str) -> Tuple[int, ...]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not all(t.isdigit() for t in items):
        raise ParseError(f"bad partial quotient list: {text!r}")
    return tuple(int(t) for t in items)


def parse_realspec(text: str) -> RealSpec:
    """Parse the CLI syntax documented in the module docstring."""
    try:
        if m := _DYA.match(text):
            return Dyadic(int(m.group(1), 0), int(m.group(2)))
        if m := _SEED.match(text):
            return dyadic_from_seed(int(m.group(1)))
        if m := _RAT.match(text):
            return Rational(int(m.group(1)), int(m.group(2)))
        if m := _CF.match(text):
            body = m.group(1).strip()
            period = None
            if "(" in body:
                head, sep, rest = body.partition("(")
                if not rest.endswith(")") or ")" in rest[:-1]:
                    raise ParseError(f"bad periodic block in {text!r}")
                period = _int_list(rest[:-1])
                head = head.strip().rstrip(",")
                prefix = _int_list(head) if head.strip() else ()
            else:
                prefix = _int_list(body)
            return CFCoeffs(prefix, period)
    except DomainError as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"cannot parse real spec {text!r}")


def format_realspec(x: RealSpec) -> str:
    if isinstance(x, Rational):
        return f"{x.num}/{x.den}"
    if isinstance(x, Dyadic):
        return f"{x.bits:#x}/2^{x.width}"
    parts = [str(a) for a in x.prefix]
    if x.period is not None:
        parts.append("(" + ",".join(str(a) for a in x.period) + ")")
    return "[0;" + ",".join(parts) + "]"
