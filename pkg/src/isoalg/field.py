"""Exact arithmetic in prime fields GF(p) and in the rationals.

Characteristic 0 is implemented with exact rationals (fractions.Fraction),
never floating point: every downstream answer (span membership, system
feasibility) is a discrete yes/no and must be bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FieldError(ValueError):
    """Malformed field spec, mismatched operands, or division by zero."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for anything word-sized)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """GF(p) for a prime p, or the rationals when characteristic == 0.

    Elements of GF(p) are plain ints in 0..p-1; rational elements are
    Fractions (canonical: lowest terms, positive denominator). All
    operations are pure, so values are safe to share across threads.
    """

    characteristic: int

    def __post_init__(self):
        c = self.characteristic
        if c != 0 and not is_prime(c):
            raise FieldError(f"characteristic must be 0 or prime, got {c}")
        if c != 0 and c.bit_length() > 62:
            raise FieldError(f"prime {c} exceeds machine-word size")

    # -- element construction / validation ---------------------------------

    def elem(self, x):
        """Canonicalize x into this field; rejects foreign values."""
        p = self.characteristic
        if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
            raise FieldError(f"not a field value: {x!r}")
        if p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise FieldError(f"rational {x} is not a GF({p}) element")
            x = x.numerator
        return x % p

    def check(self, x):
        """Validate that x is already canonical for this field."""
        p = self.characteristic
        if p == 0:
            if not isinstance(x, Fraction):
                raise FieldError(f"expected a rational, got {x!r}")
            return x
        if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < p:
            raise FieldError(f"expected a GF({p}) residue, got {x!r}")
        return x

    @property
    def zero(self):
        return Fraction(0) if self.characteristic == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.characteristic == 0 else 1

    # -- arithmetic --------------------------------------------------------

    def add(self, a, b):
        p = self.characteristic
        return a + b if p == 0 else (a + b) % p

    def sub(self, a, b):
        p = self.characteristic
        return a - b if p == 0 else (a - b) % p

    def mul(self, a, b):
        p = self.characteristic
        return a * b if p == 0 else (a * b) % p

    def neg(self, a):
        p = self.characteristic
        return -a if p == 0 else (-a) % p

    def inv(self, a):
        p = self.characteristic
        if a == 0:
            raise FieldError("division by zero")
        return Fraction(1) / a if p == 0 else pow(a, -1, p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def ops(self, a, b, op: str):
        """Dispatch form of the binary operations; validates both operands."""
        a, b = self.check(a), self.check(b)
        try:
            return {"add": self.add, "sub": self.sub,
                    "mul": self.mul, "div": self.div}[op](a, b)
        except KeyError:
            raise FieldError(f"unknown operation {op!r}") from None

    def elements(self):
        """All field elements; only available for finite fields."""
        p = self.characteristic
        if p == 0:
            raise FieldError("the rationals are not enumerable")
        return range(p)
