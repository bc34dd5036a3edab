"""Exact scalar fields: the rationals and prime fields.

Field elements are plain Python values (``Fraction`` for the rationals,
reduced ``int`` for a prime field), so matrix code can use ordinary
operators and call :meth:`Field.reduce` once per accumulated sum.
"""

from __future__ import annotations

import random
from fractions import Fraction

DEFAULT_PRIME = 2**61 - 1


class Field:
    """Common interface. Subclasses fix the element representation."""

    characteristic: int = 0

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def coerce(self, x):
        raise NotImplementedError

    def reduce(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def div(self, x, y):
        return self.reduce(x * self.inv(y))

    def random_element(self, rng: random.Random):
        raise NotImplementedError

    def sample_size(self) -> int:
        """Size of the set random elements are drawn from (for error bounds)."""
        raise NotImplementedError

    def to_json(self, x):
        raise NotImplementedError

    def from_json(self, v):
        raise NotImplementedError


class Rationals(Field):
    """The field Q. Random elements are integers in ``[-bound, bound]``."""

    def __init__(self, bound: int = 9):
        self.bound = bound

    def coerce(self, x):
        return Fraction(x)

    def reduce(self, x):
        return x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(x)

    def random_element(self, rng):
        return Fraction(rng.randint(-self.bound, self.bound))

    def sample_size(self):
        return 2 * self.bound + 1

    def to_json(self, x):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def from_json(self, v):
        return Fraction(v)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Rationals()"

    def spec(self) -> str:
        return "q"


class PrimeField(Field):
    """The field F_p, elements stored as ints in ``[0, p)``.

    Primality is not checked beyond small trial division; callers pass
    known primes.
    """

    def __init__(self, p: int = DEFAULT_PRIME):
        if p < 2 or any(p % q == 0 for q in range(2, min(p, 1000)) if q * q <= p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p

    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(
                    f"denominator {x.denominator} vanishes in characteristic {self.p}"
                )
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def reduce(self, x):
        return x % self.p

    def inv(self, x):
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def random_element(self, rng):
        return rng.randrange(self.p)

    def sample_size(self):
        return self.p

    def to_json(self, x):
        # balanced residue, so small witnesses print small
        return str(x - self.p if x > self.p // 2 else x)

    def from_json(self, v):
        return int(v) % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def spec(self) -> str:
        return f"fp:{self.p}"


QQ = Rationals()


def parse_field(spec: str) -> Field:
    """Parse ``q`` or ``fp:<prime>`` (``fp`` alone means the default prime)."""
    spec = spec.strip().lower()
    if spec in ("q", "qq", "rationals"):
        return Rationals()
    if spec == "fp":
        return PrimeField()
    if spec.startswith("fp:"):
        try:
            p = int(spec[3:], 0)
        except ValueError:
            raise ValueError(f"bad prime in field spec {spec!r}") from None
        return PrimeField(p)
    raise ValueError(f"unknown field spec {spec!r}; expected 'q' or 'fp:<prime>'")


def derive_rng(seed: int, *task) -> random.Random:
    """Independent RNG for one task, so results do not depend on task order."""
    return random.Random("/".join(map(str, (seed, *task))))
