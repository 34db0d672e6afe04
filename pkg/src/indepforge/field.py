"""Exact base fields: prime fields GF(p) and the rationals.

Scalars are plain Python values (``int`` in ``[0, p)`` or ``Fraction``);
vectors and matrices are numpy arrays (``int64`` for GF(p), ``object``
for QQ).  Every array returned by a :class:`Field` method is reduced.
"""

from __future__ import annotations

import re
from fractions import Fraction

import numpy as np

_INT64_LIMIT = 2**63 - 1


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """GF(p) for prime ``p < 2**31`` when ``p`` is given, QQ otherwise."""

    def __init__(self, p: int | None = None):
        if p is not None:
            p = int(p)
            if not (_is_prime(p) and p < 2**31):
                raise ValueError(f"GF({p}): modulus must be a prime below 2^31")
        self.p = p
        self.dtype = np.int64 if p is not None else object

    @classmethod
    def parse(cls, spec) -> "Field":
        if isinstance(spec, Field):
            return spec
        if isinstance(spec, int):
            return cls(spec)
        s = str(spec).strip().replace(" ", "")
        if s.upper() in ("QQ", "Q"):
            return cls(None)
        m = re.fullmatch(r"(?:GF|F)\(?(\d+)\)?", s, flags=re.IGNORECASE)
        if not m:
            raise ValueError(f"unknown field spec {spec!r}; use 'GF(p)' or 'QQ'")
        return cls(int(m.group(1)))

    def __repr__(self) -> str:
        return f"GF({self.p})" if self.p is not None else "QQ"

    __str__ = __repr__

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Field", self.p))

    @property
    def is_prime(self) -> bool:
        return self.p is not None

    # -- scalars ---------------------------------------------------------

    def __call__(self, value):
        """Coerce an int, Fraction or ``"a/b"`` string into the field."""
        if isinstance(value, str):
            value = Fraction(value)
        if self.p is None:
            v = Fraction(value)
            return v if v.denominator != 1 else int(v)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator {value.denominator} vanishes in {self}")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by the zero scalar")
        if self.p is None:
            return 1 / Fraction(a)
        return pow(int(a), -1, self.p)

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def to_str(self, a) -> str:
        """Canonical printable form; GF(p) values use the symmetric range."""
        if self.p is None:
            return str(Fraction(a))
        a = int(a) % self.p
        return str(a - self.p) if a > self.p // 2 else str(a)

    def from_json(self, s):
        return self(Fraction(s) if isinstance(s, str) else s)

    # -- arrays ----------------------------------------------------------

    def reduce(self, arr):
        if self.p is None:
            return arr
        return np.mod(arr, self.p)

    def array(self, data) -> np.ndarray:
        if self.p is None:
            a = np.array(data, dtype=object)
            return a
        a = np.array(data, dtype=object) if not isinstance(data, np.ndarray) else data
        if a.dtype == object:
            a = np.vectorize(self.__call__, otypes=[np.int64])(a) if a.size else a.astype(np.int64)
        return np.mod(a.astype(np.int64), self.p)

    def zeros(self, shape) -> np.ndarray:
        if self.p is None:
            z = np.empty(shape, dtype=object)
            z.fill(0)
            return z
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        e = self.zeros((n, n))
        for i in range(n):
            e[i, i] = 1
        return e

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact product; falls back to Python ints when int64 could overflow."""
        if self.p is None:
            return a @ b
        inner = a.shape[-1] if a.ndim else 1
        if (self.p - 1) ** 2 * max(inner, 1) <= _INT64_LIMIT:
            return np.mod(a @ b, self.p)
        out = a.astype(object) @ b.astype(object)
        return np.mod(out, self.p).astype(np.int64)

    def is_zero(self, arr) -> bool:
        return not np.any(arr)

    def equal(self, a, b) -> bool:
        return a.shape == b.shape and not np.any(self.reduce(a - b))

    def random_array(self, rng, shape, low: int = -3, high: int = 3) -> np.ndarray:
        """Uniform over GF(p); small integers over QQ."""
        size = int(np.prod(shape)) if shape else 1
        if self.p is not None:
            vals = [rng.randrange(self.p) for _ in range(size)]
        else:
            vals = [rng.randint(low, high) for _ in range(size)]
        return self.array(np.array(vals, dtype=object).reshape(shape))

    def random_scalar(self, rng, nonzero: bool = False):
        while True:
            v = rng.randrange(self.p) if self.p is not None else rng.randint(-3, 3)
            if v or not nonzero:
                return self(v)

    def elements(self):
        """Iterate the prime field (only for GF(p))."""
        if self.p is None:
            raise ValueError("QQ is infinite")
        return range(self.p)
