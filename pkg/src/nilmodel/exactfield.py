"""Exact arithmetic in Q and in real quadratic fields Q(sqrt d).

Rationals are plain :class:`fractions.Fraction`. Elements of Q(sqrt d) are
:class:`QuadFieldElem` values ``a + b*sqrt(d)`` with rational ``a, b``. Both
kinds mix freely: an int or Fraction is promoted to the quadratic field of
the other operand.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

Rational = Fraction
Scalar = Union[int, Fraction, "QuadFieldElem"]

# bits of sqrt(d) carried when producing float embeddings
_EMBED_BITS = 200


class FieldMismatch(ValueError):
    """Two quadratic field elements with different d were combined."""


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


@dataclass(frozen=True, eq=False, slots=True)
class QuadFieldElem:
    """The number ``a + b*sqrt(d)`` for squarefree ``d > 1``."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))
        if not _valid_d(self.d):
            raise ValueError(f"d must be a squarefree integer > 1, got {self.d}")

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> QuadFieldElem | None:
        if isinstance(other, QuadFieldElem):
            if other.d != self.d:
                raise FieldMismatch(f"Q(sqrt {self.d}) vs Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadFieldElem(Fraction(other), Fraction(0), self.d)
        return None

    # -- ring operations --------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadFieldElem(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadFieldElem(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadFieldElem(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadFieldElem(self.a * other, self.b * other, self.d)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadFieldElem(
            self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def inverse(self) -> QuadFieldElem:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt d)")
        return QuadFieldElem(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt d)")
            return QuadFieldElem(self.a / other, self.b / other, self.d)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadFieldElem(Fraction(1), Fraction(0), self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- Galois structure -------------------------------------------------
    def conjugate(self) -> QuadFieldElem:
        return QuadFieldElem(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_rational(self) -> bool:
        return self.b == 0

    # -- order (principal embedding) --------------------------------------
    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with d b^2
        lhs, rhs = self.a * self.a, self.d * self.b * self.b
        return sa if lhs > rhs else sb

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare with {other!r}")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, QuadFieldElem):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return embed(self, "principal")

    def __repr__(self):
        return f"QuadFieldElem({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_element(self)


@lru_cache(maxsize=None)
def _valid_d(d: int) -> bool:
    return isinstance(d, int) and d > 1 and is_squarefree(d)


@lru_cache(maxsize=None)
def _sqrt_fixed(d: int) -> int:
    """floor(sqrt(d) * 2**_EMBED_BITS)."""
    return math.isqrt(d << (2 * _EMBED_BITS))


def embed(x: Scalar, which: str = "principal") -> float:
    """Real embedding of ``x`` as a float, correct to well beyond 50 bits."""
    if isinstance(x, (int, Fraction)):
        return float(x)
    if which not in ("principal", "conjugate"):
        raise ValueError(f"unknown embedding {which!r}")
    b = x.b if which == "principal" else -x.b
    if b == 0:
        return float(x.a)
    s = Fraction(_sqrt_fixed(x.d), 1 << _EMBED_BITS)
    return float(x.a + b * s)


def conjugate(x: Scalar) -> Scalar:
    if isinstance(x, QuadFieldElem):
        return x.conjugate()
    return x


def norm(x: Scalar) -> Fraction:
    if isinstance(x, QuadFieldElem):
        return x.norm()
    return Fraction(x) * Fraction(x)


def field_arith(op: str, x: Scalar, y: Scalar) -> Scalar:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if y == 0:
            raise ZeroDivisionError("division by zero")
        if isinstance(x, int) and isinstance(y, int):
            return Fraction(x, y)
        return x / y
    if op == "neg":
        return -x
    raise ValueError(f"unknown op {op!r}")


def sign(x: Scalar) -> int:
    if isinstance(x, QuadFieldElem):
        return x.sign()
    return (x > 0) - (x < 0)


class Field:
    """Coefficient field descriptor: Q when ``d is None``, else Q(sqrt d)."""

    __slots__ = ("d",)

    def __init__(self, d: int | None = None):
        if d is not None and not _valid_d(d):
            raise ValueError(f"d must be a squarefree integer > 1, got {d}")
        self.d = d

    def __eq__(self, other):
        return isinstance(other, Field) and other.d == self.d

    def __hash__(self):
        return hash(("Field", self.d))

    def __repr__(self):
        return f"Field({self.d})"

    def __str__(self):
        return "Q" if self.d is None else f"Q(sqrt {self.d})"

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.d is None else QuadFieldElem(0, 0, self.d)

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.d is None else QuadFieldElem(1, 0, self.d)

    @property
    def sqrt(self) -> QuadFieldElem:
        if self.d is None:
            raise ValueError("Q has no sqrt(d) generator")
        return QuadFieldElem(0, 1, self.d)

    def __call__(self, x) -> Scalar:
        """Coerce an int, Fraction, string or field element into this field."""
        if isinstance(x, str):
            x = parse_element(x, self.d)
        if isinstance(x, QuadFieldElem):
            if self.d is None:
                if x.b != 0:
                    raise FieldMismatch(f"{x} is not rational")
                return x.a
            if x.d != self.d:
                raise FieldMismatch(f"{x} not in {self}")
            return x
        if isinstance(x, (int, Fraction)):
            return Fraction(x) if self.d is None else QuadFieldElem(Fraction(x), 0, self.d)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def contains(self, x) -> bool:
        if isinstance(x, QuadFieldElem):
            return x.d == self.d or (x.b == 0 and self.d is None)
        return isinstance(x, (int, Fraction))

    @classmethod
    def parse(cls, text: str) -> Field:
        t = text.replace(" ", "")
        if t in ("Q", "QQ"):
            return cls(None)
        m = re.fullmatch(r"Q\(sqrt\(?(\d+)\)?\)", t)
        if not m:
            raise ValueError(f"bad field syntax {text!r}; expected Q or Q(sqrt d)")
        return cls(int(m.group(1)))


_TERM_RE = re.compile(r"([+-]?)([^+-]+)")
_SQRT_RE = re.compile(r"^(?:(\d+(?:/\d+)?)\*)?sqrt\((\d+)\)$")
_RAT_RE = re.compile(r"^\d+(?:/\d+)?$")


def parse_element(text: str, d: int | None = None) -> Scalar:
    """Parse ``a``, ``a/b``, ``b*sqrt(d)`` or ``a+b*sqrt(d)`` (spaces ignored)."""
    t = text.replace(" ", "")
    terms = _TERM_RE.findall(t)
    if not t or "".join(s + body for s, body in terms) != t or len(terms) > 2:
        raise ValueError(f"bad field element syntax {text!r}")
    a = b = None
    dd = None
    for sgn, body in terms:
        m = _SQRT_RE.match(body)
        if m:
            if b is not None:
                raise ValueError(f"bad field element syntax {text!r}")
            b = Fraction(m.group(1) or 1)
            b = -b if sgn == "-" else b
            dd = int(m.group(2))
        elif _RAT_RE.match(body) and a is None and b is None:
            a = Fraction(body)
            a = -a if sgn == "-" else a
        else:
            raise ValueError(f"bad field element syntax {text!r}")
    a = a or Fraction(0)
    if dd is None:
        return a if d is None else QuadFieldElem(a, 0, d)
    if d is not None and dd != d:
        raise FieldMismatch(f"sqrt({dd}) in an element of Q(sqrt {d})")
    return QuadFieldElem(a, b, dd)


def format_element(x: Scalar) -> str:
    """Inverse of :func:`parse_element`."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if x.b == 0:
        return str(x.a)
    bpart = "sqrt(%d)" % x.d if abs(x.b) == 1 else f"{abs(x.b)}*sqrt({x.d})"
    if x.a == 0:
        return ("-" if x.b < 0 else "") + bpart
    return f"{x.a}{'-' if x.b < 0 else '+'}{bpart}"


def integral_basis_generator(d: int) -> QuadFieldElem:
    """omega with O_K = Z + Z*omega for K = Q(sqrt d)."""
    if d % 4 == 1:
        return QuadFieldElem(Fraction(1, 2), Fraction(1, 2), d)
    return QuadFieldElem(0, 1, d)


def integer_coords(x: Scalar, d: int) -> tuple[Fraction, Fraction]:
    """Coordinates (u, v) of x in the basis (1, omega) of O_K."""
    x = Field(d)(x)
    w = integral_basis_generator(d)
    v = x.b / w.b
    u = x.a - v * w.a
    return u, v


def is_algebraic_integer(x: Scalar, d: int) -> bool:
    u, v = integer_coords(x, d)
    return u.denominator == 1 and v.denominator == 1
