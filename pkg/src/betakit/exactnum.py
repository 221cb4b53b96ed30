"""Exact arithmetic: rationals, values in Q[sqrt(pi)], and combinatorics.

Gamma and beta values at half-integer arguments live in the ring of finite
sums ``sum_e q_e * pi**(e/2)`` with rational ``q_e``.  Every identity in the
package can be checked for exact equality in that ring.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

Rational = Fraction

RationalLike = Union[int, Fraction]


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError(f"factorial of negative number {n}")
    return math.factorial(n)


def binomial(n: int, k: int) -> int:
    """C(n, k), zero when ``k`` lies outside ``[0, n]``."""
    if n < 0:
        raise ValueError(f"binomial needs n >= 0, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def multinomial(n: int, ks: Iterable[int]) -> int:
    ks = list(ks)
    if any(k < 0 for k in ks):
        raise ValueError(f"multinomial parts must be non-negative: {ks}")
    if sum(ks) != n:
        raise ValueError(f"multinomial parts {ks} do not sum to {n}")
    result = 1
    remaining = n
    for k in ks:
        result *= math.comb(remaining, k)
        remaining -= k
    return result


def compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """Yield every weak composition of ``n`` into ``m`` parts.

    Order is lexicographically descending, so the first tuple is
    ``(n, 0, ..., 0)`` and the last is ``(0, ..., 0, n)``.  There are
    ``C(n + m - 1, m - 1)`` of them.
    """
    if m < 1:
        raise ValueError(f"compositions need m >= 1, got {m}")
    if n < 0:
        raise ValueError(f"compositions need n >= 0, got {n}")
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, m - 1):
            yield (first,) + rest


# --------------------------------------------------------------------------
# Q[sqrt(pi)]


_PI_TERM = re.compile(r"^(?:(?P<coef>\d+(?:/\d+)?)(?:·)?)?(?P<pi>√π|π(?:\^(?:\((?P<num>\d+)/2\)|(?P<int>\d+)))?)?$")


class SqrtPiValue:
    """An immutable finite sum ``sum_e q_e * pi**(e/2)``.

    ``terms`` maps the exponent of ``sqrt(pi)`` to a non-zero rational
    coefficient.  Zero is the empty map.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, RationalLike] | None = None):
        clean = {}
        for e, q in (terms or {}).items():
            if not isinstance(e, int) or e < 0:
                raise ValueError(f"sqrt(pi) exponent must be a non-negative int, got {e!r}")
            q = Fraction(q)
            if q:
                clean[e] = clean.get(e, Fraction(0)) + q
                if not clean[e]:
                    del clean[e]
        self._terms = tuple(sorted(clean.items()))
        self._hash = None

    @classmethod
    def _raw(cls, terms: tuple) -> "SqrtPiValue":
        # terms already sorted, Fraction-valued and free of zeros
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # construction helpers

    @classmethod
    def rational(cls, q: RationalLike) -> "SqrtPiValue":
        return cls({0: q})

    @classmethod
    def monomial(cls, q: RationalLike, e: int) -> "SqrtPiValue":
        return cls({e: q})

    @classmethod
    def coerce(cls, value) -> "SqrtPiValue":
        if isinstance(value, SqrtPiValue):
            return value
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return cls.rational(value)
        raise TypeError(f"cannot represent {value!r} exactly as a SqrtPiValue")

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(e == 0 for e, _ in self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._terms[0][1] if self._terms else Fraction(0)

    # arithmetic

    def __add__(self, other):
        try:
            other = SqrtPiValue.coerce(other)
        except TypeError:
            return NotImplemented
        merged = dict(self._terms)
        for e, q in other._terms:
            total = merged.get(e, 0) + q
            if total:
                merged[e] = total
            else:
                del merged[e]
        return SqrtPiValue._raw(tuple(sorted(merged.items())))

    __radd__ = __add__

    def __neg__(self):
        return SqrtPiValue({e: -q for e, q in self._terms})

    def __sub__(self, other):
        try:
            other = SqrtPiValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = SqrtPiValue.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for e1, q1 in self._terms:
            for e2, q2 in other._terms:
                out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + q1 * q2
        return SqrtPiValue(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = SqrtPiValue.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero SqrtPiValue")
        if not other.is_monomial():
            raise ValueError(f"cannot divide by non-monomial {other}")
        (ed, qd), = other._terms
        out = {}
        for e, q in self._terms:
            if e < ed:
                raise ValueError(f"quotient {self} / {other} leaves a negative power of sqrt(pi)")
            out[e - ed] = q / qd
        return SqrtPiValue(out)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = SqrtPiValue.rational(1)
        for _ in range(k):
            result = result * self
        return result

    # comparison

    def __eq__(self, other):
        try:
            other = SqrtPiValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __float__(self):
        return math.fsum(float(q) * math.pi ** (e / 2) for e, q in self._terms)

    # rendering

    def __repr__(self):
        return f"SqrtPiValue({self.terms!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for i, (e, q) in enumerate(self._terms):
            sign = "-" if q < 0 else "+"
            body = _render_term(abs(q), e)
            if i == 0:
                pieces.append(body if sign == "+" else "-" + body)
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)

    @classmethod
    def parse(cls, text: str) -> "SqrtPiValue":
        """Inverse of ``str``: reads ``"3/4·π^(1/2) - 2·π"`` and the like."""
        s = text.strip()
        if s == "0":
            return cls()
        tokens = re.split(r"\s+([+-])\s+", s)
        signs = ["+"] + tokens[1::2]
        bodies = tokens[0::2]
        if bodies[0].startswith("-"):
            signs[0], bodies[0] = "-", bodies[0][1:]
        out: dict[int, Fraction] = {}
        for sign, body in zip(signs, bodies):
            m = _PI_TERM.match(body)
            if not m or not body:
                raise ValueError(f"unparseable sqrt(pi) term {body!r} in {text!r}")
            coef = Fraction(m.group("coef") or 1)
            pi = m.group("pi")
            if pi is None:
                if m.group("coef") is None:
                    raise ValueError(f"empty term in {text!r}")
                e = 0
            elif pi == "√π":
                e = 1
            elif m.group("num"):
                e = int(m.group("num"))
            elif m.group("int"):
                e = 2 * int(m.group("int"))
            else:
                e = 2
            q = -coef if sign == "-" else coef
            out[e] = out.get(e, Fraction(0)) + q
        return cls(out)


def _render_term(q: Fraction, e: int) -> str:
    if e == 0:
        return str(q)
    if e == 1:
        pi = "π^(1/2)"
    elif e == 2:
        pi = "π"
    elif e % 2 == 0:
        pi = f"π^{e // 2}"
    else:
        pi = f"π^({e}/2)"
    return pi if q == 1 else f"{q}·{pi}"


# --------------------------------------------------------------------------
# half-integer gamma and beta


@dataclass(frozen=True, order=True)
class HalfInteger:
    """A positive multiple of 1/2, stored as ``twice_value``."""

    twice_value: int

    def __post_init__(self):
        if not isinstance(self.twice_value, int) or self.twice_value < 1:
            raise ValueError(f"HalfInteger needs twice_value >= 1, got {self.twice_value!r}")

    @classmethod
    def of(cls, value) -> "HalfInteger":
        if isinstance(value, HalfInteger):
            return value
        if isinstance(value, float) or isinstance(value, bool):
            raise TypeError(f"exact evaluation needs an int or Fraction, got {value!r}")
        q = Fraction(value)
        if q.denominator not in (1, 2):
            raise ValueError(f"{q} is not a multiple of 1/2")
        if q <= 0:
            raise ValueError(f"{q} is not positive")
        return cls(int(2 * q))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __add__(self, other):
        if isinstance(other, HalfInteger):
            return HalfInteger(self.twice_value + other.twice_value)
        if isinstance(other, int):
            return HalfInteger(self.twice_value + 2 * other)
        return NotImplemented

    __radd__ = __add__

    def __str__(self):
        return str(self.value)


def is_half_integer(value) -> bool:
    try:
        HalfInteger.of(value)
    except (TypeError, ValueError):
        return False
    return True


@lru_cache(maxsize=4096)
def _gamma_half_twice(twice: int) -> SqrtPiValue:
    if twice % 2 == 0:
        return SqrtPiValue.rational(math.factorial(twice // 2 - 1))
    n = (twice - 1) // 2
    # Gamma(n + 1/2) = (2n)! / (n! 4^n) * sqrt(pi)
    coef = Fraction(math.factorial(2 * n), math.factorial(n) * 4 ** n)
    return SqrtPiValue.monomial(coef, 1)


def gamma_half(x) -> SqrtPiValue:
    """Gamma at a positive half-integer, exactly."""
    return _gamma_half_twice(HalfInteger.of(x).twice_value)


def beta_exact(xs) -> SqrtPiValue:
    """Multivariate beta ``prod Gamma(x_i) / Gamma(sum x_i)`` at half-integers."""
    hs = [HalfInteger.of(x) for x in xs]
    if len(hs) < 2:
        raise ValueError("beta needs at least two arguments")
    # every gamma value is a monomial, so multiply coefficients and add exponents
    coef, e = Fraction(1), 0
    for h in hs:
        (eh, qh), = _gamma_half_twice(h.twice_value)._terms
        coef *= qh
        e += eh
    (ed, qd), = _gamma_half_twice(sum(h.twice_value for h in hs))._terms
    return SqrtPiValue._raw(((e - ed, coef / qd),))


def beta_int_first(j: int, s: RationalLike) -> Fraction:
    """``B(j + 1, s) = j! / prod_{i=0}^{j} (s + i)`` for any positive rational s."""
    s = Fraction(s)
    if s <= 0:
        raise ValueError(f"B(j+1, s) needs s > 0, got {s}")
    if j < 0:
        raise ValueError(f"B(j+1, s) needs j >= 0, got {j}")
    denom = Fraction(1)
    for i in range(j + 1):
        denom *= s + i
    return math.factorial(j) / denom
