"""Exact univariate root counting and certified isolation.

Polynomials carry `fractions.Fraction` coefficients so Sturm chains, sign
variations and endpoint handling are exact. Counting uses the half-open
convention: count_real_roots_in(p, a, b) is the number of distinct real roots
in (a, b]. Roots landing exactly on an endpoint are divided out by synthetic
division before the chain is evaluated (exact, unlike an epsilon nudge) and
re-added when the convention includes them; isolation reports such roots as
degenerate [r, r] intervals.

Isolation bisects on rational endpoints until each interval holds one root,
refines to the requested width, then applies a single guarded Newton step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "Polynomial",
    "RootInterval",
    "sturm_sequence",
    "count_real_roots_in",
    "isolate_and_refine",
    "NEG_INF",
    "POS_INF",
]

NEG_INF = float("-inf")
POS_INF = float("inf")

Rational = Union[int, Fraction, str]


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 15) if not x.is_integer() else Fraction(int(x))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class Polynomial:
    """Exact-coefficient polynomial, coefficients low degree first."""

    coeffs: tuple[Fraction, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Rational]) -> "Polynomial":
        cs = [_to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs))

    @classmethod
    def monomial(cls, coeff: Rational, degree: int) -> "Polynomial":
        return cls.from_coeffs([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial: -1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    # --- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return Polynomial.from_coeffs([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return Polynomial.from_coeffs([c * other for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1) \
            if self.coeffs and other.coeffs else []
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial.from_coeffs(out)

    __rmul__ = __mul__

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quo = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        d = other.degree
        lc = other.leading
        while len(rem) - 1 >= d and rem:
            k = len(rem) - 1 - d
            q = rem[-1] / lc
            quo[k] = q
            for i, c in enumerate(other.coeffs):
                rem[k + i] -= q * c
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial.from_coeffs(quo), Polynomial.from_coeffs(rem)

    def derivative(self) -> "Polynomial":
        return Polynomial.from_coeffs(
            [i * c for i, c in enumerate(self.coeffs)][1:])

    # --- evaluation ---------------------------------------------------------

    def eval_exact(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    # --- normal forms -------------------------------------------------------

    def content_normalized(self) -> "Polynomial":
        """Primitive integer form with positive leading coefficient."""
        if self.is_zero:
            return self
        denom = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [c * denom for c in self.coeffs]
        g = 0
        for c in ints:
            g = math.gcd(g, abs(int(c)))
        sign = 1 if ints[-1] > 0 else -1
        return Polynomial.from_coeffs([int(c) * sign // g for c in ints])

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero:
            _, r = a.divmod(b)
            a, b = b, r
        if a.is_zero:
            return a
        return a * (1 / a.leading)

    def square_free_part(self) -> "Polynomial":
        if self.degree <= 1:
            return self
        g = self.gcd(self.derivative())
        if g.degree <= 0:
            return self
        q, r = self.divmod(g)
        assert r.is_zero
        return q

    def deflate_root(self, r: Fraction) -> "Polynomial":
        """Divide out (x - r); requires r to be an exact root."""
        q, rem = self.divmod(Polynomial.from_coeffs([-r, 1]))
        if not rem.is_zero:
            raise ValueError(f"{r} is not a root")
        return q

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            parts.append(f"{c}*x^{i}" if i else f"{c}")
        return " + ".join(parts)


def sturm_sequence(p: Polynomial) -> list[Polynomial]:
    """Canonical chain p0 = p, p1 = p', p_(i+1) = -rem(p_(i-1), p_i)."""
    if p.is_zero:
        raise ValueError("Sturm chain of the zero polynomial")
    chain = [p]
    if p.degree == 0:
        return chain
    chain.append(p.derivative())
    while chain[-1].degree > 0:
        _, r = chain[-2].divmod(chain[-1])
        if r.is_zero:
            break
        chain.append(-r)
    return chain


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sign_at(poly: Polynomial, x) -> int:
    if poly.is_zero:
        return 0
    if x == POS_INF:
        return _sign(poly.leading)
    if x == NEG_INF:
        return _sign(poly.leading) * (-1 if poly.degree % 2 else 1)
    return _sign(poly.eval_exact(x))


def _variations(chain: Sequence[Polynomial], x) -> int:
    signs = [s for s in (_sign_at(q, x) for q in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _as_endpoint(x):
    if x == POS_INF or x == NEG_INF:
        return x
    return _to_fraction(x)


def count_real_roots_in(p: Polynomial, a, b) -> int:
    """Distinct real roots of p in the half-open interval (a, b]."""
    if p.is_zero:
        raise ValueError("root counting on the zero polynomial")
    if p.degree == 0:
        return 0
    a = _as_endpoint(a)
    b = _as_endpoint(b)
    if not a < b:
        raise ValueError("need a < b")
    q = p.square_free_part()
    extra = 0
    if a != NEG_INF and q.eval_exact(a) == 0:
        q = q.deflate_root(a)  # a itself is excluded from (a, b]
    if b != POS_INF and q.eval_exact(b) == 0:
        q = q.deflate_root(b)
        extra += 1            # b belongs to (a, b]
    if q.degree <= 0:
        return extra
    chain = sturm_sequence(q)
    return _variations(chain, a) - _variations(chain, b) + extra


@dataclass(frozen=True)
class RootInterval:
    """Certified isolating interval (lo, hi] with a refined float estimate."""

    lo: Fraction
    hi: Fraction
    value: float
    certified: bool = True


def _cauchy_bound(p: Polynomial) -> Fraction:
    lc = abs(p.leading)
    m = max((abs(c) for c in p.coeffs[:-1]), default=Fraction(0))
    return 1 + m / lc


def isolate_and_refine(p: Polynomial, a=NEG_INF, b=POS_INF,
                       width: float = 1e-12) -> list[RootInterval]:
    """Isolating intervals for every distinct real root of p in (a, b],
    bisected to `width` and polished with one guarded Newton step."""
    if p.is_zero or p.degree == 0:
        return []
    q = p.square_free_part()
    a = _as_endpoint(a)
    b = _as_endpoint(b)
    results: list[RootInterval] = []
    if a != NEG_INF and q.eval_exact(a) == 0:
        q = q.deflate_root(a)
    if b != POS_INF and q.eval_exact(b) == 0:
        q = q.deflate_root(b)
        results.append(RootInterval(b, b, float(b)))
    if q.degree <= 0:
        return results
    bound = _cauchy_bound(q)
    lo = a if a != NEG_INF else -bound
    hi = b if b != POS_INF else bound
    if not lo < hi:
        return results
    chain = sturm_sequence(q)

    def count(x, y) -> int:
        return _variations(chain, x) - _variations(chain, y)

    width_fr = _to_fraction(width) if width > 0 else Fraction(1, 10 ** 12)
    dq = q.derivative()
    stack = [(lo, hi, count(lo, hi))]
    isolated: list[tuple[Fraction, Fraction]] = []
    while stack:
        x, y, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            isolated.append((x, y))
            continue
        mid = (x + y) / 2
        left = count(x, mid)
        stack.append((x, mid, left))
        stack.append((mid, y, n - left))
    for x, y in isolated:
        while y - x > width_fr:
            mid = (x + y) / 2
            if count(x, mid) == 1:
                y = mid
            else:
                x = mid
        est = float(x + y) / 2.0
        deriv = dq.eval_float(est)
        if deriv != 0.0:
            newton = est - q.eval_float(est) / deriv
            if float(x) <= newton <= float(y) and \
                    abs(q.eval_float(newton)) <= abs(q.eval_float(est)):
                est = newton
        results.append(RootInterval(x, y, est))
    results.sort(key=lambda r: r.value)
    return results
