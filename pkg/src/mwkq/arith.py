"""Exact arithmetic over Q: places, factorization, residue and Hilbert symbols.

Everything here is exact (fractions.Fraction, integer modular arithmetic);
nothing is floating point.  Conventions that the rest of the package leans on:

* a "place" is the real place or a finite prime p;
* square classes are represented by squarefree integers;
* the tame symbol at an odd prime p is the class of
      (-1)^{v(a) v(b)} * a^{v(b)} * b^{-v(a)}  mod p,
  which is antisymmetric: tame(a, b) * tame(b, a) = 1 in F_p^x;
* the quadratic Hilbert symbol at p = 2 uses the eps/omega congruence
  formula on odd parts (eps(u) = (u-1)/2, omega(u) = (u^2-1)/8 mod 2).
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import FactorizationOverflow, NotOddPrime, NotPrime, ZeroInput

Rational = Fraction

DEFAULT_MAX_FACTOR_DIGITS = 16
_max_factor_digits = DEFAULT_MAX_FACTOR_DIGITS


def set_max_factor_digits(n: int) -> None:
    """Set the global digit cap used when no explicit cap is passed."""
    global _max_factor_digits
    if n < 1:
        raise ValueError("digit cap must be positive")
    _max_factor_digits = n


def get_max_factor_digits() -> int:
    return _max_factor_digits


@dataclass(frozen=True)
class Place:
    """The real place (p is None) or a finite prime p."""

    p: int | None = None

    @staticmethod
    def real() -> "Place":
        return Place(None)

    @staticmethod
    def finite(p: int) -> "Place":
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        return Place(p)

    @property
    def is_real(self) -> bool:
        return self.p is None

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)

    def __lt__(self, other: "Place") -> bool:
        # real place sorts first, then primes in order
        if self.p is None:
            return other.p is not None
        if other.p is None:
            return False
        return self.p < other.p


REAL = Place.real()


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any factorization cap."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
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


@lru_cache(maxsize=4096)
def _factor_positive(n: int) -> tuple[tuple[int, int], ...]:
    # pure trial division; the caller has already enforced the digit cap,
    # so the cache is an idempotent lookup keyed only by n
    assert n >= 1
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


@dataclass(frozen=True)
class Factorization:
    """sign * prod p^e, exponents possibly negative (denominator primes)."""

    sign: int
    exponents: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.exponents)

    def value(self) -> Fraction:
        v = Fraction(self.sign)
        for p, e in self.exponents:
            v *= Fraction(p) ** e
        return v


def _check_digits(n: int, max_digits: int) -> None:
    if len(str(abs(n))) > max_digits:
        raise FactorizationOverflow(
            f"{n} exceeds the {max_digits}-digit factorization cap"
        )


def factorize(x: Rational | int, max_digits: int | None = None) -> Factorization:
    """Exact factorization of a nonzero rational.

    Trial division with a hard digit cap (FactorizationOverflow beyond it);
    the cap is checked before any work is attempted.
    """
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("cannot factor 0")
    cap = _max_factor_digits if max_digits is None else max_digits
    _check_digits(x.numerator, cap)
    _check_digits(x.denominator, cap)
    exps: dict[int, int] = {}
    for p, e in _factor_positive(abs(x.numerator)):
        exps[p] = exps.get(p, 0) + e
    for p, e in _factor_positive(x.denominator):
        exps[p] = exps.get(p, 0) - e
    pairs = tuple(sorted((p, e) for p, e in exps.items() if e != 0))
    return Factorization(1 if x > 0 else -1, pairs)


def ord_p(x: Rational | int, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("ord of 0")
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x: Rational, p: int) -> Fraction:
    return Fraction(x) / Fraction(p) ** ord_p(x, p)


def square_class(x: Rational | int, max_digits: int | None = None) -> int:
    """The unique squarefree integer d with x/d a rational square."""
    f = factorize(x, max_digits)
    d = f.sign
    for p, e in f.exponents:
        if e % 2:
            d *= p
    return d


def square_class_mul(d1: int, d2: int) -> int:
    """Product of square classes given by squarefree representatives.

    gcd arithmetic only, so huge products never need refactoring:
    d1 d2 = g^2 (d1/g)(d2/g) with g = gcd.
    """
    g = math.gcd(d1, d2)
    return (d1 // g) * (d2 // g)


def legendre(a: Rational | int, p: int) -> int:
    """Legendre symbol (a|p) in {-1, 0, +1} for an odd prime p.

    Rational a is fine: (n/d | p) = (n d | p) since d^2 is a square.
    """
    if p == 2 or not is_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime")
    a = Fraction(a)
    m = a.numerator * a.denominator % p
    if m == 0:
        return 0
    r = pow(m, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def unit_mod_p(x: Rational, p: int) -> int:
    """Least positive residue of a p-unit rational in F_p^x."""
    x = Fraction(x)
    n, d = x.numerator % p, x.denominator % p
    if n == 0 or d == 0:
        raise ZeroInput(f"{x} is not a {p}-unit")
    return n * pow(d, -1, p) % p


@lru_cache(maxsize=512)
def least_nonresidue(p: int) -> int:
    """Smallest positive quadratic nonresidue mod an odd prime."""
    for u in range(2, p):
        if legendre(u, p) == -1:
            return u
    raise NotOddPrime(f"{p} has no nonresidue")


def tame_symbol(a: Rational | int, b: Rational | int, p: int) -> int:
    """Tame symbol at an odd prime p, valued in F_p^x (least positive residue).

    class of (-1)^{v(a) v(b)} * a^{v(b)} * b^{-v(a)} mod p.
    """
    if p == 2 or not is_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime")
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ZeroInput("tame symbol of 0")
    va, vb = ord_p(a, p), ord_p(b, p)
    t = Fraction(-1) ** (va * vb) * a**vb * b**-va
    return unit_mod_p(t, p)


def _eps2(u: int) -> int:
    return (u - 1) // 2 % 2


def _omega2(u: int) -> int:
    return (u * u - 1) // 8 % 2


def _odd_residue(x: Rational) -> int:
    # odd part of x mod 8; denominators invert to themselves since d^2 = 1 (8)
    x = Fraction(x)
    n = x.numerator // 2 ** ord_p(x.numerator, 2) if x.numerator % 2 == 0 else x.numerator
    return n * x.denominator % 8


def hilbert_classical(a: Rational | int, b: Rational | int, place: Place) -> int:
    """Quadratic Hilbert symbol (a, b)_v in {+1, -1}.

    real: -1 iff both arguments are negative.
    odd p: (-1|p)^{v(a) v(b)} (u_a|p)^{v(b)} (u_b|p)^{v(a)} on unit parts.
    p = 2: (-1)^{eps(u_a) eps(u_b) + v(a) omega(u_b) + v(b) omega(u_a)}.
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ZeroInput("Hilbert symbol of 0")
    if place.is_real:
        return -1 if a < 0 and b < 0 else 1
    p = place.p
    va, vb = ord_p(a, p), ord_p(b, p)
    ua, ub = unit_part(a, p), unit_part(b, p)
    if p == 2:
        ra, rb = _odd_residue(ua), _odd_residue(ub)
        exp = _eps2(ra) * _eps2(rb) + va * _omega2(rb) + vb * _omega2(ra)
        return -1 if exp % 2 else 1
    s = 1
    if va * vb % 2:
        s *= legendre(-1, p)
    if vb % 2:
        s *= legendre(ua, p)
    if va % 2:
        s *= legendre(ub, p)
    return s


def mu_order(place: Place) -> int:
    """Order of the roots of unity of the local field at the place."""
    if place.is_real or place.p == 2:
        return 2
    return place.p - 1


def primes_of(x: Rational | int, max_digits: int | None = None) -> tuple[int, ...]:
    """Primes dividing numerator or denominator."""
    return tuple(p for p, _ in factorize(x, max_digits).exponents)
