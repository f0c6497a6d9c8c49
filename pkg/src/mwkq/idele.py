"""Finite-support ideles in section coordinates.

An idele stores a real component and finitely many prime components, each a
K1Local pair (u, twist); every unlisted prime implicitly carries the identity
(1, 0).  Arbitrary local field elements are not finitely representable, so u
is always rational; this covers everything the volume, diagonal, kernel and
parity statements need.

The diagonal of a degree-1 expression is truncated to its stored support:
components at primes away from the entries (and 2) are provably integral and
are not materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import REAL, Place, is_prime, ord_p
from .errors import DegreeMismatch, NotInKernel, NotPrime, PlaceMismatch
from .localsym import K1Local, k1_local_add, k1_local_eq, k1_local_make, local_section
from .mwcore import MwExpr


def _identity(v: Place) -> K1Local:
    return K1Local(v, Fraction(1), 0)


def _is_identity(c: K1Local) -> bool:
    if c.u != 1:
        return False
    return c.twist == 0 if c.place.is_real else c.twist % 2 == 0


@dataclass(frozen=True)
class MwIdele:
    real: K1Local
    finite: tuple[tuple[int, K1Local], ...]  # sorted, identity components dropped

    def component(self, v: Place) -> K1Local:
        if v.is_real:
            return self.real
        for p, c in self.finite:
            if p == v.p:
                return c
        return _identity(v)

    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.finite)


def make_idele(real: K1Local | None = None, finite=None) -> MwIdele:
    if real is None:
        real = _identity(REAL)
    if not real.place.is_real:
        raise PlaceMismatch("real slot holds a finite-place component")
    comps = []
    for p, c in sorted((finite or {}).items() if isinstance(finite, dict) else (finite or ())):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if c.place != Place(p):
            raise PlaceMismatch(f"component at {p} tagged {c.place}")
        c = k1_local_make(c.u, c.twist, c.place)
        if not _is_identity(c):
            comps.append((p, c))
    return MwIdele(real, tuple(comps))


def idele_add(x: MwIdele, y: MwIdele) -> MwIdele:
    real = k1_local_add(x.real, y.real)
    finite = {}
    for p in sorted(set(x.support()) | set(y.support())):
        v = Place(p)
        finite[p] = k1_local_add(x.component(v), y.component(v))
    return make_idele(real, finite)


def idele_eq(x: MwIdele, y: MwIdele) -> bool:
    if not k1_local_eq(x.real, y.real):
        return False
    for p in set(x.support()) | set(y.support()):
        v = Place(p)
        if not k1_local_eq(x.component(v), y.component(v)):
            return False
    return True


def is_integral_at(x: MwIdele, p: int) -> bool:
    """No boundary at p: unit u, and (away from 2) no defect twist.

    At p = 2 the local defect group sits inside the integral subgroup, so
    both twist values are integral there.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    c = x.component(Place(p))
    if ord_p(c.u, p) != 0:
        return False
    return p == 2 or c.twist % 2 == 0


def vol(x: MwIdele) -> Fraction:
    """Product of normalized absolute values of the unit coordinates, exact."""
    out = abs(x.real.u)
    for p, c in x.finite:
        out *= Fraction(p) ** (-ord_p(c.u, p))
    return out


def diagonal(e: MwExpr) -> MwIdele:
    """Image of a global degree-1 class, stored at 2 and the entry primes."""
    if e.degree != 1:
        raise DegreeMismatch("the diagonal wants degree 1")
    real = local_section(e, REAL)
    finite = {}
    for p in sorted({2, *e.support()}):
        finite[p] = local_section(e, Place(p))
    return make_idele(real, finite)


def kernel_membership(x: MwIdele) -> bool:
    """In the kernel of the unit-coordinate projection: all u equal 1."""
    if x.real.u != 1:
        return False
    return all(c.u == 1 for _, c in x.finite)


def parity(x: MwIdele) -> int:
    """Total twist mod 2 of a kernel element: its class in the Z/2 cokernel."""
    if not kernel_membership(x):
        raise NotInKernel("parity needs every unit coordinate equal to 1")
    t = x.real.twist
    for _, c in x.finite:
        t += c.twist
    return t % 2
