"""Place-by-place symbol data over Q.

Degree-2 expressions get a local symbol at every noncomplex place: an integer
at the real place (a quarter of the signature), a tame value in F_p^x at odd
p, a sign at p = 2.  The Moore-sequence check multiplies the mu-reductions of
these and expects +1; that product is insensitive to the uniformizer-
orientation convention, since inverting a tame value does not change its
(p-1)/2 power.

K_1^MW(Q_v) is handled in section coordinates (u, twist): u the unit part,
twist the local rank-0 quadratic defect.  The addition cocycle is extracted
from the symbolic engine itself (the class of -eta[u1][u2]) rather than from
a hand-coded Hilbert table, so the two can never silently disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import REAL, Place, Rational, hilbert_classical, tame_symbol
from .errors import (
    DegreeMismatch,
    InvariantViolation,
    PlaceMismatch,
    ZeroInput,
)
from .mwcore import (
    MwExpr,
    eta_mul,
    make_symbol,
    milnor_image,
    mul,
    neg,
    witt_image,
    witt_rep,
)
from .quadform import DiagForm, wqp_class


@dataclass(frozen=True)
class BValue:
    """Local symbol value: integer at the real place, unit mod p at odd p, a
    sign at p = 2."""

    place: Place
    payload: int

    def is_trivial(self) -> bool:
        if self.place.is_real:
            return self.payload == 0
        if self.place.p == 2:
            return self.payload == 1
        return self.payload == 1


def b_trivial(v: Place) -> BValue:
    return BValue(v, 0 if v.is_real else 1)


def q_v(b: BValue) -> int:
    """Collapse a local symbol value into the roots of unity of Q_v.

    Finite places: identity.  Real place: the integer reduces mod 2, encoded
    as a sign.
    """
    if b.place.is_real:
        return -1 if b.payload % 2 else 1
    return b.payload


def h_v_mw(e: MwExpr, v: Place) -> BValue:
    """The degree-2 local symbol at v."""
    if e.degree != 2:
        raise DegreeMismatch("local symbols live in degree 2")
    if v.is_real:
        return BValue(v, witt_image(e).sigma // 4)
    p = v.p
    pure = [(c, en) for c, m, en in e.terms if m == 0]
    if p == 2:
        s = 1
        for c, (a, b) in pure:
            s *= hilbert_classical(a, b, v) ** (c % 2)
        return BValue(v, s)
    t = 1
    for c, (a, b) in pure:
        t = t * pow(tame_symbol(b, a, p), c % (p - 1), p) % p
    return BValue(v, t)


def h_mw(e: MwExpr) -> dict[Place, BValue]:
    """All potentially nontrivial local symbols: real, dyadic, odd support."""
    if e.degree != 2:
        raise DegreeMismatch("local symbols live in degree 2")
    if not e.terms:
        return {}
    places = [REAL, Place(2)]
    places += [Place(p) for p in e.support() if p != 2]
    return {v: h_v_mw(e, v) for v in places}


def mw_hilbert(x: MwExpr, y: MwExpr, v: Place) -> BValue:
    """Pairing of two degree-1 expressions through their product symbol."""
    if x.degree != 1 or y.degree != 1:
        raise DegreeMismatch("the pairing wants two degree-1 expressions")
    return h_v_mw(mul(x, y), v)


def moore_pi(vec: dict[Place, int]) -> int:
    """Product of mu-values raised to half the local root-of-unity order."""
    s = 1
    for v, z in vec.items():
        if v.is_real or v.p == 2:
            s *= 1 if z == 1 else -1
        else:
            p = v.p
            t = pow(z, (p - 1) // 2, p)
            s *= -1 if t == p - 1 else 1
    return s


def in_wild_kernel(e: MwExpr) -> bool:
    """True when every local symbol vanishes; over Q this forces e = 0."""
    return all(b.is_trivial() for b in h_mw(e).values())


@dataclass
class MooreReport:
    vector: dict[Place, BValue]
    mu_vector: dict[Place, int]
    product: int
    passed: bool


def moore_check(e: MwExpr) -> MooreReport:
    """Reciprocity: mu-reduced local symbols of a global class multiply to +1."""
    vec = h_mw(e)
    mu = {v: q_v(b) for v, b in vec.items()}
    prod = moore_pi(mu)
    return MooreReport(vec, mu, prod, prod == 1)


# ---------------------------------------------------------------------------
# K_1^MW(Q_v) in section coordinates


@dataclass(frozen=True)
class K1Local:
    place: Place
    u: Fraction
    twist: int


def k1_local_make(u: Rational, twist: int, v: Place) -> K1Local:
    u = Fraction(u)
    if u == 0:
        raise ZeroInput("section coordinate must be a unit")
    if v.is_finite:
        twist %= 2
    return K1Local(v, u, twist)


def local_section(e: MwExpr, v: Place) -> K1Local:
    """Section coordinates of the image of a degree-1 expression at v.

    u is the unit part (eta killed); the twist is the class of the leftover
    e - [u] in the local square of the fundamental ideal: a Z-coordinate
    (signature over 4) at the real place, the reduced Hasse bit at p.
    """
    if e.degree != 1:
        raise DegreeMismatch("section coordinates live in degree 1")
    u = milnor_image(e).data
    if v.is_real:
        diff = witt_image(e).sigma - (0 if u > 0 else 2)
        if diff % 4:
            raise InvariantViolation("real defect not in I^2")
        return K1Local(v, u, diff // 4)
    combined = witt_rep(e).perp(DiagForm((Fraction(-1), u)))
    wq = wqp_class(combined, v.p)
    if wq.parity or wq.disc != 1:
        raise InvariantViolation("local defect not in I^2")
    return K1Local(v, u, 0 if wq.hasse == 1 else 1)


def k1_local_add(x: K1Local, y: K1Local) -> K1Local:
    """(u1, t1) + (u2, t2) = (u1 u2, t1 + t2 + cocycle).

    The cocycle is the local class of [u1] + [u2] - [u1 u2] = -eta[u1][u2],
    computed by the engine.
    """
    if x.place != y.place:
        raise PlaceMismatch(f"{x.place} vs {y.place}")
    carry = local_section(neg(eta_mul(make_symbol(x.u, y.u))), x.place)
    if carry.u != 1:
        raise InvariantViolation("cocycle term has a unit part")
    return k1_local_make(x.u * y.u, x.twist + y.twist + carry.twist, x.place)


def k1_local_eq(x: K1Local, y: K1Local) -> bool:
    if x.place != y.place:
        raise PlaceMismatch(f"{x.place} vs {y.place}")
    if x.u != y.u:
        return False
    if x.place.is_real:
        return x.twist == y.twist
    return (x.twist - y.twist) % 2 == 0
