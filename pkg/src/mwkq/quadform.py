"""Diagonal quadratic forms over Q and their exact local invariants.

A form is a tuple of nonzero rationals <a_1, ..., a_n>.  The Hasse invariant
follows the first convention eps(q) = prod_{i<j} (a_i, a_j)_v, and the signed
discriminant is (-1)^{n(n-1)/2} det(q) as a squarefree integer.  The n-fold
Pfister form <<a_1, ..., a_n>> is the tensor product of the <1, -a_i>, so
<<-1, -1>> = <1, 1, 1, 1>.

Witt classes over Q are handled through witt_class(), which reduces any
representative to a canonical invariant tuple (rank parity, signature, signed
disc, Hasse bits of the parity-reduced virtual representative).  Two forms are
Witt equivalent iff the tuples agree; that is Hasse-Minkowski, so no isotropy
search happens outside the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import (
    Place,
    Rational,
    hilbert_classical,
    is_prime,
    least_nonresidue,
    legendre,
    ord_p,
    primes_of,
    square_class,
    square_class_mul,
    unit_part,
)
from .errors import NotPrime, PlaceMismatch, ZeroEntry


@dataclass(frozen=True)
class DiagForm:
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "entries", tuple(Fraction(a) for a in self.entries)
        )
        if any(a == 0 for a in self.entries):
            raise ZeroEntry("diagonal entries must be nonzero")

    @property
    def rank(self) -> int:
        return len(self.entries)

    def perp(self, other: "DiagForm") -> "DiagForm":
        return DiagForm(self.entries + other.entries)

    def neg(self) -> "DiagForm":
        return DiagForm(tuple(-a for a in self.entries))

    def scaled(self, c: Rational) -> "DiagForm":
        return DiagForm(tuple(Fraction(c) * a for a in self.entries))

    def __str__(self) -> str:
        return "<" + ",".join(str(a) for a in self.entries) + ">"


def form(*entries) -> DiagForm:
    return DiagForm(tuple(Fraction(a) for a in entries))


HYPERBOLIC = DiagForm((Fraction(1), Fraction(-1)))


def pfister(*aa) -> DiagForm:
    """<<a_1, ..., a_k>> = tensor of <1, -a_i>; the empty product is <1>."""
    entries = [Fraction(1)]
    for a in aa:
        a = Fraction(a)
        if a == 0:
            raise ZeroEntry("Pfister slot must be nonzero")
        entries = entries + [-a * e for e in entries]
    return DiagForm(tuple(entries))


def _det_class(q: DiagForm) -> int:
    # square class of the determinant, folded entrywise so only the
    # entries themselves ever get factored
    d = 1
    for a in q.entries:
        d = square_class_mul(d, square_class(a))
    return d


def _candidate_primes(q: DiagForm) -> list[int]:
    ps = {2}
    for a in q.entries:
        ps.update(primes_of(a))
    return sorted(ps)


def hasse_at(q: DiagForm, place: Place) -> int:
    """eps_v(q) = prod_{i<j} (a_i, a_j)_v."""
    s = 1
    es = q.entries
    for i in range(len(es)):
        for j in range(i + 1, len(es)):
            s *= hilbert_classical(es[i], es[j], place)
    return s


def split_hasse(rank: int, place: Place) -> int:
    """eps_v of the split form of the given even rank, (rank/2) x <1,-1>."""
    assert rank % 2 == 0
    m = rank // 2
    return hilbert_classical(-1, -1, place) ** (m * (m - 1) // 2)


def signature(q: DiagForm) -> int:
    return sum(1 if a > 0 else -1 for a in q.entries)


@dataclass
class LocalInvariants:
    rank: int
    det_class: int
    signed_disc: int
    hasse: dict[int, int] = field(default_factory=dict)
    signature: int = 0


def invariants(q: DiagForm) -> LocalInvariants:
    """rank, det and signed-disc square classes, nontrivial Hasse bits, signature."""
    r = q.rank
    det_class = _det_class(q)
    sd = square_class_mul((-1) ** (r * (r - 1) // 2), det_class)
    hasse = {}
    for p in _candidate_primes(q):
        e = hasse_at(q, Place(p))
        if e != 1:
            hasse[p] = e
    return LocalInvariants(r, det_class, sd, hasse, signature(q))


# ---------------------------------------------------------------------------
# canonical Witt-class invariants over Q


@dataclass
class WittClassQ:
    """Complete invariants of a Witt class of Q-forms.

    hasse holds the Hasse bits of the parity-reduced representative q - mH
    (m = rank//2), only the -1 entries; these are class functions, unlike the
    raw eps of an arbitrary representative.
    """

    parity: int
    sigma: int
    signed_disc: int
    hasse: dict[int, int] = field(default_factory=dict)

    def is_trivial(self) -> bool:
        return (
            self.parity == 0
            and self.sigma == 0
            and self.signed_disc == 1
            and not self.hasse
        )


def _reduced_hasse(q: DiagForm, place: Place) -> int:
    # eps_v(q - mH) with m = rank//2, from eps additivity:
    # eps(q) = eps(q - mH) eps(mH) (det(q - mH), det(mH))_v
    m = q.rank // 2
    det_class = _det_class(q)
    e = hasse_at(q, place)
    e *= hilbert_classical(-1, -1, place) ** (m * (m - 1) // 2)
    if m % 2:
        e *= hilbert_classical(det_class * (-1) ** m, -1, place)
    return e


def witt_class(q: DiagForm) -> WittClassQ:
    r = q.rank
    sd = square_class_mul((-1) ** (r * (r - 1) // 2), _det_class(q))
    hasse = {}
    for p in _candidate_primes(q):
        c = _reduced_hasse(q, Place(p))
        if c != 1:
            hasse[p] = c
    return WittClassQ(r % 2, signature(q), sd, hasse)


def is_hyperbolic(q: DiagForm) -> bool:
    """rank even, signed disc 1, signature 0, Hasse bits those of the split form."""
    if q.rank % 2:
        return False
    inv = invariants(q)
    if inv.signed_disc != 1 or inv.signature != 0:
        return False
    for p in _candidate_primes(q):
        if hasse_at(q, Place(p)) != split_hasse(q.rank, Place(p)):
            return False
    return True


def witt_equal(q1: DiagForm, q2: DiagForm) -> bool:
    return is_hyperbolic(q1.perp(q2.neg()))


def in_power_I(q: DiagForm, n: int) -> bool:
    """Does the Witt class of q lie in I^n(Q)?"""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return True
    if q.rank % 2:
        return False
    if n == 1:
        return True
    inv = invariants(q)
    if inv.signed_disc != 1:
        return False
    if n == 2:
        return True
    for p in _candidate_primes(q):
        if hasse_at(q, Place(p)) != split_hasse(q.rank, Place(p)):
            return False
    return inv.signature % (1 << n) == 0


# ---------------------------------------------------------------------------
# GW and W of residue fields, W of local fields


@dataclass(frozen=True)
class GWFp:
    """Element of GW(F_p): rank plus det square class; rank only at p = 2."""

    p: int
    rank: int
    disc: int | None  # +1 square, -1 nonsquare, None iff p = 2

    def __post_init__(self):
        if self.p == 2:
            assert self.disc is None
        else:
            assert self.disc in (1, -1)

    def is_zero(self) -> bool:
        return self.rank == 0 and self.disc in (None, 1)


def gw_fp_zero(p: int) -> GWFp:
    return GWFp(p, 0, None if p == 2 else 1)


def gw_fp_unit(p: int, u: int) -> GWFp:
    """The rank-one form <u> for a unit u mod p."""
    if p == 2:
        return GWFp(p, 1, None)
    s = legendre(u, p)
    if s == 0:
        raise ZeroEntry(f"{u} is not a unit mod {p}")
    return GWFp(p, 1, s)


def _same_p(x: GWFp, y: GWFp) -> None:
    if x.p != y.p:
        raise PlaceMismatch(f"GW(F_{x.p}) vs GW(F_{y.p})")


def gw_fp_add(x: GWFp, y: GWFp) -> GWFp:
    _same_p(x, y)
    if x.p == 2:
        return GWFp(x.p, x.rank + y.rank, None)
    return GWFp(x.p, x.rank + y.rank, x.disc * y.disc)


def gw_fp_neg(x: GWFp) -> GWFp:
    return GWFp(x.p, -x.rank, x.disc)


def gw_fp_sub(x: GWFp, y: GWFp) -> GWFp:
    return gw_fp_add(x, gw_fp_neg(y))


def gw_fp_mul(x: GWFp, y: GWFp) -> GWFp:
    # disc(x y) = disc(x)^rank(y) * disc(y)^rank(x)
    _same_p(x, y)
    if x.p == 2:
        return GWFp(x.p, x.rank * y.rank, None)
    d = (x.disc ** (y.rank % 2)) * (y.disc ** (x.rank % 2))
    return GWFp(x.p, x.rank * y.rank, d)


def gw_fp_eq(x: GWFp, y: GWFp) -> bool:
    _same_p(x, y)
    return x == y


@dataclass(frozen=True)
class WFp:
    """Element of W(F_p): rank parity and signed-disc class (trivial at p = 2)."""

    p: int
    parity: int
    disc: int  # signed-disc square class; always +1 when p = 2

    def is_zero(self) -> bool:
        return self.parity == 0 and self.disc == 1


def wfp_zero(p: int) -> WFp:
    return WFp(p, 0, 1)


def wfp_add(x: WFp, y: WFp) -> WFp:
    if x.p != y.p:
        raise PlaceMismatch(f"W(F_{x.p}) vs W(F_{y.p})")
    if x.p == 2:
        return WFp(2, (x.parity + y.parity) % 2, 1)
    d = x.disc * y.disc
    if x.parity and y.parity:
        # signed disc picks up (-1)^{r1 r2}
        d *= legendre(-1, x.p)
    return WFp(x.p, (x.parity + y.parity) % 2, d)


def wfp_neg(x: WFp) -> WFp:
    if x.p == 2:
        return x
    d = x.disc * (legendre(-1, x.p) if x.parity else 1)
    return WFp(x.p, x.parity, d)


def wfp_scale(c: int, x: WFp) -> WFp:
    if c < 0:
        return wfp_scale(-c, wfp_neg(x))
    out = wfp_zero(x.p)
    for _ in range(c % 4):
        out = wfp_add(out, x)
    return out


def wfp_unit(p: int, u: int) -> WFp:
    """Class of the rank-one form <u>."""
    if p == 2:
        return WFp(2, 1, 1)
    s = legendre(u, p)
    if s == 0:
        raise ZeroEntry(f"{u} is not a unit mod {p}")
    return WFp(p, 1, s)


def wfp_class(p: int, entries: tuple[int, ...]) -> WFp:
    """Witt class of a diagonal form over F_p given by unit entries."""
    n = len(entries)
    if p == 2:
        return WFp(2, n % 2, 1)
    prod = 1
    for u in entries:
        if u % p == 0:
            raise ZeroEntry(f"{u} is not a unit mod {p}")
        prod = prod * u % p
    sd = legendre(-1, p) ** (n * (n - 1) // 2 % 2) * legendre(prod, p)
    return WFp(p, n % 2, sd)


def gw_to_wfp(x: GWFp) -> WFp:
    if x.p == 2:
        return WFp(2, x.rank % 2, 1)
    sd = x.disc * legendre(-1, x.p) ** (x.rank * (x.rank - 1) // 2 % 2)
    return WFp(x.p, x.rank % 2, sd)


# ---------------------------------------------------------------------------
# W(Q_p) coordinates


def local_square_class_rep(d: Rational, p: int) -> int:
    """Canonical squarefree representative of the class of d in Q_p^x/(Q_p^x)^2.

    Odd p: one of {1, u, p, u p} with u the least positive nonresidue.
    p = 2: one of {1, -1, 5, -5, 2, -2, 10, -10} (odd part mod 8, times 2).
    """
    d = Fraction(d)
    e = ord_p(d, p) % 2
    u = unit_part(d, p)
    if p == 2:
        r = (u.numerator * u.denominator) % 8
        # odd d mod 8 is a complete square-class invariant of Z_2^x
        base = {1: 1, 3: -5, 5: 5, 7: -1}[r]
        return base * (2 if e else 1)
    s = legendre(u, p)
    base = 1 if s == 1 else least_nonresidue(p)
    return base * (p if e else 1)


@dataclass(frozen=True)
class WQp:
    """Element of W(Q_p): rank parity, local signed-disc class, reduced Hasse bit."""

    p: int
    parity: int
    disc: int
    hasse: int


def wqp_class(q: DiagForm, p: int) -> WQp:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    r = q.rank
    sd = square_class_mul((-1) ** (r * (r - 1) // 2), _det_class(q))
    return WQp(p, r % 2, local_square_class_rep(sd, p), _reduced_hasse(q, Place(p)))
