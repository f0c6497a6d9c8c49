"""Symbolic Milnor-Witt K-theory of Q.

Expressions are integer combinations of monomials eta^m [a_1]...[a_k] with
rational nonzero entries, graded by k - m.  No rewriting is performed on
expressions themselves: equality is decided through a faithful pair of
invariants, the Milnor-side normal form (eta killed) and the Witt-side class
(eta inverted), which pin the element down inside the fiber product that
computes each graded piece.  Rewriting exists only inside residue(), where
monomials must be brought to uniformizer-leading shape before the boundary
rule applies.

The rewriting rules used there beyond the defining relations, namely

    [1/a] = -<a>[a],   [a][a] = [-1][a],   [a][b] = -<-1>[b][a],

are Morel's; the test suite checks each one against the invariant pair, which
never uses them, so nothing is circular.

Residues are always taken with uniformizer p at the prime p, and the residue
targets use the finite-field coordinates from quadform (GWFp, WFp).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    Place,
    is_prime,
    least_nonresidue,
    legendre,
    ord_p,
    primes_of,
    square_class,
    square_class_mul,
    tame_symbol,
    unit_mod_p,
)
from .errors import (
    DegreeMismatch,
    InconsistentInvariants,
    InvariantViolation,
    NotPrime,
    UnsupportedDegree,
    ZeroEntry,
)
from .quadform import (
    DiagForm,
    GWFp,
    WFp,
    gw_fp_add,
    gw_fp_sub,
    gw_fp_zero,
    wfp_add,
    wfp_neg,
    wfp_scale,
    wfp_unit,
    wfp_zero,
    witt_class,
)

Term = tuple[int, int, tuple[Fraction, ...]]  # coeff, eta power, entries


@dataclass(frozen=True)
class MwExpr:
    degree: int
    terms: tuple[Term, ...]

    def support(self) -> tuple[int, ...]:
        ps: set[int] = set()
        for _, _, entries in self.terms:
            for a in entries:
                ps.update(primes_of(a))
        return tuple(sorted(ps))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for c, m, entries in self.terms:
            body = "eta^%d " % m if m > 1 else ("eta " if m == 1 else "")
            body += "".join("[%s]" % a for a in entries)
            if not body:
                body = "1"
            bits.append("%+d %s" % (c, body))
        return " ".join(bits)


def _expr(degree: int, raw: list[Term]) -> MwExpr:
    acc: dict[tuple[int, tuple[Fraction, ...]], int] = {}
    for c, m, entries in raw:
        if c == 0:
            continue
        entries = tuple(Fraction(a) for a in entries)
        if any(a == 0 for a in entries):
            raise ZeroEntry("zero inside a bracket")
        if len(entries) - m != degree:
            raise DegreeMismatch(
                f"term of degree {len(entries) - m} in a degree {degree} expression"
            )
        if any(a == 1 for a in entries):
            # [1] = 0, so the whole monomial dies
            continue
        key = (m, entries)
        acc[key] = acc.get(key, 0) + c
    terms = tuple(
        (c, m, entries)
        for (m, entries), c in sorted(acc.items())
        if c != 0
    )
    return MwExpr(degree, terms)


def zero(degree: int = 0) -> MwExpr:
    return MwExpr(degree, ())


def const(c: int) -> MwExpr:
    """c times the unit of the degree-0 part."""
    return _expr(0, [(c, 0, ())])


def make_symbol(*entries) -> MwExpr:
    """[a_1]...[a_k]; with no arguments, the unit constant."""
    es = tuple(Fraction(a) for a in entries)
    return _expr(len(es), [(1, 0, es)])


def eta_mul(e: MwExpr, times: int = 1) -> MwExpr:
    assert times >= 0
    return _expr(e.degree - times, [(c, m + times, en) for c, m, en in e.terms])


def add(e1: MwExpr, e2: MwExpr) -> MwExpr:
    if e1.degree != e2.degree:
        if not e1.terms:
            return e2
        if not e2.terms:
            return e1
        raise DegreeMismatch(f"degree {e1.degree} + degree {e2.degree}")
    return _expr(e1.degree, list(e1.terms) + list(e2.terms))


def neg(e: MwExpr) -> MwExpr:
    return _expr(e.degree, [(-c, m, en) for c, m, en in e.terms])


def sub(e1: MwExpr, e2: MwExpr) -> MwExpr:
    return add(e1, neg(e2))


def scale(c: int, e: MwExpr) -> MwExpr:
    return _expr(e.degree, [(c * c0, m, en) for c0, m, en in e.terms])


def mul(e1: MwExpr, e2: MwExpr) -> MwExpr:
    out = [
        (c1 * c2, m1 + m2, en1 + en2)
        for c1, m1, en1 in e1.terms
        for c2, m2, en2 in e2.terms
    ]
    return _expr(e1.degree + e2.degree, out)


def angle(a) -> MwExpr:
    """<a> = 1 + eta[a], the degree-0 unit class."""
    return add(const(1), eta_mul(make_symbol(a)))


def hyperbolic() -> MwExpr:
    """h = 2 + eta[-1] = <1> + <-1>."""
    return add(const(2), eta_mul(make_symbol(-1)))


# ---------------------------------------------------------------------------
# normal forms


@dataclass(frozen=True)
class MilnorNF:
    """Image after killing eta, in closed coordinates per degree.

    data is: None (degree < 0), an integer (0), a rational (1), a pair
    (real bit, sorted tuple of (odd prime, tame value)) (2), a single real
    bit (>= 3).
    """

    degree: int
    data: object

    def is_trivial(self) -> bool:
        n = self.degree
        if n <= -1:
            return True
        if n == 0:
            return self.data == 0
        if n == 1:
            return self.data == 1
        if n == 2:
            return self.data == (0, ())
        return self.data == 0


@dataclass(frozen=True)
class WittNF:
    """Witt-ring image of the eta-inverted expression, degree-adapted.

    rank only means anything in degree 0; signed_disc is dropped above
    degree 1 and hasse above degree 2, where they are forced trivial (this
    is asserted, not assumed).
    """

    degree: int
    sigma: int
    rank: int | None = None
    signed_disc: int | None = None
    hasse: tuple[tuple[int, int], ...] | None = None

    def is_trivial(self) -> bool:
        return (
            self.sigma == 0
            and self.rank in (None, 0)
            and self.signed_disc in (None, 1)
            and self.hasse in (None, ())
        )


@dataclass(frozen=True)
class ResidueClass:
    """Value of a residue map at p, landing in degree m over F_p."""

    p: int
    codomain_degree: int
    payload: object  # None (m >= 2), unit mod p (m = 1), GWFp (0), WFp (< 0)

    def is_trivial(self) -> bool:
        m = self.codomain_degree
        if m >= 2:
            return True
        if m == 1:
            return self.payload == 1
        return self.payload.is_zero()


@dataclass(frozen=True)
class MwNormalForm:
    milnor: MilnorNF
    witt: WittNF
    s_inf: int | None = None
    residues: tuple[ResidueClass, ...] = ()

    def is_trivial(self) -> bool:
        return self.milnor.is_trivial() and self.witt.is_trivial()


def milnor_image(e: MwExpr) -> MilnorNF:
    n = e.degree
    if n <= -1:
        return MilnorNF(n, None)
    pure = [(c, en) for c, m, en in e.terms if m == 0]
    if n == 0:
        return MilnorNF(0, sum(c for c, _ in pure))
    if n == 1:
        val = Fraction(1)
        for c, (a,) in pure:
            val *= a ** c
        return MilnorNF(1, val)
    if n == 2:
        bit = 0
        ps: set[int] = set()
        for c, (a, b) in pure:
            if a < 0 and b < 0:
                bit += c
            ps.update(primes_of(a))
            ps.update(primes_of(b))
        tame = []
        for p in sorted(ps):
            if p == 2:
                continue  # F_2 has no units to see; the dyadic data rides on the real bit
            t = 1
            for c, (a, b) in pure:
                t = t * pow(tame_symbol(b, a, p), c % (p - 1), p) % p
            if t != 1:
                tame.append((p, t))
        return MilnorNF(2, (bit % 2, tuple(tame)))
    bit = sum(c for c, en in pure if all(a < 0 for a in en))
    return MilnorNF(n, bit % 2)


def witt_rep(e: MwExpr) -> DiagForm:
    """An honest diagonal form representing the Witt-ring image of e.

    eta maps to 1 and [a] to <a> - <1>; each bracket product expands over
    subsets.  A global sign (-1)^degree makes pure symbols land on their
    Pfister forms with a plus sign.
    """
    plus: list[int] = []
    minus: list[int] = []
    for c, _, entries in e.terms:
        k = len(entries)
        # diagonal entries only matter mod squares; folding square classes
        # keeps subset products from outgrowing the factorization cap
        classes = [square_class(a) for a in entries]
        for mask in range(1 << k):
            val = 1
            bits = 0
            for i in range(k):
                if mask >> i & 1:
                    val = square_class_mul(val, classes[i])
                    bits += 1
            w = c if (k - bits) % 2 == 0 else -c
            (plus if w > 0 else minus).extend([val] * abs(w))
    if e.degree % 2:
        plus, minus = minus, plus
    return DiagForm(tuple(plus) + tuple(-x for x in minus))


def witt_image(e: MwExpr) -> WittNF:
    n = e.degree
    wc = witt_class(witt_rep(e))
    if n >= 1 and wc.parity != 0:
        raise InvariantViolation("odd virtual rank in positive degree")
    if n >= 1 and wc.sigma % (1 << n):
        raise InvariantViolation(f"signature {wc.sigma} not divisible by 2^{n}")
    if n >= 2 and wc.signed_disc != 1:
        raise InvariantViolation("nontrivial signed disc above degree 1")
    if n >= 3 and wc.hasse:
        raise InvariantViolation("nontrivial Hasse bits above degree 2")
    rank = None
    if n == 0:
        rank = sum(c for c, m, en in e.terms if not en)
        if rank % 2 != wc.parity:
            raise InvariantViolation("rank and Witt parity disagree")
    return WittNF(
        degree=n,
        sigma=wc.sigma,
        rank=rank,
        signed_disc=wc.signed_disc if n <= 1 else None,
        hasse=tuple(sorted(wc.hasse.items())) if n <= 2 else None,
    )


def _check_pullback(e: MwExpr, mil: MilnorNF, wit: WittNF) -> None:
    # the two images must agree in I^n/I^{n+1}; cheap per-degree checks
    n = mil.degree
    if n == 0:
        if (mil.data - wit.sigma) % 2:
            raise InvariantViolation("rank and signature parity disagree")
    elif n == 1:
        sc = 1
        for c, m, (a,) in ((t for t in e.terms if t[1] == 0)):
            if c % 2:
                sc = square_class_mul(sc, square_class(a))
        if sc != wit.signed_disc:
            raise InvariantViolation("unit class and signed disc disagree")
    elif n == 2:
        bit, tame = mil.data
        if (bit - wit.sigma // 4) % 2:
            raise InvariantViolation("real symbol bit and signature disagree")
        cmap = dict(wit.hasse)
        tmap = dict(tame)
        for p in set(cmap) | set(tmap):
            if p == 2:
                continue
            if cmap.get(p, 1) != legendre(tmap.get(p, 1), p):
                raise InvariantViolation(f"tame class and Hasse bit disagree at {p}")


def normal_form(e: MwExpr) -> MwNormalForm:
    mil = milnor_image(e)
    wit = witt_image(e)
    _check_pullback(e, mil, wit)
    n = e.degree
    if n < 1:
        return MwNormalForm(mil, wit)
    s_inf = wit.sigma >> n
    res = []
    for p in e.support():
        rc = residue(e, p)
        if not rc.is_trivial():
            res.append(rc)
    return MwNormalForm(mil, wit, s_inf, tuple(res))


def is_zero(e: MwExpr) -> bool:
    return normal_form(e).is_trivial()


def eq(e1: MwExpr, e2: MwExpr) -> bool:
    if e1.degree != e2.degree:
        return is_zero(e1) and is_zero(e2)
    return normal_form(e1) == normal_form(e2)


# ---------------------------------------------------------------------------
# residues

# engine monomials carry coefficients from Z[<-1>], stored as (c0, c1)
# meaning c0 + c1 <-1>; eps-commutation [x][y] = -<-1>[y][x] lands there


def _times_eps_power(c: int, t: int) -> tuple[int, int]:
    c = c if t % 2 == 0 else -c
    return (c, 0) if t % 2 == 0 else (0, c)


def _entry_summands(a: Fraction, p: int) -> list[tuple[int, int, tuple]]:
    """[a] rewritten as integer combinations of monomials in [p], [-1], [units].

    Each summand is (coeff, extra eta power, entries); entries equal to p are
    uniformizer slots, everything else is a p-unit.
    """
    e = ord_p(a, p)
    u = a / Fraction(p) ** e
    if e == 0:
        return [(1, 0, (u,))] if u != 1 else []
    if e < 0:
        # [x] = -[1/x] - eta[-1][1/x]
        inner = _entry_summands(1 / a, p)
        out = [(-c, m, en) for c, m, en in inner]
        out += [(-c, m + 1, (Fraction(-1),) + en) for c, m, en in inner]
        return out
    P, M1 = Fraction(p), Fraction(-1)
    # [p^e u] = [p^e] + [u] + eta[p^e][u], with [p^e] = e[p] + (e//2) eta[-1][p]
    out = [(e, 0, (P,)), (e // 2, 1, (M1, P))]
    if u != 1:
        out += [(1, 0, (u,)), (e, 1, (P, u)), (e // 2, 2, (M1, P, u))]
    return [(c, m, en) for c, m, en in out if c != 0]


def _residue_monomials(e: MwExpr, p: int) -> list[tuple[int, int, tuple]]:
    """Image monomials (coeff, eta power, residue-field units) under the boundary at p."""
    P = Fraction(p)
    raw: list[tuple[int, int, tuple]] = []
    for c, m, entries in e.terms:
        partial = [(c, m, ())]
        for a in entries:
            summands = _entry_summands(a, p)
            partial = [
                (c1 * c2, m1 + m2, en1 + en2)
                for c1, m1, en1 in partial
                for c2, m2, en2 in summands
            ]
        raw.extend(partial)

    out: list[tuple[int, int, tuple]] = []
    for c, m, entries in raw:
        j = sum(1 for x in entries if x == P)
        if j == 0:
            continue  # p-unit monomials have zero boundary
        # eps-sort the uniformizer slots to the front, then collapse
        # [p]^j = [-1]^(j-1)[p] and slide the [-1]s back across [p]
        crossings = 0
        units = []
        seen_units = 0
        for x in entries:
            if x == P:
                crossings += seen_units
            else:
                units.append(x)
                seen_units += 1
        c0, c1 = _times_eps_power(c, crossings + j - 1)
        tail = (Fraction(-1),) * (j - 1) + tuple(units)
        if m >= 1:
            # <-1> eta = -eta
            out.append((c0 - c1, m, tail))
        else:
            if c0 + c1:
                out.append((c0 + c1, 0, tail))
            if c1:
                out.append((c1, 1, (Fraction(-1),) + tail))
    return out


def residue(e: MwExpr, p: int) -> ResidueClass:
    if not is_prime(p):
        raise NotPrime(f"residue wants a prime, got {p}")
    d = e.degree - 1
    if d >= 2:
        return ResidueClass(p, d, None)
    mons = _residue_monomials(e, p)
    for c, m, units in mons:
        if len(units) - m != d:
            raise InvariantViolation("inhomogeneous residue monomial")
    if d == 1:
        val = 1
        for c, m, units in mons:
            if m == 0:
                val = val * pow(unit_mod_p(units[0], p), c % (p - 1), p) % p
        return ResidueClass(p, 1, val)
    if d == 0:
        g = gw_fp_zero(p)
        for c, m, units in mons:
            if m == 0:
                g = gw_fp_add(g, GWFp(p, c, None if p == 2 else 1))
            elif m == 1 and p != 2:
                s = legendre(unit_mod_p(units[0], p), p) ** (c % 2)
                g = gw_fp_add(g, GWFp(p, 0, s))
            # eta^2 and beyond die: everything in degree >= 2 over F_p is zero
        return ResidueClass(p, 0, g)
    w = wfp_zero(p)
    one = wfp_unit(p, 1)
    for c, m, units in mons:
        if len(units) == 0:
            w = wfp_add(w, wfp_scale(c, one))
        elif len(units) == 1:
            x = wfp_add(wfp_unit(p, unit_mod_p(units[0], p)), wfp_neg(one))
            w = wfp_add(w, wfp_scale(c, x))
    return ResidueClass(p, d, w)


def ord_tilde(e: MwExpr, v: Place):
    """Degree-1 valuation: signature over 2 at the real place, boundary at p."""
    if e.degree != 1:
        raise DegreeMismatch("ord_tilde wants degree 1")
    if v.is_real:
        return witt_image(e).sigma // 2
    return residue(e, v.p).payload


# ---------------------------------------------------------------------------
# inverting the coordinates (degrees 1 and 2)


def _residue_targets(nf_residues, degree: int) -> dict[int, object]:
    out = {}
    if isinstance(nf_residues, dict):
        nf_residues = nf_residues.items()
    for rc in nf_residues:
        if isinstance(rc, ResidueClass):
            p, payload = rc.p, rc.payload
        else:
            p, payload = rc
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if degree == 1:
            if not isinstance(payload, GWFp) or payload.p != p:
                raise InconsistentInvariants(f"degree-1 residue at {p} must be a GWFp at {p}")
            if not payload.is_zero():
                out[p] = payload
        else:
            if not isinstance(payload, int):
                raise InconsistentInvariants(f"degree-2 residue at {p} must be a unit mod {p}")
            t = payload % p
            if t == 0:
                raise InconsistentInvariants(f"residue at {p} is not a unit")
            if t != 1 and p == 2:
                raise InconsistentInvariants("F_2 has no nontrivial units")
            if t != 1:
                out[p] = t
    return out


def from_invariants(nf: MwNormalForm | None = None, *, degree: int | None = None,
                    s_inf: int = 0, residues=None) -> MwExpr:
    """Build an expression with the given signature-part and boundary values.

    Accepts a full normal form, or degree/s_inf/residues given directly;
    residues maps primes to GWFp (degree 1) or units mod p (degree 2).
    Round-trips through normal_form, and raises InconsistentInvariants if the
    requested data cannot be hit exactly.
    """
    if nf is not None:
        degree = nf.milnor.degree
        s_inf = nf.s_inf if nf.s_inf is not None else 0
        residues = nf.residues
    if degree not in (1, 2):
        raise UnsupportedDegree(f"no inverse coordinates in degree {degree}")
    targets = _residue_targets(residues or (), degree)

    e = scale(s_inf, make_symbol(*([-1] * degree)))
    pending = set(targets)
    touched = set(targets)
    while pending:
        p = max(pending)
        pending.discard(p)
        cur = residue(e, p).payload
        if degree == 1:
            want = targets.get(p, gw_fp_zero(p))
            need = gw_fp_sub(want, cur)
            if need.is_zero():
                continue
            r, disc = need.rank, need.disc
            if disc in (None, 1):
                g = scale(r, make_symbol(p))
            else:
                u = least_nonresidue(p)
                g = add(scale(r - 1, make_symbol(p)), make_symbol(Fraction(p * u)))
        else:
            want = targets.get(p, 1)
            need = want * pow(cur, -1, p) % p
            if need == 1:
                continue
            g = make_symbol(p, need)
        e = add(e, g)
        for q in g.support():
            if q != p:
                if q > p:
                    raise InvariantViolation("spurious boundary above the current prime")
                pending.add(q)
                touched.add(q)

    got = normal_form(e)
    if got.s_inf != s_inf:
        raise InconsistentInvariants("signature part not realizable")
    got_res = {rc.p: rc.payload for rc in got.residues}
    for p in touched | set(got_res):
        want = targets.get(p)
        have = got_res.get(p)
        if degree == 1:
            want = want or gw_fp_zero(p)
            have = have if have is not None else gw_fp_zero(p)
            okay = want == have
        else:
            okay = (want or 1) == (have if have is not None else 1)
        if not okay:
            raise InconsistentInvariants(f"boundary at {p} came out {have}, wanted {want}")
    if nf is not None and got != nf:
        raise InconsistentInvariants("requested normal form is not internally consistent")
    return e


# ---------------------------------------------------------------------------
# integral subgroups


def in_knmw_z(e: MwExpr) -> bool:
    """No boundary anywhere: the class extends over Z."""
    if e.degree < 1:
        raise DegreeMismatch("integrality is a positive-degree notion here")
    return all(residue(e, p).is_trivial() for p in e.support())


def in_knmw_zs(e: MwExpr, s) -> bool:
    """Boundary allowed only inside the prime set s."""
    if e.degree < 1:
        raise DegreeMismatch("integrality is a positive-degree notion here")
    allowed = set(s)
    return all(residue(e, p).is_trivial() for p in e.support() if p not in allowed)


def in_plus(e: MwExpr) -> bool:
    """Kernel of the real signature."""
    if e.degree < 1:
        raise DegreeMismatch("the plus part is a positive-degree notion here")
    return witt_image(e).sigma == 0
