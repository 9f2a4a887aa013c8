"""Root location over Q with certificates.

Sturm sequences decide real-root counts exactly.  Complex roots are located
by floating approximations upgraded to certificates: around an approximation
z the disk of radius n*|f(z)/f'(z)| contains at least one root, and a family
of pairwise disjoint disks accounting for deg(f) roots pins each root down.
All certificate arithmetic is exact rational; the precision floor only limits
how far intervals are refined before giving up with an explicit error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import mpmath
import sympy

from .errors import PreconditionError, UndecidedAtPrecision
from .linalg import RatMatrix, RatPoly, char_poly, rat, squarefree_part

DEFAULT_PREC_FLOOR = 128

_X = sympy.Symbol("x")


# ---------------------------------------------------------------------------
# factorization (sympy-backed) and Sturm machinery
# ---------------------------------------------------------------------------

def to_sympy(p: RatPoly):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator)
                       for c in reversed(p.coeffs)], _X, domain="QQ")


def from_sympy(poly) -> RatPoly:
    return RatPoly.from_coeffs([Fraction(c.p, c.q) for c in reversed(poly.all_coeffs())])


def irreducible_factors(p: RatPoly) -> tuple[tuple[RatPoly, int], ...]:
    """Monic irreducible factors over Q with multiplicities, deterministically ordered."""
    if p.is_zero():
        raise PreconditionError("cannot factor the zero polynomial")
    _, factors = to_sympy(p).factor_list()
    out = [(from_sympy(f).monic(), int(m)) for f, m in factors if f.degree() > 0]
    out.sort(key=lambda fm: (fm[0].degree, fm[0].coeffs))
    return tuple(out)


def sturm_chain(f: RatPoly) -> list[RatPoly]:
    chain = [f, f.derivative()]
    while not chain[-1].is_zero():
        chain.append(-(chain[-2] % chain[-1]))
    chain.pop()
    return chain


def _variations(chain: list[RatPoly], x: Fraction) -> int:
    signs = []
    for g in chain:
        v = g.eval_at(x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def cauchy_bound(f: RatPoly) -> Fraction:
    """Strict bound: all real and complex roots have modulus < the returned value."""
    if f.degree < 1:
        return Fraction(1)
    lc = abs(f.lc())
    m = max(abs(c) for c in f.coeffs[:-1])
    return Fraction(1) + m / lc


def count_real_roots(f: RatPoly, a: Fraction | None = None,
                     b: Fraction | None = None) -> int:
    """Distinct real roots of squarefree f in (a, b]; defaults cover all roots."""
    f = squarefree_part(f)
    if f.degree < 1:
        return 0
    bound = cauchy_bound(f)
    if a is None:
        a = -bound
    if b is None:
        b = bound
    chain = sturm_chain(f)
    return _variations(chain, a) - _variations(chain, b)


def isolate_real_roots(f: RatPoly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (a, b] each holding exactly one real root of squarefree f."""
    f = squarefree_part(f)
    if f.degree < 1:
        return []
    chain = sturm_chain(f)
    bound = cauchy_bound(f)

    out: list[tuple[Fraction, Fraction]] = []

    def split(a: Fraction, b: Fraction, va: int, vb: int):
        n = va - vb
        if n == 0:
            return
        if n == 1:
            out.append((a, b))
            return
        mid = (a + b) / 2
        if f.eval_at(mid) == 0:
            # rational root: peel it off as a degenerate interval
            out.append((mid, mid))
            eps = _gap_below(f, chain, mid, a)
            split(a, mid - eps, va, _variations(chain, mid - eps))
            split(mid, b, _variations(chain, mid), vb)
            return
        vm = _variations(chain, mid)
        split(a, mid, va, vm)
        split(mid, b, vm, vb)

    split(-bound, bound, _variations(chain, -bound), _variations(chain, bound))
    out.sort()
    return out


def _gap_below(f, chain, mid, lo):
    eps = (mid - lo) / 4
    while count_with_chain(chain, mid - eps, mid) != 1 or f.eval_at(mid - eps) == 0:
        eps /= 2
    return eps


def count_with_chain(chain, a, b) -> int:
    return _variations(chain, a) - _variations(chain, b)


def refine_root_interval(f: RatPoly, a: Fraction, b: Fraction,
                         width: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval (a, b] of squarefree f below the given width."""
    if a == b:
        return a, b
    fa = f.eval_at(a)
    while b - a > width:
        mid = (a + b) / 2
        fm = f.eval_at(mid)
        if fm == 0:
            return mid, mid
        if (fa > 0) != (fm > 0):
            b = mid
        else:
            a, fa = mid, fm
    return a, b


# ---------------------------------------------------------------------------
# rational square-root bounds and complex-rational evaluation
# ---------------------------------------------------------------------------

def sqrt_lower(s: Fraction, bits: int) -> Fraction:
    """Rational lower bound for sqrt(s), within 2^-bits."""
    if s < 0:
        raise ValueError("negative radicand")
    scale = 1 << (2 * bits)
    v = (s.numerator * scale) // s.denominator
    return Fraction(isqrt(v), 1 << bits)


def sqrt_upper(s: Fraction, bits: int) -> Fraction:
    if s < 0:
        raise ValueError("negative radicand")
    scale = 1 << (2 * bits)
    v = -((-s.numerator * scale) // s.denominator)  # ceil
    r = isqrt(v)
    if r * r < v:
        r += 1
    return Fraction(r, 1 << bits)


def eval_complex(f: RatPoly, re: Fraction, im: Fraction) -> tuple[Fraction, Fraction]:
    """Exact evaluation of f at the Gaussian rational re + im*i."""
    acc_re, acc_im = Fraction(0), Fraction(0)
    for c in reversed(f.coeffs):
        acc_re, acc_im = acc_re * re - acc_im * im + c, acc_re * im + acc_im * re
    return acc_re, acc_im


def _mpf_to_fraction(x, bits: int) -> Fraction:
    fixed = mpmath.libmp.to_fixed(mpmath.mpf(x)._mpf_, bits)
    return Fraction(fixed, 1 << bits)


# ---------------------------------------------------------------------------
# certified root disks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootDisk:
    """Certified disk containing exactly `count` roots (a conjugate pair when 2)."""

    center_re: Fraction
    center_im: Fraction
    radius: Fraction
    count: int

    def modulus_bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        m2 = self.center_re ** 2 + self.center_im ** 2
        lo = sqrt_lower(m2, bits) - self.radius
        hi = sqrt_upper(m2, bits) + self.radius
        return (max(Fraction(0), lo), hi)


class _Retry(Exception):
    pass


def certified_root_disks(f: RatPoly, bits: int) -> list[RootDisk]:
    """Pairwise disjoint certified disks covering all roots of squarefree f.

    Real roots come from Sturm isolation; nonreal roots come in conjugate
    pairs certified via the n*|f/f'| containment bound.  Raises
    UndecidedAtPrecision if certification fails at this precision.
    """
    f = squarefree_part(f)
    n = f.degree
    if n < 1:
        return []
    width = Fraction(1, 1 << bits)
    real = [refine_root_interval(f, a, b, width) for a, b in isolate_real_roots(f)]
    pairs = (n - len(real)) // 2

    disks = [RootDisk((a + b) / 2, Fraction(0), (b - a) / 2, 1) for a, b in real]

    if pairs:
        fp = f.derivative()
        with mpmath.workprec(bits + 32):
            coeffs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
                      for c in reversed(f.coeffs)]
            try:
                approx = mpmath.polyroots(coeffs, maxsteps=200, extraprec=bits)
            except mpmath.libmp.NoConvergence as exc:  # pragma: no cover
                raise _Retry from exc
            upper = [z for z in approx if mpmath.im(z) > 0]
        if len(upper) != pairs:
            raise _Retry
        for z in sorted(upper, key=lambda w: (mpmath.re(w), mpmath.im(w))):
            zre = _mpf_to_fraction(mpmath.re(z), bits)
            zim = _mpf_to_fraction(mpmath.im(z), bits)
            fv = eval_complex(f, zre, zim)
            dv = eval_complex(fp, zre, zim)
            num2 = fv[0] ** 2 + fv[1] ** 2
            den2 = dv[0] ** 2 + dv[1] ** 2
            den_lo = sqrt_lower(den2, bits)
            if den_lo <= 0:
                raise _Retry
            radius = Fraction(n) * sqrt_upper(num2, bits) / den_lo
            if zim <= radius:  # must stay off the real axis to certify a pair
                raise _Retry
            disks.append(RootDisk(zre, zim, radius, 2))

    # global disjointness (each complex disk also against every mirror image)
    expanded = []
    for d in disks:
        expanded.append(d)
        if d.count == 2:
            expanded.append(RootDisk(d.center_re, -d.center_im, d.radius, 0))
    for i in range(len(expanded)):
        for j in range(i + 1, len(expanded)):
            a, b = expanded[i], expanded[j]
            dist2 = (a.center_re - b.center_re) ** 2 + (a.center_im - b.center_im) ** 2
            if dist2 <= (a.radius + b.radius) ** 2:
                raise _Retry
    return disks


def _disks_with_retry(f: RatPoly, bits: int, floor: int) -> tuple[list[RootDisk], int]:
    while True:
        try:
            return certified_root_disks(f, bits), bits
        except _Retry:
            if bits >= floor:
                raise UndecidedAtPrecision(
                    f"root certification for {f} failed at {floor}-bit floor")
            bits = min(2 * bits, floor)


# ---------------------------------------------------------------------------
# purely imaginary spectrum (exact, Sturm-certified)
# ---------------------------------------------------------------------------

def has_purely_imaginary_spectrum(m: RatMatrix) -> bool:
    """True iff every complex eigenvalue of m lies on the imaginary axis.

    Exact criterion: each irreducible factor of the characteristic polynomial
    is x, or is even with decimation g(x^2) where g has all roots real and
    nonpositive (Sturm-certified counts).
    """
    if not m.is_square():
        raise PreconditionError("spectrum of non-square matrix")
    if m.rows == 0:
        return True
    for f, _ in irreducible_factors(char_poly(m)):
        if f.degree == 1:
            if f.coeffs[0] != 0:  # root -c is real and nonzero
                return False
            continue
        g = f.even_decimation()
        if g is None:
            return False
        # g is squarefree with g(0) != 0 since f is irreducible of degree >= 2
        if count_real_roots(g) != g.degree:
            return False
        if count_real_roots(g, Fraction(0), cauchy_bound(g)) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# spectral radius comparison
# ---------------------------------------------------------------------------

def _quadratic_moduli_lt(f: RatPoly, bound: Fraction) -> bool:
    b, c = f.coeffs[1], f.coeffs[0]
    disc = b * b - 4 * c
    if disc < 0:
        return c < bound * bound  # conjugate pair, |root|^2 = c
    # two real roots; both in (-bound, bound) iff the parabola is positive at
    # the endpoints and its vertex sits between them
    return (f.eval_at(bound) > 0 and f.eval_at(-bound) > 0
            and -bound < -b / 2 < bound)


def spectral_radius_lt(m: RatMatrix, bound, prec_floor: int = DEFAULT_PREC_FLOOR) -> bool:
    """Certified test: every eigenvalue modulus of m is strictly below bound.

    Degree <= 2 factors are decided exactly; higher degrees by interval
    refinement.  Raises UndecidedAtPrecision when a modulus cannot be
    separated from the bound at the precision floor.
    """
    bound = rat(bound)
    if not m.is_square():
        raise PreconditionError("spectral radius of non-square matrix")
    if m.rows == 0:
        return True
    if bound <= 0:
        return False
    for f, _ in irreducible_factors(char_poly(m)):
        if f.degree == 1:
            if not abs(f.coeffs[0]) < bound:
                return False
        elif f.degree == 2:
            if not _quadratic_moduli_lt(f, bound):
                return False
        else:
            bits = 64
            while True:
                disks, bits = _disks_with_retry(f, bits, prec_floor)
                los_his = [d.modulus_bounds(bits) for d in disks]
                if any(lo >= bound for lo, _ in los_his):
                    return False
                if all(hi < bound for _, hi in los_his):
                    break
                if bits >= prec_floor:
                    raise UndecidedAtPrecision(
                        f"eigenvalue modulus of {f} meets the bound within "
                        f"the {prec_floor}-bit precision floor")
                bits = min(2 * bits, prec_floor)
    return True


# ---------------------------------------------------------------------------
# modulus clustering and spectrum reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClusterMember:
    factor_index: int
    roots: int          # number of roots of the factor in this cluster (no multiplicity)
    whole: bool         # the factor's entire root set lies in this cluster


@dataclass(frozen=True)
class ModulusCluster:
    mod2: Fraction | None           # exact squared modulus when known
    lo: Fraction
    hi: Fraction
    count: int                      # roots in cluster, counted with multiplicity
    exact: bool
    members: tuple[ClusterMember, ...]

    @property
    def modulus_approx(self) -> float:
        return float(self.lo + self.hi) / 2


def _exact_mod2(f: RatPoly) -> Fraction | None:
    """Squared modulus shared by all roots of f, when decidable exactly."""
    if f.degree == 1:
        c = f.coeffs[0]
        return c * c
    if f.degree == 2:
        b, c = f.coeffs[1], f.coeffs[0]
        if b * b - 4 * c < 0:
            return c
    return None


def modulus_clusters(factors: tuple[tuple[RatPoly, int], ...],
                     prec_floor: int = DEFAULT_PREC_FLOOR) -> tuple[ModulusCluster, ...]:
    """Group factor roots by modulus; descending modulus order.

    Exact clusters merge on equal squared modulus.  Interval clusters must
    separate from every other cluster under refinement; a persistent overlap
    is an UndecidedAtPrecision error, never a silent merge.
    """
    exact: dict[Fraction, list[tuple[int, int, int]]] = {}
    numeric_factors: list[int] = []
    for idx, (f, _) in enumerate(factors):
        m2 = _exact_mod2(f)
        if m2 is not None:
            exact.setdefault(m2, []).append((idx, f.degree, f.degree))
        else:
            numeric_factors.append(idx)

    bits = 64
    while True:
        numeric: list[tuple[Fraction, Fraction, int, int]] = []  # lo, hi, factor, roots
        try:
            for idx in numeric_factors:
                f = factors[idx][0]
                for d in certified_root_disks(f, bits):
                    lo, hi = d.modulus_bounds(bits)
                    numeric.append((lo, hi, idx, d.count))
        except _Retry:
            if bits >= prec_floor:
                raise UndecidedAtPrecision(
                    f"modulus clustering failed at the {prec_floor}-bit floor")
            bits = min(2 * bits, prec_floor)
            continue

        collision = False
        for i in range(len(numeric)):
            lo_i, hi_i = numeric[i][0], numeric[i][1]
            for j in range(i + 1, len(numeric)):
                if lo_i <= numeric[j][1] and numeric[j][0] <= hi_i:
                    collision = True
            for m2 in exact:
                if lo_i * lo_i <= m2 <= hi_i * hi_i or (lo_i <= 0 and m2 == 0):
                    collision = True
        if not collision:
            break
        if bits >= prec_floor:
            raise UndecidedAtPrecision(
                "overlapping modulus intervals at the precision floor; "
                "refusing to merge silently")
        bits = min(2 * bits, prec_floor)

    clusters: list[ModulusCluster] = []
    for m2, items in exact.items():
        members = tuple(ClusterMember(idx, roots, roots == deg)
                        for idx, deg, roots in items)
        count = sum(roots * factors[idx][1] for idx, _, roots in items)
        lo, hi = sqrt_lower(m2, 64), sqrt_upper(m2, 64)
        clusters.append(ModulusCluster(m2, lo, hi, count, True, members))
    for lo, hi, idx, roots in numeric:
        deg = factors[idx][0].degree
        member = ClusterMember(idx, roots, roots == deg)
        clusters.append(ModulusCluster(None, lo, hi, roots * factors[idx][1],
                                       False, (member,)))
    clusters.sort(key=lambda c: (c.lo + c.hi) / 2, reverse=True)
    return tuple(clusters)


@dataclass(frozen=True)
class SpectrumReport:
    """Irreducible factor data plus certified modulus clusters for a matrix."""

    irreducible_factors: tuple[tuple[RatPoly, int], ...]
    modulus_clusters: tuple[ModulusCluster, ...]

    def reconstructs(self, p: RatPoly) -> bool:
        prod = RatPoly.one()
        for f, mult in self.irreducible_factors:
            prod = prod * f.pow(mult)
        return prod == p.monic()


def spectrum_report(m: RatMatrix, prec_floor: int = DEFAULT_PREC_FLOOR) -> SpectrumReport:
    factors = irreducible_factors(char_poly(m))
    return SpectrumReport(factors, modulus_clusters(factors, prec_floor))
