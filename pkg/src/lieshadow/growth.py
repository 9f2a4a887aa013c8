"""Metric growth lab.

Concave piecewise-linear gauges on the line with arbitrary-precision node
coordinates (the doubling/polynomial-growth counterexample runs on integers
as large as 2^128), the log-metric exponential-growth check, and iterated
ball hulls / Busemann gauges / Busemann distances on finite metric samples.

Busemann distance values live in the ring Q[e^(-q)] (rational coefficients,
rational exponents); such a value is zero only when written with no terms,
so equality is decided symbolically and order comparisons terminate by
refining interval evaluations of the exponentials.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .errors import PreconditionError
from .linalg import rat


# ---------------------------------------------------------------------------
# gauge curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaugeCurve:
    """Increasing concave piecewise-linear gauge through (0,0).

    Defines the translation-invariant metric d(x, y) = D(|x - y|) on the
    line; beyond the last node the final slope extends the curve.
    """

    nodes: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.nodes or self.nodes[0] != (0, 0):
            raise PreconditionError("gauge must start at (0, 0)")
        last_slope = None
        for (x0, y0), (x1, y1) in zip(self.nodes, self.nodes[1:]):
            if not (x1 > x0 and y1 > y0):
                raise PreconditionError("gauge nodes must increase in both coordinates")
            slope = (y1 - y0) / (x1 - x0)
            if slope <= 0 or (last_slope is not None and slope > last_slope):
                raise PreconditionError("gauge must be increasing and concave")
            last_slope = slope

    def final_slope(self) -> Fraction:
        (x0, y0), (x1, y1) = self.nodes[-2], self.nodes[-1]
        return (y1 - y0) / (x1 - x0)


def standard_gauge(n_max: int) -> GaugeCurve:
    """Nodes (0,0), (1,1) and (2^(2^(n+1)), 2^(2^n)) for n = 1..n_max.

    All nodes sit on y = sqrt(x), so concavity holds; the constructor checks
    it anyway.
    """
    if n_max < 1:
        raise PreconditionError("n_max must be at least 1")
    nodes = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(1))]
    for n in range(1, n_max + 1):
        nodes.append((Fraction(2 ** (2 ** (n + 1))), Fraction(2 ** (2 ** n))))
    return GaugeCurve(tuple(nodes))


def gauge_eval(c: GaugeCurve, x) -> Fraction:
    """Exact piecewise-linear evaluation (final slope beyond the last node)."""
    x = rat(x)
    if x < 0:
        raise PreconditionError("gauge arguments are nonnegative")
    for (x0, y0), (x1, y1) in zip(c.nodes, c.nodes[1:]):
        if x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    xl, yl = c.nodes[-1]
    return yl + c.final_slope() * (x - xl)


def gauge_inverse(c: GaugeCurve, y) -> Fraction:
    y = rat(y)
    if y < 0:
        raise PreconditionError("gauge values are nonnegative")
    for (x0, y0), (x1, y1) in zip(c.nodes, c.nodes[1:]):
        if y <= y1:
            return x0 + (x1 - x0) * (y - y0) / (y1 - y0)
    xl, yl = c.nodes[-1]
    return xl + (y - yl) / c.final_slope()


def ball_volume(c: GaugeCurve, r) -> Fraction:
    """|B(x0, r)| = 2 D^(-1)(r) for the gauge metric on the line."""
    r = rat(r)
    if r < 0:
        raise PreconditionError("radius must be nonnegative")
    return 2 * gauge_inverse(c, r)


def doubling_ratio(c: GaugeCurve, r) -> Fraction:
    r = rat(r)
    if r <= 0:
        raise PreconditionError("radius must be positive")
    return ball_volume(c, 2 * r) / ball_volume(c, r)


def growth_bound_check(c: GaugeCurve, samples: Iterable) -> bool:
    """ball_volume(y) <= 2y^2 + 2y^2(y+1) at every sample, exactly."""
    for y in samples:
        y = rat(y)
        if ball_volume(c, y) > 2 * y * y + 2 * y * y * (y + 1):
            return False
    return True


def log_metric_volume(r: float) -> float:
    """Ball volume 2(e^r - 1) for d(x,y) = log(|x-y|+1) on the line."""
    if r < 0:
        raise PreconditionError("radius must be nonnegative")
    return 2.0 * math.expm1(r)


def log_metric_beats_polynomial(c: float, q: float, r_values: Sequence[float]) -> float | None:
    """First sampled r with volume(r) > c * r^Q, else None.

    Comparison happens in log space so huge radii cannot overflow; finding
    such an r for every candidate (c, Q) is the non-polynomial-growth witness.
    """
    for r in r_values:
        if r <= 0:
            continue
        lhs = r + math.log(2.0 * -math.expm1(-r))  # log(2(e^r - 1))
        rhs = math.log(c) + q * math.log(r)
        if lhs > rhs:
            return r
    return None


# ---------------------------------------------------------------------------
# values in Q[e^(-q)]
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpPoly:
    """Sum of c * e^(-q) terms, c and q rational, q >= 0; canonical form.

    Nonzero elements of this ring are never numerically zero (the e^(-q) for
    distinct rational q are powers of a single transcendental), so sign
    determination by interval refinement terminates.
    """

    terms: tuple[tuple[Fraction, Fraction], ...]  # (exponent, coefficient), sorted

    @staticmethod
    def from_terms(terms: Iterable[tuple]) -> "ExpPoly":
        acc: dict[Fraction, Fraction] = {}
        for q, c in terms:
            q, c = rat(q), rat(c)
            if q < 0:
                raise PreconditionError("exponents must be nonnegative")
            acc[q] = acc.get(q, Fraction(0)) + c
        return ExpPoly(tuple(sorted((q, c) for q, c in acc.items() if c != 0)))

    @staticmethod
    def monomial(coeff, exponent=0) -> "ExpPoly":
        return ExpPoly.from_terms([(exponent, coeff)])

    @staticmethod
    def zero() -> "ExpPoly":
        return ExpPoly(())

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        return ExpPoly.from_terms(self.terms + other.terms)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return ExpPoly.from_terms(self.terms + tuple((q, -c) for q, c in other.terms))

    def scale(self, c) -> "ExpPoly":
        c = rat(c)
        return ExpPoly.from_terms(tuple((q, c * co) for q, co in self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def sign(self) -> int:
        if not self.terms:
            return 0
        prec = 64
        while True:
            with mpmath.workprec(prec):
                total = mpmath.iv.mpf(0)
                for q, c in self.terms:
                    qv = mpmath.iv.mpf(q.numerator) / mpmath.iv.mpf(q.denominator)
                    cv = mpmath.iv.mpf(c.numerator) / mpmath.iv.mpf(c.denominator)
                    total += cv * mpmath.iv.exp(-qv)
                if total.a > 0:
                    return 1
                if total.b < 0:
                    return -1
            prec *= 2
            if prec > 1 << 16:  # unreachable for honest ring elements
                raise ArithmeticError("sign refinement did not terminate")

    def __lt__(self, other: "ExpPoly") -> bool:
        return (self - other).sign() < 0

    def __le__(self, other: "ExpPoly") -> bool:
        return (self - other).sign() <= 0

    def approx(self) -> float:
        return float(sum(float(c) * math.exp(-float(q)) for q, c in self.terms))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for q, c in self.terms:
            parts.append(str(c) if q == 0 else f"{c}*exp(-{q})")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# finite metric spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteMetric:
    """Finite metric space with exact rational distances."""

    dist: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.dist)
        for i, row in enumerate(self.dist):
            if len(row) != n:
                raise PreconditionError("distance matrix must be square")
            if row[i] != 0:
                raise PreconditionError("diagonal of a metric is zero")
            for j in range(n):
                if row[j] < 0 or row[j] != self.dist[j][i]:
                    raise PreconditionError("metric must be symmetric and nonnegative")
                if i != j and row[j] == 0:
                    raise PreconditionError("distinct points at distance zero")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.dist[i][j] > self.dist[i][k] + self.dist[k][j]:
                        raise PreconditionError(
                            f"triangle inequality fails at ({i}, {j}, {k})")

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "FiniteMetric":
        return FiniteMetric(tuple(tuple(rat(x) for x in row) for row in rows))

    @property
    def points(self) -> int:
        return len(self.dist)

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    def diameter(self) -> Fraction:
        return max((x for row in self.dist for x in row), default=Fraction(0))


@dataclass(frozen=True)
class FiniteIsometry:
    """Distance-preserving permutation of the points of a FiniteMetric."""

    perm: tuple[int, ...]

    @staticmethod
    def checked(perm: Sequence[int], fm: FiniteMetric) -> "FiniteIsometry":
        p = tuple(perm)
        if sorted(p) != list(range(fm.points)):
            raise PreconditionError("not a permutation")
        for i in range(fm.points):
            for j in range(fm.points):
                if fm.d(p[i], p[j]) != fm.d(i, j):
                    raise PreconditionError("permutation does not preserve distances")
        return FiniteIsometry(p)

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def compose(self, other: "FiniteIsometry") -> "FiniteIsometry":
        return FiniteIsometry(tuple(self.perm[other.perm[i]] for i in range(len(self.perm))))

    def inverse(self) -> "FiniteIsometry":
        inv = [0] * len(self.perm)
        for i, p in enumerate(self.perm):
            inv[p] = i
        return FiniteIsometry(tuple(inv))


def isometry_group(fm: FiniteMetric) -> tuple[FiniteIsometry, ...]:
    """All isometries, by backtracking on distance profiles (small spaces only)."""
    n = fm.points
    if n > 8:
        raise PreconditionError("full isometry enumeration is limited to 8 points")
    out = []
    for perm in itertools.permutations(range(n)):
        if all(fm.d(perm[i], perm[j]) == fm.d(i, j)
               for i in range(n) for j in range(i + 1, n)):
            out.append(FiniteIsometry(perm))
    return tuple(out)


def cycle_metric(n: int) -> FiniteMetric:
    """Unit-edge cycle graph metric on n points."""
    rows = [[Fraction(min(abs(i - j), n - abs(i - j))) for j in range(n)]
            for i in range(n)]
    return FiniteMetric.from_rows(rows)


def path_metric(n: int) -> FiniteMetric:
    rows = [[Fraction(abs(i - j)) for j in range(n)] for i in range(n)]
    return FiniteMetric.from_rows(rows)


# ---------------------------------------------------------------------------
# hulls, gauges, Busemann distances
# ---------------------------------------------------------------------------

def vn_hull(fm: FiniteMetric, a: Iterable[int], ell, n: int) -> frozenset[int]:
    """Iterated closed-ball hull V_n(A, ell)."""
    ell = rat(ell)
    if ell <= 0:
        raise PreconditionError("scale must be positive")
    current = frozenset(a)
    for _ in range(n):
        nxt = frozenset(p for p in range(fm.points)
                        if any(fm.d(y, p) <= ell for y in current))
        if nxt == current:
            break
        current = nxt
    return current


def busemann_gauge(fm: FiniteMetric, o: int, ell) -> tuple[Fraction, ...]:
    """rho(p) = ell * min{n : p in V_n(o, ell)}; needs connectivity at scale ell."""
    ell = rat(ell)
    if ell <= 0:
        raise PreconditionError("scale must be positive")
    rho: list[Fraction | None] = [None] * fm.points
    rho[o] = Fraction(0)
    current = frozenset([o])
    step = 0
    while None in rho:
        nxt = frozenset(p for p in range(fm.points)
                        if any(fm.d(y, p) <= ell for y in current))
        step += 1
        if nxt == current:
            missing = [p for p, v in enumerate(rho) if v is None]
            raise PreconditionError(
                f"points {missing} unreachable from {o} at scale {ell}")
        for p in nxt - current:
            rho[p] = ell * step
        current = nxt
    out = tuple(rho)
    for p in range(fm.points):
        if fm.d(o, p) > out[p]:
            raise PreconditionError("gauge fails d(o, p) <= rho(p)")  # impossible by construction
    return out


def busemann_distance(isoms: Sequence[FiniteIsometry], fm: FiniteMetric,
                      rho: Sequence[Fraction], eps) -> list[list[ExpPoly]]:
    """d_G(g, h) = max_p d(gp, hp) e^(-rho(p)/eps) as exact ring elements.

    The input family must be a finite group (closure under composition and
    inverses is checked).  Left-invariance holds term by term because each
    k in the group permutes nothing in the weights and preserves d.
    """
    eps = rat(eps)
    if eps <= 0:
        raise PreconditionError("epsilon must be positive")
    perms = {g.perm for g in isoms}
    for g in isoms:
        if g.inverse().perm not in perms:
            raise PreconditionError("isometry family not closed under inverses")
        for h in isoms:
            if g.compose(h).perm not in perms:
                raise PreconditionError("isometry family not closed under composition")
    for g in isoms:
        FiniteIsometry.checked(g.perm, fm)

    def dist(g: FiniteIsometry, h: FiniteIsometry) -> ExpPoly:
        best = ExpPoly.zero()
        for p in range(fm.points):
            term = ExpPoly.monomial(fm.d(g(p), h(p)), rho[p] / eps)
            if best < term:
                best = term
        return best

    return [[dist(g, h) for h in isoms] for g in isoms]
