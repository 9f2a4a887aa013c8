"""Exact rational linear algebra.

Matrices, row-span subspaces in canonical echelon form, dense univariate
polynomials over Q, and the Jordan-Chevalley decomposition computed by a
Newton iteration modulo the squarefree part of the characteristic polynomial
(no splitting fields).  Everything here is immutable and exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionError, VerificationError

Vector = tuple[Fraction, ...]


def rat(x) -> Fraction:
    """Coerce ints, strings like "3/4", and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("refusing to coerce float to exact rational: %r" % (x,))
    return Fraction(x)


def vector(xs: Iterable) -> Vector:
    return tuple(rat(x) for x in xs)


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(c: Fraction, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def vec_is_zero(v: Vector) -> bool:
    return all(a == 0 for a in v)


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatMatrix:
    """Immutable matrix with Fraction entries (row-major)."""

    rows: int
    cols: int
    entries: tuple[Vector, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged rows")

    @staticmethod
    def from_rows(rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        ent = tuple(vector(r) for r in rows)
        if ent:
            cols = len(ent[0])
        elif cols is None:
            raise ValueError("empty matrix needs an explicit column count")
        return RatMatrix(len(ent), cols, ent)

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        return RatMatrix(n, n, tuple(unit_vector(n, i) for i in range(n)))

    @staticmethod
    def zero(rows: int, cols: int) -> "RatMatrix":
        return RatMatrix(rows, cols, tuple(zero_vector(cols) for _ in range(rows)))

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(vec_is_zero(r) for r in self.entries)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._shape_check(other)
        return RatMatrix(self.rows, self.cols,
                         tuple(vec_add(a, b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        self._shape_check(other)
        return RatMatrix(self.rows, self.cols,
                         tuple(vec_sub(a, b) for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RatMatrix":
        return self.scale(Fraction(-1))

    def scale(self, c) -> "RatMatrix":
        c = rat(c)
        return RatMatrix(self.rows, self.cols, tuple(vec_scale(c, r) for r in self.entries))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        cols = [other.col(j) for j in range(other.cols)]
        ent = tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.entries)
        return RatMatrix(self.rows, other.cols, ent)

    def apply(self, v: Sequence) -> Vector:
        v = vector(v)
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.entries)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, tuple(self.col(j) for j in range(self.cols)))

    def trace(self) -> Fraction:
        if not self.is_square():
            raise ValueError("trace of non-square matrix")
        return sum((self.entries[i][i] for i in range(self.rows)), Fraction(0))

    def power(self, k: int) -> "RatMatrix":
        if not self.is_square():
            raise ValueError("power of non-square matrix")
        if k < 0:
            raise ValueError("negative power")
        result = RatMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base if k > 1 else base
            k >>= 1
        return result

    def commutator(self, other: "RatMatrix") -> "RatMatrix":
        return self @ other - other @ self

    def rank(self) -> int:
        _, pivots = rref([list(r) for r in self.entries])
        return len(pivots)

    def inverse(self) -> "RatMatrix":
        if not self.is_square():
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = [list(r) + list(unit_vector(n, i)) for i, r in enumerate(self.entries)]
        red, pivots = rref(aug)
        if len(pivots) != n or pivots != list(range(n)):
            raise ValueError("matrix is singular")
        return RatMatrix.from_rows([row[n:] for row in red])

    def _shape_check(self, other: "RatMatrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __str__(self):
        return "[" + "; ".join(" ".join(str(x) for x in r) for r in self.entries) + "]"


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place; returns (rows, pivot columns)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """Row span in canonical reduced echelon form; equality is representation equality."""

    ambient: int
    basis: tuple[Vector, ...]

    @staticmethod
    def span(vectors: Iterable[Sequence], ambient: int) -> "Subspace":
        rows = [list(vector(v)) for v in vectors]
        for r in rows:
            if len(r) != ambient:
                raise ValueError("vector length does not match ambient dimension")
        red, pivots = rref(rows)
        basis = tuple(tuple(red[i]) for i in range(len(pivots)))
        return Subspace(ambient, basis)

    @staticmethod
    def zero(ambient: int) -> "Subspace":
        return Subspace(ambient, ())

    @staticmethod
    def full(ambient: int) -> "Subspace":
        return Subspace.span([unit_vector(ambient, i) for i in range(ambient)], ambient)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> list[int]:
        out = []
        for row in self.basis:
            out.append(next(j for j, x in enumerate(row) if x != 0))
        return out

    def reduce(self, v: Sequence) -> Vector:
        """Remainder of v after eliminating this subspace's pivot coordinates."""
        w = list(vector(v))
        for row, p in zip(self.basis, self.pivots()):
            if w[p] != 0:
                f = w[p]
                w = [a - f * b for a, b in zip(w, row)]
        return tuple(w)

    def contains(self, v: Sequence) -> bool:
        return vec_is_zero(self.reduce(v))

    def coordinates(self, v: Sequence) -> Vector:
        """Coefficients of v in this basis; raises if v is outside the span."""
        w = list(vector(v))
        coeffs = []
        for row, p in zip(self.basis, self.pivots()):
            f = w[p]
            coeffs.append(f)
            if f != 0:
                w = [a - f * b for a, b in zip(w, row)]
        if not vec_is_zero(tuple(w)):
            raise ValueError("vector not in subspace")
        return tuple(coeffs)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def add(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.basis + other.basis, self.ambient)

    def annihilator(self) -> "Subspace":
        """Functionals vanishing on this subspace (standard dot pairing)."""
        m = RatMatrix.from_rows(self.basis, cols=self.ambient)
        return kernel(m)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch")
        rows = self.annihilator().basis + other.annihilator().basis
        return kernel(RatMatrix.from_rows(rows, cols=self.ambient))

    def extend_with(self, candidates: Iterable[Sequence]) -> list[Vector]:
        """Greedily pick candidates that enlarge the span; returns the picked vectors."""
        picked: list[Vector] = []
        current = list(self.basis)
        rank = self.dim
        for cand in candidates:
            trial = [list(r) for r in current] + [list(vector(cand))]
            _, piv = rref(trial)
            if len(piv) > rank:
                picked.append(vector(cand))
                current.append(vector(cand))
                rank += 1
        return picked

    def complement_in(self, bigger: "Subspace") -> "Subspace":
        """Deterministic complement of self inside bigger (uses bigger's echelon basis)."""
        if not bigger.contains_subspace(self):
            raise ValueError("not a subspace of the given space")
        picked = self.extend_with(bigger.basis)
        return Subspace.span(picked, self.ambient)


def kernel(m: RatMatrix) -> Subspace:
    """Exact null space of m, in canonical echelon form."""
    red, pivots = rref([list(r) for r in m.entries])
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(v)
    return Subspace.span(basis, m.cols)


def stack_rows(matrices: Iterable[RatMatrix]) -> RatMatrix:
    mats = list(matrices)
    if not mats:
        raise ValueError("nothing to stack")
    cols = mats[0].cols
    rows: list[Vector] = []
    for m in mats:
        if m.cols != cols:
            raise ValueError("column mismatch")
        rows.extend(m.entries)
    return RatMatrix(len(rows), cols, tuple(rows))


def symmetric_signature(b: RatMatrix) -> tuple[int, int, int]:
    """Signature (positive, negative, zero) of a symmetric rational matrix.

    Computed by exact congruence reduction; Sylvester's law makes the result
    basis independent.
    """
    if not b.is_square():
        raise ValueError("signature of non-square matrix")
    n = b.rows
    a = [[b.entries[i][j] for j in range(n)] for i in range(n)]
    pos = neg = 0
    alive = list(range(n))
    while alive:
        piv = next((i for i in alive if a[i][i] != 0), None)
        if piv is None:
            # look for an off-diagonal entry and fold it onto the diagonal
            pair = None
            for i in alive:
                for j in alive:
                    if i != j and a[i][j] != 0:
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                break  # remaining block is zero
            i, j = pair
            for k in range(n):
                a[i][k] = a[i][k] + a[j][k]
            for k in range(n):
                a[k][i] = a[k][i] + a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for i in alive:
            if i == piv or a[i][piv] == 0:
                continue
            f = a[i][piv] / d
            for k in range(n):
                a[i][k] = a[i][k] - f * a[piv][k]
            for k in range(n):
                a[k][i] = a[k][i] - f * a[k][piv]
        alive.remove(piv)
    zero = n - pos - neg
    return pos, neg, zero


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatPoly:
    """Dense polynomial over Q, coefficients lowest degree first, normalized."""

    coeffs: tuple[Fraction, ...]

    @staticmethod
    def from_coeffs(cs: Iterable) -> "RatPoly":
        cs = [rat(c) for c in cs]
        while cs and cs[-1] == 0:
            cs.pop()
        return RatPoly(tuple(cs))

    @staticmethod
    def zero() -> "RatPoly":
        return RatPoly(())

    @staticmethod
    def one() -> "RatPoly":
        return RatPoly.from_coeffs([1])

    @staticmethod
    def x() -> "RatPoly":
        return RatPoly.from_coeffs([0, 1])

    @staticmethod
    def constant(c) -> "RatPoly":
        return RatPoly.from_coeffs([c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial has degree -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> Fraction:
        if self.is_zero():
            raise ValueError("leading coefficient of zero polynomial")
        return self.coeffs[-1]

    def monic(self) -> "RatPoly":
        if self.is_zero():
            return self
        inv = 1 / self.lc()
        return RatPoly.from_coeffs([c * inv for c in self.coeffs])

    def __add__(self, other: "RatPoly") -> "RatPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return RatPoly.from_coeffs([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "RatPoly") -> "RatPoly":
        return self + (-other)

    def __neg__(self) -> "RatPoly":
        return RatPoly.from_coeffs([-c for c in self.coeffs])

    def __mul__(self, other: "RatPoly") -> "RatPoly":
        if self.is_zero() or other.is_zero():
            return RatPoly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RatPoly.from_coeffs(out)

    def scale(self, c) -> "RatPoly":
        c = rat(c)
        return RatPoly.from_coeffs([c * a for a in self.coeffs])

    def __divmod__(self, other: "RatPoly") -> tuple["RatPoly", "RatPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(0, self.degree - other.degree + 1)
        r = list(self.coeffs)
        d = other.degree
        lc = other.lc()
        while len(r) - 1 >= d and any(c != 0 for c in r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) - 1 < d:
                break
            k = len(r) - 1 - d
            f = r[-1] / lc
            q[k] = f
            for i, c in enumerate(other.coeffs):
                r[k + i] -= f * c
            r.pop()
        return RatPoly.from_coeffs(q), RatPoly.from_coeffs(r)

    def __floordiv__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[1]

    def pow(self, k: int) -> "RatPoly":
        result = RatPoly.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def derivative(self) -> "RatPoly":
        return RatPoly.from_coeffs([i * c for i, c in enumerate(self.coeffs)][1:])

    def eval_at(self, x) -> Fraction:
        x = rat(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_matrix(self, m: RatMatrix) -> RatMatrix:
        if not m.is_square():
            raise ValueError("polynomial of non-square matrix")
        acc = RatMatrix.zero(m.rows, m.cols)
        for c in reversed(self.coeffs):
            acc = acc @ m + RatMatrix.identity(m.rows).scale(c)
        return acc

    def compose_neg(self) -> "RatPoly":
        """p(-x)."""
        return RatPoly.from_coeffs([c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs)])

    def even_decimation(self) -> "RatPoly | None":
        """Return g with p(x) = g(x^2), or None if p is not even."""
        if any(c != 0 for c in self.coeffs[1::2]):
            return None
        return RatPoly.from_coeffs(self.coeffs[0::2])

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*x" if c != 1 else "x")
            else:
                parts.append(f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return " + ".join(parts)


def poly_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    """Monic gcd."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_ext_gcd(a: RatPoly, b: RatPoly) -> tuple[RatPoly, RatPoly, RatPoly]:
    """Monic g and u, v with u*a + v*b = g."""
    r0, r1 = a, b
    s0, s1 = RatPoly.one(), RatPoly.zero()
    t0, t1 = RatPoly.zero(), RatPoly.one()
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = 1 / r0.lc()
    return r0.monic(), s0.scale(inv), t0.scale(inv)


def squarefree_part(p: RatPoly) -> RatPoly:
    if p.is_zero():
        return p
    g = poly_gcd(p, p.derivative())
    if g.degree <= 0:
        return p.monic()
    return (p // g).monic()


# ---------------------------------------------------------------------------
# characteristic polynomial and Jordan-Chevalley
# ---------------------------------------------------------------------------

def char_poly(m: RatMatrix) -> RatPoly:
    """Monic characteristic polynomial det(xI - m) by Faddeev-LeVerrier."""
    if not m.is_square():
        raise PreconditionError("characteristic polynomial of non-square matrix")
    n = m.rows
    coeffs_high_first = [Fraction(1)]  # x^n
    mk = RatMatrix.identity(n)
    for k in range(1, n + 1):
        mk = m @ mk
        c = -mk.trace() / k
        coeffs_high_first.append(c)
        mk = mk + RatMatrix.identity(n).scale(c)
    return RatPoly.from_coeffs(list(reversed(coeffs_high_first)))


@dataclass(frozen=True)
class JordanPair:
    """Commuting semisimple + nilpotent splitting of a square rational matrix."""

    semisimple: RatMatrix
    nilpotent: RatMatrix


def jordan_chevalley(m: RatMatrix) -> JordanPair:
    """Unique Jordan-Chevalley decomposition over Q.

    Newton iteration a <- a - q(a) * v(a) modulo nilpotents, where q is the
    squarefree part of char_poly(m) and u*q + v*q' = 1.  Converges once
    2^steps exceeds the matrix dimension.
    """
    if not m.is_square():
        raise PreconditionError("Jordan-Chevalley of non-square matrix")
    n = m.rows
    if n == 0:
        return JordanPair(m, m)
    p = char_poly(m)
    q = squarefree_part(p)
    g, _, v = poly_ext_gcd(q, q.derivative())
    if g.degree != 0:
        raise VerificationError("squarefree part not coprime with its derivative")
    a = m
    for _ in range(n.bit_length() + 2):
        qa = q.eval_matrix(a)
        if qa.is_zero():
            break
        a = a - qa @ v.eval_matrix(a)
    else:
        raise VerificationError("Jordan-Chevalley iteration failed to converge")
    if not q.eval_matrix(a).is_zero():
        raise VerificationError("semisimple candidate not annihilated by squarefree part")
    nil = m - a
    if not nil.power(n).is_zero():
        raise VerificationError("nilpotent part has nonzero n-th power")
    if not (a @ nil - nil @ a).is_zero():
        raise VerificationError("Jordan-Chevalley parts do not commute")
    return JordanPair(a, nil)


def primary_component(m: RatMatrix, factor: RatPoly, mult: int = 1) -> Subspace:
    """Kernel of factor(m)^mult; the rational form of a generalized eigenspace."""
    if not m.is_square():
        raise PreconditionError("primary component of non-square matrix")
    if mult < 1:
        raise PreconditionError("multiplicity must be positive")
    p = char_poly(m)
    fm = factor.pow(mult)
    if not (p % fm).is_zero():
        raise PreconditionError("factor does not divide the characteristic polynomial "
                                "with the stated multiplicity")
    return kernel(fm.eval_matrix(m))
