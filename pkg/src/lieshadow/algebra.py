"""Lie algebras as exact structure-constant tensors.

Brackets, adjoint maps, derived and lower central series, Killing form and
annihilators, radical and nilradical, the type-(R) test, and the standard
constructions (semidirect sums by derivations, quotients, direct sums).
The constructor rejects any tensor violating antisymmetry or the Jacobi
identity, so every LieAlgebra in the system is honest.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import PreconditionError, VerificationError
from .linalg import (RatMatrix, Subspace, Vector, kernel, rat, stack_rows,
                     symmetric_signature, unit_vector, vec_add, vec_is_zero,
                     vec_scale, vec_sub, vector, zero_vector)
from .roots import has_purely_imaginary_spectrum


class JacobiError(ValueError):
    """Structure tensor fails antisymmetry or the Jacobi identity."""

    def __init__(self, message: str, triple: tuple[int, ...]):
        super().__init__(message)
        self.triple = triple


@dataclass(frozen=True)
class LieAlgebra:
    """Finite-dimensional Lie algebra over Q given by structure constants.

    structure[i][j] holds the coordinates of [e_i, e_j]; antisymmetry and the
    Jacobi identity are verified exactly for all basis triples on construction.
    """

    dim: int
    labels: tuple[str, ...]
    structure: tuple[tuple[Vector, ...], ...]

    def __post_init__(self):
        n = self.dim
        if len(self.labels) != n or len(self.structure) != n:
            raise ValueError("dimension mismatch in labels or structure")
        for row in self.structure:
            if len(row) != n or any(len(v) != n for v in row):
                raise ValueError("structure tensor has wrong shape")
        for i in range(n):
            for j in range(i, n):
                lhs = self.structure[i][j]
                rhs = vec_scale(Fraction(-1), self.structure[j][i])
                if lhs != rhs:
                    raise JacobiError(f"antisymmetry fails at basis pair ({i}, {j})",
                                      (i, j))
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    s = vec_add(
                        vec_add(self.bracket_vec(self.structure[i][j], unit_vector(n, k)),
                                self.bracket_vec(self.structure[j][k], unit_vector(n, i))),
                        self.bracket_vec(self.structure[k][i], unit_vector(n, j)))
                    if not vec_is_zero(s):
                        raise JacobiError(
                            f"Jacobi identity fails at basis triple ({i}, {j}, {k})",
                            (i, j, k))

    @staticmethod
    def from_brackets(dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]],
                      labels: Sequence[str] | None = None) -> "LieAlgebra":
        """Build from sparse brackets given for i < j; antisymmetry is filled in."""
        labels = tuple(labels) if labels is not None else tuple(f"e{i + 1}" for i in range(dim))
        table = [[list(zero_vector(dim)) for _ in range(dim)] for _ in range(dim)]
        for (i, j), coeffs in brackets.items():
            if not (0 <= i < j < dim):
                raise ValueError(f"bracket key ({i}, {j}) must satisfy 0 <= i < j < dim")
            for k, c in coeffs.items():
                table[i][j][k] = rat(c)
                table[j][i][k] = -rat(c)
        structure = tuple(tuple(tuple(v) for v in row) for row in table)
        return LieAlgebra(dim, labels, structure)

    def bracket_vec(self, x: Sequence, y: Sequence) -> Vector:
        x, y = vector(x), vector(y)
        if len(x) != self.dim or len(y) != self.dim:
            raise PreconditionError("element dimension mismatch")
        out = list(zero_vector(self.dim))
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                c = xi * yj
                for k, s in enumerate(self.structure[i][j]):
                    if s != 0:
                        out[k] += c * s
        return tuple(out)

    def ad_vec(self, x: Sequence) -> RatMatrix:
        """Matrix of y -> [x, y]."""
        cols = [self.bracket_vec(x, unit_vector(self.dim, j)) for j in range(self.dim)]
        return RatMatrix.from_rows([[cols[j][i] for j in range(self.dim)]
                                    for i in range(self.dim)],
                                   cols=self.dim)

    def basis_element(self, i: int) -> "Element":
        return Element(self, unit_vector(self.dim, i))

    def element(self, coords: Sequence) -> "Element":
        return Element(self, vector(coords))

    def full_space(self) -> Subspace:
        return Subspace.full(self.dim)

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, labels={self.labels})"


@dataclass(frozen=True)
class Element:
    algebra: LieAlgebra
    coords: Vector

    def __post_init__(self):
        if len(self.coords) != self.algebra.dim:
            raise PreconditionError("coordinate length does not match the algebra")

    def __add__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, vec_add(self.coords, other.coords))

    def __sub__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, vec_sub(self.coords, other.coords))

    def __rmul__(self, c) -> "Element":
        return Element(self.algebra, vec_scale(rat(c), self.coords))

    def bracket(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, self.algebra.bracket_vec(self.coords, other.coords))

    def is_zero(self) -> bool:
        return vec_is_zero(self.coords)

    def _same(self, other: "Element"):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise PreconditionError("elements of different algebras")


def bracket(g: LieAlgebra, x, y) -> Element:
    xs = x.coords if isinstance(x, Element) else x
    ys = y.coords if isinstance(y, Element) else y
    return g.element(g.bracket_vec(xs, ys))


def ad(g: LieAlgebra, x) -> RatMatrix:
    xs = x.coords if isinstance(x, Element) else x
    return g.ad_vec(xs)


# ---------------------------------------------------------------------------
# series and basic structure
# ---------------------------------------------------------------------------

def bracket_subspaces(g: LieAlgebra, s: Subspace, t: Subspace) -> Subspace:
    vecs = [g.bracket_vec(a, b) for a in s.basis for b in t.basis]
    return Subspace.span(vecs, g.dim)


def derived_series(g: LieAlgebra) -> tuple[Subspace, ...]:
    series = [g.full_space()]
    while True:
        nxt = bracket_subspaces(g, series[-1], series[-1])
        if nxt == series[-1]:
            break
        series.append(nxt)
    return tuple(series)


def lower_central_series(g: LieAlgebra) -> tuple[Subspace, ...]:
    series = [g.full_space()]
    while True:
        nxt = bracket_subspaces(g, g.full_space(), series[-1])
        if nxt == series[-1]:
            break
        series.append(nxt)
    return tuple(series)


def is_solvable(g: LieAlgebra) -> bool:
    return derived_series(g)[-1].dim == 0


def is_nilpotent(g: LieAlgebra) -> bool:
    return lower_central_series(g)[-1].dim == 0


def center(g: LieAlgebra) -> Subspace:
    if g.dim == 0:
        return Subspace.zero(0)
    # x is central iff [x, e_j] = 0 for all j; linear in x
    rows = []
    for j in range(g.dim):
        for k in range(g.dim):
            rows.append([g.structure[i][j][k] for i in range(g.dim)])
    return kernel(RatMatrix.from_rows(rows, cols=g.dim))


def is_ideal(g: LieAlgebra, s: Subspace) -> bool:
    return s.contains_subspace(bracket_subspaces(g, g.full_space(), s))


def is_subalgebra(g: LieAlgebra, s: Subspace) -> bool:
    return s.contains_subspace(bracket_subspaces(g, s, s))


def subalgebra_on(g: LieAlgebra, s: Subspace) -> LieAlgebra:
    """The algebra structure induced on a bracket-closed subspace."""
    if not is_subalgebra(g, s):
        raise PreconditionError("subspace is not closed under the bracket")
    structure = tuple(
        tuple(s.coordinates(g.bracket_vec(a, b)) for b in s.basis)
        for a in s.basis)
    labels = tuple(f"s{i + 1}" for i in range(s.dim))
    return LieAlgebra(s.dim, labels, structure)


def normalizer(g: LieAlgebra, s: Subspace) -> Subspace:
    """{ y : [y, s] is contained in s }."""
    ann = s.annihilator().basis
    rows = []
    for b in s.basis:
        adb = g.ad_vec(b)  # [b, y] = adb(y); [y, b] = -adb(y), same span condition
        for a in ann:
            rows.append([sum(a[k] * adb.entries[k][i] for k in range(g.dim))
                         for i in range(g.dim)])
    if not rows:
        return g.full_space()
    return kernel(RatMatrix.from_rows(rows, cols=g.dim))


# ---------------------------------------------------------------------------
# Killing form, radical, nilradical
# ---------------------------------------------------------------------------

def killing_form(g: LieAlgebra) -> RatMatrix:
    """B_ij = trace(ad e_i . ad e_j); symmetric and invariant."""
    ads = [g.ad_vec(unit_vector(g.dim, i)) for i in range(g.dim)]
    ent = [[(ads[i] @ ads[j]).trace() for j in range(g.dim)] for i in range(g.dim)]
    return RatMatrix.from_rows(ent, cols=g.dim)


def killing_annihilator(g: LieAlgebra, s: Subspace) -> Subspace:
    """{ X : B(X, s) = 0 }, computed as an exact kernel."""
    if s.ambient != g.dim:
        raise PreconditionError("subspace does not live in the algebra")
    b = killing_form(g)
    rows = [b.apply(v) for v in s.basis]
    if not rows:
        return g.full_space()
    return kernel(RatMatrix.from_rows(rows, cols=g.dim))


def radical(g: LieAlgebra, verify: bool = True) -> Subspace:
    """Largest solvable ideal, via the Cartan criterion: [g,g]^B."""
    derived = bracket_subspaces(g, g.full_space(), g.full_space())
    r = killing_annihilator(g, derived)
    if verify:
        if not is_ideal(g, r):
            raise VerificationError("radical candidate is not an ideal")
        if r.dim and not is_solvable(subalgebra_on(g, r)):
            raise VerificationError("radical candidate is not solvable")
        q, _ = quotient(g, r, verify=False)
        if q.dim and symmetric_signature(killing_form(q))[2] != 0:
            raise VerificationError("quotient by radical has degenerate Killing form")
    return r


def _associative_hull(mats: list[RatMatrix], dim: int) -> list[RatMatrix]:
    """Basis of the (non-unital) associative algebra generated by the matrices."""
    def flat(m):
        return [x for row in m.entries for x in row]

    basis: list[RatMatrix] = []
    rows: list[list[Fraction]] = []
    rank = 0

    def try_add(m: RatMatrix) -> bool:
        nonlocal rank
        from .linalg import rref
        trial = [r[:] for r in rows] + [flat(m)]
        red, piv = rref(trial)
        if len(piv) > rank:
            rows.append(flat(m))
            basis.append(m)
            rank = len(piv)
            return True
        return False

    gens = [m for m in mats if not m.is_zero()]
    queue = [m for m in gens if try_add(m)]
    while queue:
        a = queue.pop()
        for gmat in gens:
            for prod in (a @ gmat, gmat @ a):
                if try_add(prod):
                    queue.append(prod)
    return basis


def nilradical(g: LieAlgebra, verify: bool = True) -> Subspace:
    """Largest nilpotent ideal.

    Inside the radical r, an element x is in the nilradical exactly when
    ad(x) lies in the trace-form radical of the associative hull of ad(r)
    (Dickson's criterion in characteristic zero); that common kernel of the
    adjoint weights is a single exact kernel computation.
    """
    r = radical(g, verify=False)
    if r.dim == 0:
        return r
    ad_r = [g.ad_vec(v) for v in r.basis]
    hull = _associative_hull(ad_r, g.dim)
    if hull:
        rows = [[(g.ad_vec(v) @ b).trace() for v in r.basis] for b in hull]
        t_kernel = kernel(RatMatrix.from_rows(rows, cols=r.dim))
        vecs = []
        for t in t_kernel.basis:
            w = zero_vector(g.dim)
            for c, bv in zip(t, r.basis):
                w = vec_add(w, vec_scale(c, bv))
            vecs.append(w)
        n = Subspace.span(vecs, g.dim)
    else:
        n = r  # ad(r) = 0: the radical is abelian, hence its own nilradical
    if verify:
        if not is_ideal(g, n):
            raise VerificationError("nilradical candidate is not an ideal")
        if n.dim and not is_nilpotent(subalgebra_on(g, n)):
            raise VerificationError("nilradical candidate is not nilpotent")
        if not n.contains_subspace(bracket_subspaces(g, g.full_space(), r)):
            raise VerificationError("nilradical does not contain [g, radical]")
        # maximality: no single-vector extension inside the radical stays nilpotent
        for w in n.complement_in(r).basis:
            ext = n.add(Subspace.span([w], g.dim))
            if is_ideal(g, ext) and is_nilpotent(subalgebra_on(g, ext)):
                raise VerificationError("nilradical candidate is not maximal")
    return n


# ---------------------------------------------------------------------------
# type (R)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeRVerdict:
    is_type_r: bool
    confidence: str            # "exact" or "sampled"
    samples: int = 0
    seed: int | None = None

    def __bool__(self):
        return self.is_type_r


def is_type_R(g: LieAlgebra, samples: int = 25, seed: int = 0) -> TypeRVerdict:
    """Purely imaginary ad-spectrum for every element.

    Solvable algebras: exact, because the adjoint weights are linear
    functionals, so real combinations of basis vectors with purely imaginary
    ad-spectra keep that property.  Non-solvable algebras: the basis check
    plus seeded random samples, reported with a "sampled" confidence tag.
    A False verdict is always exact.
    """
    for i in range(g.dim):
        if not has_purely_imaginary_spectrum(g.ad_vec(unit_vector(g.dim, i))):
            return TypeRVerdict(False, "exact")
    if is_solvable(g):
        return TypeRVerdict(True, "exact")
    rng = random.Random(seed)
    for _ in range(samples):
        x = tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(g.dim))
        if not has_purely_imaginary_spectrum(g.ad_vec(x)):
            return TypeRVerdict(False, "exact")
    return TypeRVerdict(True, "sampled", samples, seed)


# ---------------------------------------------------------------------------
# derivations, homomorphisms, constructions
# ---------------------------------------------------------------------------

def is_derivation(g: LieAlgebra, d: RatMatrix) -> bool:
    """D[x,y] = [Dx,y] + [x,Dy] on all basis pairs."""
    if d.rows != g.dim or d.cols != g.dim:
        raise PreconditionError("derivation candidate has wrong shape")
    for i in range(g.dim):
        ei = unit_vector(g.dim, i)
        for j in range(i + 1, g.dim):
            ej = unit_vector(g.dim, j)
            lhs = d.apply(g.structure[i][j])
            rhs = vec_add(g.bracket_vec(d.apply(ei), ej),
                          g.bracket_vec(ei, d.apply(ej)))
            if lhs != rhs:
                return False
    return True


@dataclass(frozen=True)
class LieHom:
    source: LieAlgebra
    target: LieAlgebra
    matrix: RatMatrix

    def __post_init__(self):
        if self.matrix.cols != self.source.dim or self.matrix.rows != self.target.dim:
            raise PreconditionError("homomorphism matrix shape mismatch")


def check_hom(phi: LieHom) -> bool:
    g, h, m = phi.source, phi.target, phi.matrix
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = m.apply(g.structure[i][j])
            rhs = h.bracket_vec(m.apply(unit_vector(g.dim, i)),
                                m.apply(unit_vector(g.dim, j)))
            if lhs != rhs:
                return False
    return True


def semidirect_by_derivations(n: LieAlgebra,
                              gens: Sequence[tuple[str, RatMatrix]],
                              gen_brackets: Mapping[tuple[int, int], Mapping[int, object]]
                              | None = None) -> LieAlgebra:
    """Semidirect sum of n with a span of derivations.

    Bracket on n + span(gens): [X+D, X'+D'] = [X,X'] + DX' - D'X + (DD'-D'D),
    with the derivation commutators re-expressed through gen_brackets.
    """
    for name, d in gens:
        if not is_derivation(n, d):
            raise PreconditionError(f"generator {name!r} is not a derivation")
    k = len(gens)
    dim = n.dim + k
    gen_brackets = dict(gen_brackets or {})
    # commutators of the generator matrices must match the declared structure
    for a in range(k):
        for b in range(a + 1, k):
            comm = gens[a][1].commutator(gens[b][1])
            declared = RatMatrix.zero(n.dim, n.dim)
            for c, coeff in gen_brackets.get((a, b), {}).items():
                declared = declared + gens[c][1].scale(rat(coeff))
            if comm != declared:
                raise PreconditionError(
                    f"generator bracket [{gens[a][0]}, {gens[b][0]}] does not match "
                    "the commutator of the matrices")
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for i in range(n.dim):
        for j in range(i + 1, n.dim):
            coeffs = {kk: c for kk, c in enumerate(n.structure[i][j]) if c != 0}
            if coeffs:
                brackets[(i, j)] = coeffs
    for a in range(k):
        da = gens[a][1]
        for j in range(n.dim):
            v = da.apply(unit_vector(n.dim, j))
            coeffs = {kk: -c for kk, c in enumerate(v) if c != 0}
            if coeffs:
                brackets[(j, n.dim + a)] = coeffs  # [e_j, D_a] = -D_a e_j
        for b in range(a + 1, k):
            coeffs = {n.dim + c: rat(cf) for c, cf in gen_brackets.get((a, b), {}).items()
                      if rat(cf) != 0}
            if coeffs:
                brackets[(n.dim + a, n.dim + b)] = coeffs
    labels = n.labels + tuple(name for name, _ in gens)
    return LieAlgebra.from_brackets(dim, brackets, labels)


def direct_sum(g: LieAlgebra, h: LieAlgebra) -> LieAlgebra:
    dim = g.dim + h.dim
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            coeffs = {k: c for k, c in enumerate(g.structure[i][j]) if c != 0}
            if coeffs:
                brackets[(i, j)] = coeffs
    for i in range(h.dim):
        for j in range(i + 1, h.dim):
            coeffs = {g.dim + k: c for k, c in enumerate(h.structure[i][j]) if c != 0}
            if coeffs:
                brackets[(g.dim + i, g.dim + j)] = coeffs
    return LieAlgebra.from_brackets(dim, brackets, g.labels + h.labels)


def quotient(g: LieAlgebra, ideal: Subspace,
             verify: bool = True) -> tuple[LieAlgebra, RatMatrix]:
    """Quotient algebra and the projection matrix onto the chosen complement.

    The complement basis is the set of standard coordinates missed by the
    ideal's echelon pivots, so the construction is deterministic.
    """
    if verify and not is_ideal(g, ideal):
        raise PreconditionError("quotient by a subspace that is not an ideal")
    ideal_pivots = ideal.pivots()
    free = [c for c in range(g.dim) if c not in set(ideal_pivots)]
    proj_rows = []
    for c in free:
        # c-th coordinate of v after reducing v modulo the ideal
        row = list(unit_vector(g.dim, c))
        for bvec, p in zip(ideal.basis, ideal_pivots):
            row[p] -= bvec[c]
        proj_rows.append(row)
    proj = RatMatrix.from_rows(proj_rows, cols=g.dim)

    structure = tuple(
        tuple(proj.apply(g.bracket_vec(unit_vector(g.dim, a), unit_vector(g.dim, b)))
              for b in free)
        for a in free)
    labels = tuple(g.labels[c] for c in free)
    return LieAlgebra(len(free), labels, structure), proj


def change_basis(g: LieAlgebra, p: RatMatrix) -> LieAlgebra:
    """Structure constants in the basis whose vectors are the columns of p."""
    if p.rows != g.dim or p.cols != g.dim:
        raise PreconditionError("basis-change matrix has wrong shape")
    pinv = p.inverse()
    structure = tuple(
        tuple(pinv.apply(g.bracket_vec(p.col(i), p.col(j))) for j in range(g.dim))
        for i in range(g.dim))
    return LieAlgebra(g.dim, g.labels, structure)


# ---------------------------------------------------------------------------
# invariant fingerprint
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantFingerprint:
    dim: int
    derived_dims: tuple[int, ...]
    lower_central_dims: tuple[int, ...]
    center_dim: int
    killing_rank: int
    killing_signature: tuple[int, int, int]
    nilradical_dim: int


def fingerprint(g: LieAlgebra) -> InvariantFingerprint:
    b = killing_form(g)
    sig = symmetric_signature(b)
    return InvariantFingerprint(
        dim=g.dim,
        derived_dims=tuple(s.dim for s in derived_series(g)),
        lower_central_dims=tuple(s.dim for s in lower_central_series(g)),
        center_dim=center(g).dim,
        killing_rank=b.rank(),
        killing_signature=sig,
        nilradical_dim=nilradical(g, verify=False).dim,
    )
