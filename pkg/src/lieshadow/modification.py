"""Modification maps sigma: n -> der(n) and their graph algebras.

The three axioms are checked exactly on basis data: (m1) homomorphism,
(m2) replaced by its finite equivalent (commuting images, each semisimple
with purely imaginary spectrum), and (m3) [sigma(n), n] inside ker(sigma).
Every false verdict carries a witness so that theorem violations can be told
apart from implementation bugs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import LieAlgebra, is_derivation, is_nilpotent, is_solvable, nilradical
from .errors import PreconditionError
from .linalg import (RatMatrix, Subspace, Vector, char_poly, kernel,
                     squarefree_part, unit_vector, vec_add, vec_scale,
                     zero_vector)
from .roots import has_purely_imaginary_spectrum

Witness = tuple | None


@dataclass(frozen=True)
class ModMap:
    """Linear map into der(base), one derivation matrix per basis vector."""

    base: LieAlgebra
    images: tuple[RatMatrix, ...]

    def __post_init__(self):
        if len(self.images) != self.base.dim:
            raise PreconditionError("one image matrix per basis vector required")
        if not is_nilpotent(self.base):
            raise PreconditionError("modification maps live on nilpotent algebras")
        for i, m in enumerate(self.images):
            if m.rows != self.base.dim or m.cols != self.base.dim:
                raise PreconditionError(f"image {i} has wrong shape")
            if not is_derivation(self.base, m):
                raise PreconditionError(f"image of basis vector {i} is not a derivation")

    def of(self, x) -> RatMatrix:
        """sigma(x) for a coordinate vector x, by linear extension."""
        acc = RatMatrix.zero(self.base.dim, self.base.dim)
        for c, m in zip(x, self.images):
            if c != 0:
                acc = acc + m.scale(c)
        return acc

    def kernel(self) -> Subspace:
        """Joint kernel of x -> sigma(x)."""
        n = self.base.dim
        rows = []
        for r in range(n):
            for c in range(n):
                rows.append([self.images[k].entries[r][c] for k in range(n)])
        return kernel(RatMatrix.from_rows(rows, cols=n))

    def image_space_basis(self) -> tuple[RatMatrix, ...]:
        """Echelon basis of span{sigma(e_i)} inside the matrix space."""
        n = self.base.dim
        flat = [[m.entries[r][c] for r in range(n) for c in range(n)]
                for m in self.images]
        sp = Subspace.span(flat, n * n)
        return tuple(RatMatrix.from_rows([v[r * n:(r + 1) * n] for r in range(n)],
                                         cols=n)
                     for v in sp.basis)


@dataclass(frozen=True)
class ModReport:
    m1: bool
    m1_witness: Witness
    m2: bool
    m2_witness: Witness
    m3: bool
    m3_witness: Witness
    abelian_image: bool

    @property
    def accepted(self) -> bool:
        return self.m1 and self.m2 and self.m3


def check_m1(sigma: ModMap) -> tuple[bool, Witness]:
    """sigma is a Lie algebra homomorphism into the commutator algebra."""
    n = sigma.base.dim
    for i in range(n):
        for j in range(i + 1, n):
            lhs = sigma.of(sigma.base.structure[i][j])
            rhs = sigma.images[i].commutator(sigma.images[j])
            if lhs != rhs:
                return False, (i, j)
    return True, None


def _is_semisimple(m: RatMatrix) -> bool:
    return squarefree_part(char_poly(m)).eval_matrix(m).is_zero()


def check_m2(sigma: ModMap) -> tuple[bool, Witness]:
    """Finite equivalent of precompact exponential image.

    Images must pairwise commute and every matrix in a spanning set of the
    image space must be semisimple with purely imaginary spectrum; commuting
    semisimple maps diagonalize simultaneously, so spectra of real
    combinations stay on the imaginary axis and the check on a spanning set
    decides the whole image.
    """
    n = sigma.base.dim
    for i in range(n):
        for j in range(i + 1, n):
            if not sigma.images[i].commutator(sigma.images[j]).is_zero():
                return False, ("noncommuting", i, j)
    for i, m in enumerate(sigma.images):
        if not (_is_semisimple(m) and has_purely_imaginary_spectrum(m)):
            return False, ("spectrum", i)
    for k, m in enumerate(sigma.image_space_basis()):
        if not (_is_semisimple(m) and has_purely_imaginary_spectrum(m)):
            return False, ("image-basis", k)
    return True, None


def check_m3(sigma: ModMap) -> tuple[bool, Witness]:
    """[sigma(n), n] lies in ker(sigma); linearity reduces this to basis pairs."""
    n = sigma.base.dim
    for i in range(n):
        for j in range(n):
            v = sigma.images[i].apply(unit_vector(n, j))
            if not sigma.of(v).is_zero():
                return False, (i, j)
    return True, None


def check_axioms(sigma: ModMap) -> ModReport:
    m1, w1 = check_m1(sigma)
    m2, w2 = check_m2(sigma)
    m3, w3 = check_m3(sigma)
    return ModReport(m1, w1, m2, w2, m3, w3, abelian_image=_abelian_image(sigma))


def _abelian_image(sigma: ModMap) -> bool:
    n = sigma.base.dim
    return all(sigma.images[i].commutator(sigma.images[j]).is_zero()
               for i in range(n) for j in range(i + 1, n))


def _graph_closed(sigma: ModMap) -> tuple[bool, Witness]:
    """The graph {X + sigma(X)} is bracket-closed in n (+) der(n).

    The derivation part of [e_i + sigma(e_i), e_j + sigma(e_j)] is the matrix
    commutator; closure demands it equals sigma of the n-part.
    """
    n = sigma.base.dim
    for i in range(n):
        for j in range(i + 1, n):
            npart = _graph_bracket_vec(sigma, unit_vector(n, i), unit_vector(n, j))
            if sigma.of(npart) != sigma.images[i].commutator(sigma.images[j]):
                return False, (i, j)
    return True, None


def _graph_bracket_vec(sigma: ModMap, x: Vector, y: Vector) -> Vector:
    v = sigma.base.bracket_vec(x, y)
    v = vec_add(v, sigma.of(x).apply(y))
    v = vec_add(v, vec_scale(Fraction(-1), sigma.of(y).apply(x)))
    return v


def lemma_upgrade(sigma: ModMap) -> ModReport:
    """Oracle for the upgrade lemma.

    Preconditions (checked, distinct failure): the (m2) equivalent holds, the
    image is abelian, and the graph is bracket-closed.  Under these the lemma
    guarantees (m1) and (m3); any failure in the returned report is a theorem
    violation, not a precondition problem.
    """
    if not _abelian_image(sigma):
        raise PreconditionError("upgrade lemma requires an abelian image")
    m2, w2 = check_m2(sigma)
    if not m2:
        raise PreconditionError(f"upgrade lemma requires the (m2) equivalent; witness {w2}")
    closed, wc = _graph_closed(sigma)
    if not closed:
        raise PreconditionError(f"graph is not bracket-closed; witness {wc}")
    m1, w1 = check_m1(sigma)
    m3, w3 = check_m3(sigma)
    return ModReport(m1, w1, m2, w2, m3, w3, abelian_image=True)


def graph_algebra(sigma: ModMap) -> LieAlgebra:
    """Gr(sigma) on the coordinate space of the base.

    Bracket [x, y] + sigma(x)y - sigma(y)x, the bracket of X+sigma(X) and
    Y+sigma(Y) in the semidirect sum once the image is abelian.  Solvability
    is verified ([Gr, Gr] lands back in the base ideal).
    """
    report = check_axioms(sigma)
    if not report.accepted:
        raise PreconditionError(f"graph algebra needs a valid modification map: {report}")
    n = sigma.base.dim
    structure = tuple(
        tuple(_graph_bracket_vec(sigma, unit_vector(n, i), unit_vector(n, j))
              for j in range(n))
        for i in range(n))
    g = LieAlgebra(n, sigma.base.labels, structure)
    if not is_solvable(g):
        raise PreconditionError("graph algebra failed the solvability check")
    return g


def kernel_is_nilradical(sigma: ModMap) -> bool:
    """ker(sigma) = nil(Gr(sigma)); a False return is a theorem-violation diagnostic."""
    return sigma.kernel() == nilradical(graph_algebra(sigma))


def shadow_roundtrip(sigma: ModMap) -> bool:
    """The nilshadow of Gr(sigma) recovers the base algebra.

    Structure constants are compared literally first (the graph lives on the
    base coordinates), falling back to the invariant-fingerprint isomorphism
    check when the shadow construction picked a different complement.
    """
    from .shadow import nilshadow  # local import; shadow builds ModMaps

    from .algebra import fingerprint
    shadow = nilshadow(graph_algebra(sigma)).shadow
    if shadow.structure == sigma.base.structure:
        return True
    return fingerprint(shadow) == fingerprint(sigma.base)


def sigma_identities(sigma: ModMap) -> bool:
    """Exact check of the two derived sigma identities on all basis pairs/triples.

    First: sigma[X, Y] = sigma[sigma(Y)X] - sigma[sigma(X)Y] (pair identity,
    with [D, X] = DX in the semidirect sum).  Second: the six-term expansion
    of sigma[[X1, X2], X3].
    """
    base = sigma.base
    n = base.dim

    def s(v) -> RatMatrix:
        return sigma.of(v)

    for i in range(n):
        ei = unit_vector(n, i)
        for j in range(n):
            ej = unit_vector(n, j)
            lhs = s(base.bracket_vec(ei, ej))
            rhs = s(s(ej).apply(ei)) - s(s(ei).apply(ej))
            if lhs != rhs:
                return False
    for i1 in range(n):
        x1 = unit_vector(n, i1)
        for i2 in range(n):
            x2 = unit_vector(n, i2)
            for i3 in range(n):
                x3 = unit_vector(n, i3)
                lhs = s(base.bracket_vec(base.bracket_vec(x1, x2), x3))
                inner = zero_vector(n)
                inner = vec_add(inner, s(s(x1).apply(x2)).apply(x3))
                inner = vec_add(inner, vec_scale(Fraction(-1), s(s(x2).apply(x1)).apply(x3)))
                inner = vec_add(inner, vec_scale(Fraction(-1), s(s(x3).apply(x1)).apply(x2)))
                inner = vec_add(inner, s(s(x3).apply(x2)).apply(x1))
                inner = vec_add(inner, s(x2).apply(s(x3).apply(x1)))
                inner = vec_add(inner, vec_scale(Fraction(-1), s(x1).apply(s(x3).apply(x2))))
                if s(inner) != lhs:
                    return False
    return True


def kernel_complement(sigma: ModMap) -> tuple[Subspace, Subspace]:
    """Splitting n = ker(sigma) (+) w with [sigma(n), w] = 0.

    w is a complement of ker(sigma) inside the joint kernel of the image
    matrices; (m3) forces the moving part of n into ker(sigma), which makes
    the splitting work.
    """
    report = check_axioms(sigma)
    if not report.accepted:
        raise PreconditionError("splitting requires a valid modification map")
    ker_sigma = sigma.kernel()
    joint = Subspace.full(sigma.base.dim)
    for m in sigma.images:
        joint = joint.intersect(kernel(m))
    w = ker_sigma.intersect(joint).complement_in(joint)
    return ker_sigma, w
