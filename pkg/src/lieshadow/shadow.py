"""Nilshadow construction for solvable type-(R) algebras.

Pick a Cartan subalgebra h as the Fitting null component of a verified
regular element, take v as a complement of h-meet-nilradical inside h (h
nilpotent forces ad_s(h)h = 0, so only the complement condition needs work),
and twist the bracket:

    [X, Y]_nil = [X, Y] - ad_s(pi_v(X)) Y + ad_s(pi_v(Y)) X.

The result is verified nilpotent, and the canonical modification map
sigma(X) = ad_s(pi_v(X)) regenerates the input as its graph algebra.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .algebra import (LieAlgebra, is_nilpotent, is_solvable, is_subalgebra,
                      is_type_R, nilradical, normalizer, subalgebra_on)
from .errors import PreconditionError, VerificationError
from .linalg import (RatMatrix, Subspace, Vector, jordan_chevalley, kernel,
                     unit_vector, vec_add, vec_is_zero, vec_scale, vector,
                     zero_vector)
from .modification import ModMap


def fitting_null(m: RatMatrix) -> Subspace:
    """Generalized 0-eigenspace: kernel of m^dim."""
    return kernel(m.power(m.rows))


def _candidate_elements(g: LieAlgebra, seed: int) -> Iterator[Vector]:
    n = g.dim
    for i in range(n):
        yield unit_vector(n, i)
    for i in range(n):
        for j in range(i + 1, n):
            yield vec_add(unit_vector(n, i), unit_vector(n, j))
            yield vec_add(unit_vector(n, i), vec_scale(Fraction(-1), unit_vector(n, j)))
    rng = random.Random(seed)
    while True:
        yield tuple(Fraction(rng.randint(-5, 5)) for _ in range(n))


def cartan_subalgebra(g: LieAlgebra, seed: int = 0, max_tries: int = 64) -> Subspace:
    """A nilpotent self-normalizing subalgebra of a solvable algebra.

    Samples candidate elements (small, height-ordered, then seeded random),
    takes the Fitting null component of ad x, and keeps only candidates that
    verify; never returns unverified data.
    """
    if not is_solvable(g):
        raise PreconditionError("Cartan search implemented for solvable algebras")
    if g.dim == 0:
        return Subspace.zero(0)
    tries = 0
    for x in _candidate_elements(g, seed):
        tries += 1
        if tries > max_tries:
            break
        h = fitting_null(g.ad_vec(x))
        if not is_subalgebra(g, h):
            continue
        if not is_nilpotent(subalgebra_on(g, h)):
            continue
        if normalizer(g, h) != h:
            continue
        return h
    raise VerificationError(
        f"no Cartan subalgebra found in {max_tries} samples (seed {seed})")


def choose_v(g: LieAlgebra, seed: int = 0) -> Subspace:
    """Complement v of the nilradical with ad_s(v)v = 0, found inside a Cartan."""
    _require_solvable_type_r(g)
    n = nilradical(g)
    h = cartan_subalgebra(g, seed=seed)
    v = h.intersect(n).complement_in(h)
    _verify_v(g, n, v)
    return v


def _require_solvable_type_r(g: LieAlgebra):
    if not is_solvable(g):
        raise PreconditionError("nilshadow input must be solvable")
    if not is_type_R(g).is_type_r:
        raise PreconditionError("nilshadow input must be of type (R)")


def _verify_v(g: LieAlgebra, n: Subspace, v: Subspace):
    if v.intersect(n).dim != 0 or v.dim + n.dim != g.dim:
        raise VerificationError("v does not complement the nilradical")
    tables = [semisimple_ad(g, b) for b in v.basis]
    for s in tables:
        for w in v.basis:
            if not vec_is_zero(s.apply(w)):
                raise VerificationError("ad_s(v)v = 0 fails for the chosen complement")


def semisimple_ad(g: LieAlgebra, x) -> RatMatrix:
    """Semisimple part of ad x (Jordan-Chevalley)."""
    xs = x.coords if hasattr(x, "coords") else vector(x)
    return jordan_chevalley(g.ad_vec(xs)).semisimple


def projection_onto(v: Subspace, along: Subspace) -> RatMatrix:
    """Projection matrix onto v with kernel `along` (their sum must be everything)."""
    dim = v.ambient
    cols = list(v.basis) + list(along.basis)
    if len(cols) != dim:
        raise PreconditionError("subspaces do not split the space")
    basis_matrix = RatMatrix.from_rows([[cols[j][i] for j in range(dim)]
                                        for i in range(dim)], cols=dim)
    inv = basis_matrix.inverse()
    proj_rows = []
    for i in range(dim):
        row = zero_vector(dim)
        for k in range(v.dim):
            row = vec_add(row, vec_scale(v.basis[k][i], inv.row(k)))
        proj_rows.append(row)
    return RatMatrix.from_rows(proj_rows, cols=dim)


@dataclass(frozen=True)
class ShadowData:
    """Everything the nilshadow construction produced, fully verified."""

    source: LieAlgebra
    v: Subspace
    projection_v: RatMatrix
    ad_s_table: tuple[RatMatrix, ...]     # ad_s of each v-basis vector
    shadow: LieAlgebra
    cartan: Subspace
    seed: int
    sigma_images: tuple[RatMatrix, ...]   # ad_s(pi_v(e_i)) per source basis vector


def nilshadow(g: LieAlgebra, seed: int = 0) -> ShadowData:
    """Nilshadow of a solvable type-(R) algebra; verified nilpotent."""
    _require_solvable_type_r(g)
    n = nilradical(g)
    h = cartan_subalgebra(g, seed=seed)
    v = h.intersect(n).complement_in(h)
    _verify_v(g, n, v)

    proj = projection_onto(v, n)
    table = tuple(semisimple_ad(g, b) for b in v.basis)

    sigma_images = []
    for i in range(g.dim):
        pv = proj.apply(unit_vector(g.dim, i))
        direct = semisimple_ad(g, pv)
        combo = RatMatrix.zero(g.dim, g.dim)
        if v.dim:
            for c, s in zip(v.coordinates(pv), table):
                if c != 0:
                    combo = combo + s.scale(c)
        if direct != combo:
            # ad_s is linear on the Cartan by the weight-space decomposition
            raise VerificationError("ad_s failed to be linear on v")
        sigma_images.append(direct)

    structure = []
    for i in range(g.dim):
        row = []
        for j in range(g.dim):
            w = g.bracket_vec(unit_vector(g.dim, i), unit_vector(g.dim, j))
            w = vec_add(w, vec_scale(Fraction(-1),
                                     sigma_images[i].apply(unit_vector(g.dim, j))))
            w = vec_add(w, sigma_images[j].apply(unit_vector(g.dim, i)))
            row.append(w)
        structure.append(tuple(row))
    shadow = LieAlgebra(g.dim, g.labels, tuple(structure))
    if not is_nilpotent(shadow):
        raise VerificationError("nilshadow output failed the nilpotency check")
    return ShadowData(g, v, proj, table, shadow, h, seed, tuple(sigma_images))


def canonical_modification(sd: ShadowData) -> ModMap:
    """sigma(X) = ad_s(pi_v(X)) as a modification map on the shadow algebra.

    The graph bracket adds the twist back, so Gr(sigma) has the source's
    structure constants on the same coordinates; verified exactly.
    """
    from .modification import check_axioms, graph_algebra

    sigma = ModMap(sd.shadow, sd.sigma_images)
    report = check_axioms(sigma)
    if not report.accepted:
        raise VerificationError(f"canonical modification failed the axioms: {report}")
    if graph_algebra(sigma).structure != sd.source.structure:
        raise VerificationError("graph algebra does not reproduce the source")
    return sigma
