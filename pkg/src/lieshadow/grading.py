"""Gradings from contractive automorphisms, standard dilations, and the
plane dilation/distance families.

The grading layers come from clustering the automorphism's eigenvalue moduli:
a layer whose modulus class is covered by whole rational factor root-sets is
an exact rational subspace; otherwise the layer is certified-numeric with a
recorded tolerance.  Weight bookkeeping uses squared moduli so that weight
addition is exact multiplication.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .algebra import LieAlgebra
from .errors import PreconditionError, UndecidedAtPrecision, VerificationError
from .linalg import (RatMatrix, Subspace, Vector, char_poly, primary_component,
                     rat, unit_vector, vec_is_zero)
from .roots import (DEFAULT_PREC_FLOOR, irreducible_factors, modulus_clusters)


def is_automorphism(g: LieAlgebra, a: RatMatrix) -> bool:
    """A[x,y] = [Ax, Ay] on all basis pairs, exactly."""
    if a.rows != g.dim or a.cols != g.dim:
        raise PreconditionError("automorphism candidate has wrong shape")
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = a.apply(g.structure[i][j])
            rhs = g.bracket_vec(a.apply(unit_vector(g.dim, i)),
                                a.apply(unit_vector(g.dim, j)))
            if lhs != rhs:
                return False
    return True


@dataclass(frozen=True)
class GradingLayer:
    weight_raw: float                      # -log(modulus)
    mod2: Fraction | None                  # exact squared modulus when available
    exact: bool
    space: Subspace | None                 # exact layers
    numeric_basis: tuple[tuple[float, ...], ...] | None
    tolerance: float | None

    @property
    def dim(self) -> int:
        if self.space is not None:
            return self.space.dim
        return len(self.numeric_basis or ())


@dataclass(frozen=True)
class Grading:
    """Weighted layer decomposition; layers sorted by increasing weight."""

    algebra: LieAlgebra
    layers: tuple[GradingLayer, ...]
    scale: Fraction = Fraction(1)          # caller-controlled renormalization

    @property
    def exact(self) -> bool:
        return all(layer.exact for layer in self.layers)

    def normalized_weights(self) -> tuple[Fraction | float, ...]:
        """Weights rescaled so the smallest raw weight maps to `scale`.

        Exact Fractions are returned whenever the weight ratio can be
        certified by an exact power identity on the squared moduli.
        """
        base = self.layers[0]
        out: list[Fraction | float] = []
        for layer in self.layers:
            t = None
            if base.mod2 is not None and layer.mod2 is not None:
                t = _exact_log_ratio(layer.mod2, base.mod2)
            if t is not None:
                out.append(t * self.scale)
            else:
                out.append(layer.weight_raw / base.weight_raw * float(self.scale))
        return tuple(out)


def renormalize(gr: Grading, scale) -> Grading:
    scale = rat(scale)
    if scale <= 0:
        raise PreconditionError("normalization scale must be positive")
    return replace(gr, scale=scale)


def _exact_log_ratio(m2: Fraction, base2: Fraction, max_den: int = 64) -> Fraction | None:
    """p/q with m2 = base2^(p/q), verified exactly; None if not found."""
    if m2 == base2:
        return Fraction(1)
    approx = math.log(float(m2)) / math.log(float(base2))
    for q in range(1, max_den + 1):
        p = round(approx * q)
        if p <= 0:
            continue
        if m2 ** q == base2 ** p:
            return Fraction(p, q)
    return None


def siebert_grading(g: LieAlgebra, a: RatMatrix,
                    prec_floor: int = DEFAULT_PREC_FLOOR) -> Grading:
    """Layers of the grading induced by a contractive automorphism.

    Clusters the eigenvalue moduli of a; each layer is the sum of the primary
    components whose roots fall in one modulus class.  Exactness per layer is
    granted only when the class is a union of whole factor root-sets with a
    rational squared modulus.
    """
    from .roots import spectral_radius_lt

    if not is_automorphism(g, a):
        raise PreconditionError("not an automorphism of the algebra")
    if not spectral_radius_lt(a, Fraction(1), prec_floor):
        raise PreconditionError("automorphism is not contractive")
    factors = irreducible_factors(char_poly(a))
    clusters = modulus_clusters(factors, prec_floor)

    approx_eigs = None
    layers = []
    for cluster in clusters:
        whole = all(m.whole for m in cluster.members)
        if cluster.exact and whole:
            space = Subspace.zero(g.dim)
            for m in cluster.members:
                f, mult = factors[m.factor_index]
                space = space.add(primary_component(a, f, mult))
            weight = -math.log(math.sqrt(float(cluster.mod2)))
            layers.append(GradingLayer(weight, cluster.mod2, True, space, None, None))
        else:
            if approx_eigs is None:
                approx_eigs = _numpy_eigens(a)
            basis, tol = _numeric_layer_basis(approx_eigs, float(cluster.lo),
                                              float(cluster.hi))
            if len(basis) != cluster.count:
                raise UndecidedAtPrecision(
                    "numeric layer dimension does not match the certified root count")
            weight = -math.log(cluster.modulus_approx)
            layers.append(GradingLayer(weight, None, False, None, tuple(basis),
                                       tol + float(cluster.hi - cluster.lo)))
    layers.sort(key=lambda layer: layer.weight_raw)
    gr = Grading(g, tuple(layers))
    if sum(layer.dim for layer in gr.layers) != g.dim:
        raise VerificationError("grading layers do not sum to the full space")
    ok, witness = check_grading(gr)
    if not ok:
        raise VerificationError(f"grading closure check failed at {witness}")
    return gr


def _numpy_eigens(a: RatMatrix):
    m = np.array([[float(x) for x in row] for row in a.entries], dtype=float)
    return np.linalg.eig(m)


def _numeric_layer_basis(eigs, lo: float, hi: float):
    """Real basis of the span of eigenvectors with |eigenvalue| in [lo, hi]."""
    values, vectors = eigs
    cols = []
    for k, lam in enumerate(values):
        if lo - 1e-12 <= abs(lam) <= hi + 1e-12:
            v = vectors[:, k]
            if abs(lam.imag) > 1e-12:
                if lam.imag < 0:
                    continue  # keep one of each conjugate pair
                cols.append(v.real)
                cols.append(v.imag)
            else:
                cols.append(v.real)
    if not cols:
        return [], 0.0
    mat = np.array(cols, dtype=float).T
    q, _ = np.linalg.qr(mat)
    basis = [tuple(float(x) for x in q[:, j]) for j in range(mat.shape[1])]
    return basis, 1e-12


def check_grading(gr: Grading, tol: float = 1e-9) -> tuple[bool, tuple | None]:
    """[V_s, V_t] inside V_{s+t} (or zero when s+t is not a weight).

    Exact for exact layer pairs; within `tol` when a numeric layer is
    involved.  Returns the first failing (layer_s, layer_t, i, j) witness.
    """
    g = gr.algebra
    layers = gr.layers
    for si, ls in enumerate(layers):
        for ti in range(si, len(layers)):
            lt = layers[ti]
            target = _target_layer(layers, ls, lt, tol)
            if ls.exact and lt.exact:
                for i, u in enumerate(ls.space.basis):
                    for j, w in enumerate(lt.space.basis):
                        b = g.bracket_vec(u, w)
                        if vec_is_zero(b):
                            continue
                        if target is None or not target.exact:
                            if target is None:
                                return False, (si, ti, i, j)
                            if not _numeric_contains(target.numeric_basis,
                                                     [float(x) for x in b], tol):
                                return False, (si, ti, i, j)
                        elif not target.space.contains(b):
                            return False, (si, ti, i, j)
            else:
                ok = _check_numeric_pair(g, ls, lt, target, tol)
                if not ok:
                    return False, (si, ti, None, None)
    return True, None


def _target_layer(layers, ls, lt, tol):
    if ls.mod2 is not None and lt.mod2 is not None:
        want = ls.mod2 * lt.mod2
        for layer in layers:
            if layer.mod2 == want:
                return layer
        return None
    want = ls.weight_raw + lt.weight_raw
    for layer in layers:
        if abs(layer.weight_raw - want) < 1e-6:
            return layer
    return None


def _layer_float_basis(layer: GradingLayer):
    if layer.numeric_basis is not None:
        return [list(v) for v in layer.numeric_basis]
    return [[float(x) for x in v] for v in layer.space.basis]


def _numeric_contains(basis, v, tol: float) -> bool:
    if not basis:
        return float(np.linalg.norm(v)) <= tol
    m = np.array(basis, dtype=float).T
    v = np.array(v, dtype=float)
    coef, *_ = np.linalg.lstsq(m, v, rcond=None)
    return float(np.linalg.norm(m @ coef - v)) <= tol


def _check_numeric_pair(g, ls, lt, target, tol) -> bool:
    for u in _layer_float_basis(ls):
        for w in _layer_float_basis(lt):
            b = _float_bracket(g, u, w)
            if float(np.linalg.norm(b)) <= tol:
                continue
            if target is None:
                return False
            if not _numeric_contains(_layer_float_basis(target), b, tol):
                return False
    return True


def _float_bracket(g: LieAlgebra, x, y):
    n = g.dim
    out = [0.0] * n
    for i in range(n):
        if x[i] == 0:
            continue
        for j in range(n):
            if y[j] == 0:
                continue
            c = x[i] * y[j]
            for k, s in enumerate(g.structure[i][j]):
                if s != 0:
                    out[k] += c * float(s)
    return out


# ---------------------------------------------------------------------------
# standard dilations
# ---------------------------------------------------------------------------

def _rational_root(x: Fraction, k: int) -> Fraction | None:
    """Exact k-th root of a positive rational, or None."""
    def iroot(n: int) -> int | None:
        if n == 0:
            return 0
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** k == n:
                return cand
        return None

    p, q = iroot(x.numerator), iroot(x.denominator)
    if p is None or q is None:
        return None
    return Fraction(p, q)


def rational_power(lam: Fraction, t: Fraction) -> Fraction | None:
    """lam^t as an exact rational, or None when it is irrational."""
    t = rat(t)
    if t.denominator != 1:
        root = _rational_root(lam, t.denominator)
        if root is None:
            return None
        lam = root
    return lam ** t.numerator


def standard_dilation(gr: Grading, lam, exact: bool | None = None):
    """Block-scaling automorphism acting by lam^t on the weight-t layer.

    Exact mode (default on exact gradings) returns a RatMatrix and verifies
    the automorphism property exactly; numeric mode returns a float matrix.
    Raises when exactness is demanded but lam^t is irrational.
    """
    lam = rat(lam)
    if lam <= 0 or lam == 1:
        raise PreconditionError("dilation factor must be positive and different from 1")
    weights = gr.normalized_weights()
    if exact is None:
        exact = gr.exact and all(isinstance(t, Fraction) for t in weights)
    if exact:
        if not gr.exact or not all(isinstance(t, Fraction) for t in weights):
            raise PreconditionError("grading does not support exact dilations")
        scalars = []
        for t in weights:
            s = rational_power(lam, t)
            if s is None:
                raise PreconditionError(
                    f"lambda^{t} is not rational; exact dilation unavailable")
            scalars.append(s)
        dim = gr.algebra.dim
        cols: list[Vector] = []
        diag: list[Fraction] = []
        for layer, s in zip(gr.layers, scalars):
            cols.extend(layer.space.basis)
            diag.extend([s] * layer.space.dim)
        c = RatMatrix.from_rows([[cols[j][i] for j in range(dim)]
                                 for i in range(dim)], cols=dim)
        d = c @ RatMatrix.from_rows([[diag[i] if i == j else 0 for j in range(dim)]
                                     for i in range(dim)], cols=dim) @ c.inverse()
        if not is_automorphism(gr.algebra, d):
            raise VerificationError("standard dilation is not an automorphism")
        return d
    # numeric mode
    dim = gr.algebra.dim
    cols = []
    diag = []
    for layer, t in zip(gr.layers, weights):
        fb = _layer_float_basis(layer)
        cols.extend(fb)
        diag.extend([float(lam) ** float(t)] * len(fb))
    c = np.array(cols, dtype=float).T
    d = c @ np.diag(diag) @ np.linalg.inv(c)
    _verify_numeric_automorphism(gr.algebra, d)
    return d


def _verify_numeric_automorphism(g: LieAlgebra, d, tol: float = 1e-8):
    n = g.dim
    for i in range(n):
        for j in range(i + 1, n):
            lhs = d @ np.array([float(x) for x in g.structure[i][j]])
            rhs = _float_bracket(g, list(d[:, i]), list(d[:, j]))
            if float(np.linalg.norm(lhs - np.array(rhs))) > tol:
                raise VerificationError("numeric dilation fails the automorphism "
                                        "check beyond tolerance")


def self_similar_admissible(gr: Grading) -> bool:
    """True iff every normalized weight is at least 1."""
    weights = gr.normalized_weights()
    return all(
        t >= 1 if isinstance(t, Fraction) else t >= 1 - 1e-12
        for t in weights)


# ---------------------------------------------------------------------------
# 2D dilation/distance families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DilationFamily2D:
    """Plane dilation family: diagonal, rotation-scaling, or shear."""

    kind: str
    alpha: Fraction
    beta: Fraction = Fraction(1)
    lam: Fraction = Fraction(2)

    def __post_init__(self):
        if self.kind not in ("diagonal", "rotation-scaling", "shear"):
            raise PreconditionError(f"unknown family kind {self.kind!r}")
        if self.alpha < 1 or self.beta < 1:
            raise PreconditionError("exponents must be at least 1")
        if self.kind == "shear" and self.alpha <= 1:
            raise PreconditionError("shear family needs alpha > 1")
        if self.lam <= 0 or self.lam == 1:
            raise PreconditionError("dilation factor must be positive and not 1")

    def matrix(self):
        """The dilation automorphism as a float 2x2 matrix."""
        lam = float(self.lam)
        al, be = float(self.alpha), float(self.beta)
        if self.kind == "diagonal":
            return np.array([[lam ** al, 0.0], [0.0, lam ** be]])
        if self.kind == "rotation-scaling":
            th = math.log(lam)
            return lam ** al * np.array([[math.cos(th), -math.sin(th)],
                                         [math.sin(th), math.cos(th)]])
        s = lam ** al
        return np.array([[s, s * math.log(s)], [0.0, s]])


def eval_distance_2d(fam: DilationFamily2D, p, q) -> float:
    """Homogeneous distance of the family; relative error <= 1e-12."""
    dx, dy = p[0] - q[0], p[1] - q[1]
    if dx == 0 and dy == 0:
        return 0.0
    al, be = float(fam.alpha), float(fam.beta)
    if fam.kind == "diagonal":
        return max(abs(dx) ** (1 / al), abs(dy) ** (1 / be))
    if fam.kind == "rotation-scaling":
        return math.hypot(dx, dy) ** (1 / al)
    return _shear_norm(dx, dy, al)


def _shear_norm(x: float, y: float, alpha: float) -> float:
    """Homogeneous norm for the shear family.

    N(v) = e^s where s solves |exp(-s M) v| = 1 for the one-parameter group
    M = alpha*(I + N0); g(s) is strictly decreasing, so Newton from a log
    estimate with bisection fallback converges to full double precision.
    """
    def val(s: float) -> float:
        e = math.exp(-s * alpha)
        u = x - s * alpha * y
        return (e * e) * (u * u + y * y)

    # bracket the root of val(s) = 1
    s_lo, s_hi = 0.0, 0.0
    if val(0.0) > 1.0:
        s_hi = 1.0
        while val(s_hi) > 1.0:
            s_lo, s_hi = s_hi, s_hi * 2
    else:
        s_lo = -1.0
        while val(s_lo) < 1.0:
            s_hi, s_lo = s_lo, s_lo * 2
    for _ in range(200):
        mid = 0.5 * (s_lo + s_hi)
        if val(mid) > 1.0:
            s_lo = mid
        else:
            s_hi = mid
        if s_hi - s_lo < 1e-15 * max(1.0, abs(s_lo)):
            break
    return math.exp(0.5 * (s_lo + s_hi))


def verify_dilation_property(fam: DilationFamily2D, samples: int,
                             seed: int = 0) -> float:
    """Max relative error of d(delta p, delta q) = lam * d(p, q) on samples."""
    rng = random.Random(seed)
    m = fam.matrix()
    lam = float(fam.lam)
    worst = 0.0
    for _ in range(samples):
        p = (rng.uniform(-10, 10), rng.uniform(-10, 10))
        q = (rng.uniform(-10, 10), rng.uniform(-10, 10))
        if p == q:
            continue
        dp = (m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1])
        dq = (m[0][0] * q[0] + m[0][1] * q[1], m[1][0] * q[0] + m[1][1] * q[1])
        d0 = eval_distance_2d(fam, p, q)
        d1 = eval_distance_2d(fam, dp, dq)
        err = abs(d1 - lam * d0) / (lam * d0)
        worst = max(worst, err)
    return worst
