"""Charts, almost-complex-structure and metric fields, Christoffel symbols,
and the pointwise change to normal coordinates.

Index conventions used across the package: an endomorphism J is stored as a
matrix with ``J[i, j]`` the coefficient of e_i in J(e_j) (row = output
index), and first partials of matrix data are stored as
``partials[k, i, j] = d_k entry(i, j)``.  A metric uses the same layout with
entry (i, j) = g_ij.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import expr

__all__ = [
    "GeometryError",
    "SingularFrameError",
    "MetricError",
    "ChartSpec",
    "JetMatrix",
    "ExplicitField",
    "ConjugationField",
    "PullbackField",
    "MatrixField",
    "MetricField",
    "AcsValidation",
    "standard_block",
    "validate_acs",
    "christoffel",
    "NormalChange",
    "normal_transform",
    "random_conjugation_acs",
]

_MAX_FRAME_COND = 1e12


class GeometryError(ValueError):
    """Base class for chart/field evaluation failures."""


class SingularFrameError(GeometryError):
    """Conjugation frame or pullback Jacobian is not invertible at the point."""


class MetricError(GeometryError):
    """Metric is singular or not positive definite at the point."""


@dataclass(frozen=True)
class ChartSpec:
    """A single coordinate chart: even dimension plus variable names."""

    n: int
    var_names: tuple[str, ...]

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ValueError("dimension must be a positive even integer")
        if len(self.var_names) != self.n:
            raise ValueError("number of variable names must equal the dimension")
        if len(set(self.var_names)) != self.n:
            raise ValueError("variable names must be distinct")

    @classmethod
    def default(cls, n: int) -> "ChartSpec":
        return cls(n, tuple(f"x{i + 1}" for i in range(n)))


@dataclass(frozen=True)
class JetMatrix:
    """Matrix values and their first partials at a point.

    ``partials[k, i, j]`` is the derivative of entry (i, j) along coordinate k.
    ``frame_cond`` carries the condition number of the frame that produced a
    conjugation or pullback field, for diagnostics.
    """

    values: np.ndarray
    partials: np.ndarray
    frame_cond: Optional[float] = None

    @property
    def n(self) -> int:
        return self.values.shape[0]


def standard_block(n: int) -> np.ndarray:
    """Block-diagonal structure mapping e_{2a} -> e_{2a+1} -> -e_{2a}."""
    j0 = np.zeros((n, n))
    for a in range(n // 2):
        j0[2 * a + 1, 2 * a] = 1.0
        j0[2 * a, 2 * a + 1] = -1.0
    return j0


def _require_finite(values: np.ndarray, partials: np.ndarray) -> None:
    if not (np.isfinite(values).all() and np.isfinite(partials).all()):
        raise GeometryError("field evaluation produced non-finite entries")


@dataclass(frozen=True)
class ExplicitField:
    """n x n matrix of expressions defining each entry directly."""

    entries: tuple[tuple[expr.ExprNode, ...], ...]

    def eval(self, chart: ChartSpec, point) -> JetMatrix:
        n = chart.n
        values = np.zeros((n, n))
        partials = np.zeros((n, n, n))
        for i in range(n):
            for j in range(n):
                jet = expr.bind_and_eval(self.entries[i][j], chart, point, order=1)
                values[i, j] = jet.value
                partials[:, i, j] = jet.partials
        _require_finite(values, partials)
        return JetMatrix(values, partials)


def _eval_square(entries, chart, point, order):
    """Evaluate an n x n table of expressions; returns (values, partials)."""
    n = chart.n
    values = np.zeros((n, n))
    partials = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            jet = expr.bind_and_eval(entries[i][j], chart, point, order=order)
            values[i, j] = jet.value
            partials[:, i, j] = jet.partials
    return values, partials


@dataclass(frozen=True)
class ConjugationField:
    """J(x) = A(x) J0 A(x)^-1 for an expression-valued frame A.

    Satisfies J^2 = -I wherever A is invertible, which makes it the generic
    well-formed test input.
    """

    frame: tuple[tuple[expr.ExprNode, ...], ...]
    base: np.ndarray

    def eval(self, chart: ChartSpec, point) -> JetMatrix:
        av, ap = _eval_square(self.frame, chart, point, order=1)
        if not np.isfinite(av).all():
            raise GeometryError("frame evaluation produced non-finite entries")
        cond = float(np.linalg.cond(av))
        if not np.isfinite(cond) or cond > _MAX_FRAME_COND:
            raise SingularFrameError(
                f"conjugation frame is singular at the point (cond={cond:.3e})"
            )
        ainv = np.linalg.inv(av)
        values = av @ self.base @ ainv
        core = self.base @ ainv
        partials = np.stack(
            [
                ap[k] @ core - av @ core @ ap[k] @ ainv
                for k in range(chart.n)
            ]
        )
        _require_finite(values, partials)
        return JetMatrix(values, partials, frame_cond=cond)


@dataclass(frozen=True)
class PullbackField:
    """J = (Dphi)^-1 J0 (Dphi) for an expression-valued map phi.

    The pullback of a constant structure under a diffeomorphism; its
    Nijenhuis tensor vanishes identically, so it serves as the
    zero-obstruction control.
    """

    components: tuple[expr.ExprNode, ...]
    base: np.ndarray

    def eval(self, chart: ChartSpec, point) -> JetMatrix:
        n = chart.n
        f = np.zeros((n, n))  # f[i, j] = d_j phi^i
        h = np.zeros((n, n, n))  # h[i, j, k] = d_j d_k phi^i
        for i in range(n):
            jet = expr.bind_and_eval(self.components[i], chart, point, order=2)
            f[i, :] = jet.partials
            h[i] = jet.hessian
        if not np.isfinite(f).all():
            raise GeometryError("map Jacobian has non-finite entries")
        cond = float(np.linalg.cond(f))
        if not np.isfinite(cond) or cond > _MAX_FRAME_COND:
            raise SingularFrameError(
                f"pullback Jacobian is singular at the point (cond={cond:.3e})"
            )
        finv = np.linalg.inv(f)
        values = finv @ self.base @ f
        partials = np.zeros((n, n, n))
        for k in range(n):
            df_k = h[:, :, k]  # d_k (Dphi)[i, j] = h[i, j, k]
            partials[k] = (
                -finv @ df_k @ finv @ self.base @ f + finv @ self.base @ df_k
            )
        _require_finite(values, partials)
        return JetMatrix(values, partials, frame_cond=cond)


MatrixField = Union[ExplicitField, ConjugationField, PullbackField]


@dataclass(frozen=True)
class MetricField:
    """Symmetric matrix of expressions; must be SPD at queried points.

    Only the upper triangle of `entries` is read; values and partials are
    mirrored so the evaluated jets are exactly symmetric.
    """

    entries: tuple[tuple[expr.ExprNode, ...], ...]

    def eval(self, chart: ChartSpec, point) -> JetMatrix:
        n = chart.n
        values = np.zeros((n, n))
        partials = np.zeros((n, n, n))
        for i in range(n):
            for j in range(i, n):
                jet = expr.bind_and_eval(self.entries[i][j], chart, point, order=1)
                values[i, j] = values[j, i] = jet.value
                partials[:, i, j] = partials[:, j, i] = jet.partials
        _require_finite(values, partials)
        try:
            np.linalg.cholesky(values)
        except np.linalg.LinAlgError as exc:
            raise MetricError("metric is not positive definite at the point") from exc
        return JetMatrix(values, partials)


@dataclass(frozen=True)
class AcsValidation:
    """Verdict of the pointwise J^2 = -I check."""

    ok: bool
    residual: float
    residual_matrix: np.ndarray


def validate_acs(jm: JetMatrix, tol: float = 1e-9) -> AcsValidation:
    """Check ||J^2 + I||_max <= tol at the point."""
    r = jm.values @ jm.values + np.eye(jm.n)
    res = float(np.max(np.abs(r)))
    return AcsValidation(res <= tol, res, r)


def christoffel(g: JetMatrix) -> np.ndarray:
    """Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).

    Exactly symmetric in (i, j) because the two symmetric contractions are
    added commutatively and metric partials are stored symmetrically.
    """
    try:
        ginv = np.linalg.inv(g.values)
    except np.linalg.LinAlgError as exc:
        raise MetricError("singular metric") from exc
    p = g.partials
    t1 = np.einsum("kl,ijl->kij", ginv, p)
    t2 = np.einsum("kl,jil->kij", ginv, p)
    t3 = np.einsum("kl,lij->kij", ginv, p)
    return 0.5 * (t1 + t2 - t3)


@dataclass(frozen=True)
class NormalChange:
    """Pointwise coordinate change making the metric normal at the point.

    New coordinates y satisfy x = p + A y + 1/2 quad[:, b, c] y^b y^c with
    A^T g A = I (A from the Cholesky factor of g) and
    quad[k, b, c] = -Gamma^k_ij A^i_b A^j_c, which kills the transformed
    Christoffel symbols at the point.  Only the point values and first
    partials of transformed tensors are produced; no chart is actually
    re-parameterised.
    """

    a: np.ndarray
    a_inv: np.ndarray
    gamma: np.ndarray
    quad: np.ndarray

    @classmethod
    def from_metric(cls, g: JetMatrix) -> "NormalChange":
        try:
            lo = np.linalg.cholesky(g.values)
        except np.linalg.LinAlgError as exc:
            raise MetricError("metric is not positive definite at the point") from exc
        a = np.linalg.inv(lo).T
        a_inv = lo.T
        gamma = christoffel(g)
        quad = -np.einsum("kij,ib,jc->kbc", gamma, a, a)
        return cls(a, a_inv, gamma, quad)

    def transform_endomorphism(self, jm: JetMatrix) -> JetMatrix:
        """Values A^-1 J A plus partials with the quadratic-term corrections."""
        vals = self.a_inv @ jm.values @ self.a
        # d~_c J~^a_b = [A^-1]^a_i (d_k J^i_j) A^k_c A^j_b
        #             + [A^-1]^a_i Gamma^i_mn A^m_e A^n_c J~^e_b
        #             - J~^a_e [A^-1]^e_i Gamma^i_mn A^m_b A^n_c
        t1 = np.einsum("ai,kij,kc,jb->cab", self.a_inv, jm.partials, self.a, self.a)
        t2 = np.einsum("ai,imn,me,nc,eb->cab", self.a_inv, self.gamma, self.a, self.a, vals)
        t3 = np.einsum("ae,ei,imn,mb,nc->cab", vals, self.a_inv, self.gamma, self.a, self.a)
        return JetMatrix(vals, t1 + t2 - t3, frame_cond=jm.frame_cond)

    def transform_metric(self, g: JetMatrix) -> JetMatrix:
        """Values A^T g A (identity up to rounding) plus transformed partials."""
        vals = self.a.T @ g.values @ self.a
        t1 = np.einsum("iac,ij,jb->cab", self.quad, g.values, self.a)
        t2 = np.einsum("ia,kij,kc,jb->cab", self.a, g.partials, self.a, self.a)
        t3 = np.einsum("ia,ij,jbc->cab", self.a, g.values, self.quad)
        return JetMatrix(vals, t1 + t2 + t3)


def normal_transform(jm: JetMatrix, g: JetMatrix) -> JetMatrix:
    """Endomorphism jets re-expressed in coordinates normal for g at the point."""
    return NormalChange.from_metric(g).transform_endomorphism(jm)


def _monomials(n: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples with total degree <= degree, in a fixed order."""
    return sorted(
        e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree
    )


def _coefficient_term(c: float, expo: tuple[int, ...], names) -> expr.ExprNode:
    node: expr.ExprNode = expr.Const(abs(c))
    for name, k in zip(names, expo):
        if k == 0:
            continue
        factor: expr.ExprNode = expr.Var(name)
        if k > 1:
            factor = expr.Binary("pow", factor, expr.Const(float(k)))
        node = expr.Binary("mul", node, factor)
    if c < 0:
        node = expr.Unary("neg", node)
    return node


def random_conjugation_acs(dim: int, degree: int, seed: int) -> ConjugationField:
    """Conjugation field with frame A = I + P, P a random polynomial matrix.

    Every monomial of total degree <= degree appears with a coefficient drawn
    uniformly from [-0.3, 0.3]; the draw order is fixed, so the field is
    bit-identical for a given seed.
    """
    if dim <= 0 or dim % 2:
        raise ValueError("dimension must be a positive even integer")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    rng = np.random.default_rng(seed)
    names = ChartSpec.default(dim).var_names
    monos = _monomials(dim, degree)
    rows = []
    for i in range(dim):
        row = []
        for j in range(dim):
            poly: Optional[expr.ExprNode] = None
            for expo in monos:
                c = float(rng.uniform(-0.3, 0.3))
                term = _coefficient_term(c, expo, names)
                poly = term if poly is None else expr.Binary("add", poly, term)
            assert poly is not None
            if i == j:
                poly = expr.Binary("add", expr.Const(1.0), poly)
            row.append(poly)
        rows.append(tuple(row))
    return ConjugationField(tuple(rows), standard_block(dim))
