"""Bitension residual of the Gauss map and derived verdicts.

For an oriented non-minimal hypersurface, the Gauss map into the Grassmannian
is proper biharmonic exactly when

    R = Delta(grad f) + A^2(grad f) - |A|^2 grad f = 0   with grad f != 0,

where f is the signed mean curvature, A the shape operator and Delta the
(geometer-sign) rough Laplacian. This module evaluates R pointwise over a
sample set, classifies the outcome, and implements the reductions used for
cones: the link system on M in S^(m+1), its algebraic consequence through the
Ricci operator, and the two low-dimension non-existence certificates (the ODE
prolongation in R^3 and the integral obstruction in R^4).

Verdicts: HarmonicGauss (grad f vanishes on the sample), ProperBiharmonicGauss
(residual vanishes at scale, grad f does not), NotBiharmonic, Inconclusive
(too many failed sample points). Points where |f| < 1e-10 are reported but
excluded from the residual classification, since the equation's hypothesis
(nowhere-zero mean curvature) fails there.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exprjet import DomainError
from .geometry import (
    FundamentalData,
    GeometryError,
    ImmersionChart,
    ShapeData,
    TangentField,
    fundamental_data,
    gradient_of_mean_curvature,
    ricci_via_gauss_equation,
    rough_laplacian,
    scalar_laplacian,
    shape_data_euclidean,
    shape_data_spherical,
)

__all__ = [
    "HARMONIC",
    "PROPER_BIHARMONIC",
    "NOT_BIHARMONIC",
    "INCONCLUSIVE",
    "Tolerances",
    "PointResidual",
    "ResidualReport",
    "hypersurface_residual",
    "gauss_tension_norm",
    "GrassmannTangent",
    "grassmann_curvature",
    "LinkPointResidual",
    "LinkSystemReport",
    "link_residual_system",
    "corollary_necessary_condition",
    "check_corollary_on_chart",
    "R3CheckResult",
    "r3_ode_check",
    "R4Obstruction",
    "r4_obstruction",
    "worker_count",
]

HARMONIC = "HarmonicGauss"
PROPER_BIHARMONIC = "ProperBiharmonicGauss"
NOT_BIHARMONIC = "NotBiharmonic"
INCONCLUSIVE = "Inconclusive"

_FAIL_FRACTION = 0.10
_POOL_MIN_POINTS = 64


@dataclass(frozen=True)
class Tolerances:
    """Residual-zero test: max |R| < eps_abs + eps_rel * S where S is the
    largest sampled term magnitude |A|^2 |grad f| + |Delta grad f|. The
    gradient-zero test compares against grad_rel * (1 + max |f|)."""

    eps_abs: float = 1e-8
    eps_rel: float = 1e-6
    grad_rel: float = 1e-7
    near_minimal_f: float = 1e-10

    def as_dict(self) -> dict:
        return {"eps_abs": self.eps_abs, "eps_rel": self.eps_rel,
                "grad_rel": self.grad_rel, "near_minimal_f": self.near_minimal_f}


def worker_count() -> int:
    """Worker pool size: GAUSSLAB_THREADS when set, else the core count."""
    env = os.environ.get("GAUSSLAB_THREADS")
    if env is not None:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(
                f"GAUSSLAB_THREADS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ValueError("GAUSSLAB_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def _map_points(fn: Callable, points: Sequence, workers: int | None) -> list:
    n = workers if workers is not None else worker_count()
    if n > 1 and len(points) >= _POOL_MIN_POINTS:
        try:
            with ProcessPoolExecutor(max_workers=n) as pool:
                chunk = max(1, len(points) // (4 * n))
                return list(pool.map(fn, points, chunksize=chunk))
        except Exception:
            pass  # pickling or platform trouble: fall through to serial
    return [fn(p) for p in points]


# ---------------------------------------------------------------------------
# Hypersurface residual


@dataclass
class PointResidual:
    point: tuple[float, ...]
    ok: bool
    f: float = math.nan
    grad_f_norm: float = math.nan
    residual: tuple[float, ...] = ()
    residual_norm: float = math.nan
    scale_term: float = math.nan  # |A|^2 |grad f| + |Delta grad f|
    near_minimal: bool = False
    error: str | None = None


@dataclass
class ResidualReport:
    chart: str
    verdict: str
    tolerances: Tolerances
    scale: float
    residual_threshold: float
    gradient_threshold: float
    max_residual: float
    max_grad_f: float
    max_abs_f: float
    points: list[PointResidual]
    failed_points: int
    excluded_points: int

    def as_dict(self, include_points: bool = True) -> dict:
        out = {
            "chart": self.chart,
            "verdict": self.verdict,
            "tolerances": self.tolerances.as_dict(),
            "scale": self.scale,
            "residual_threshold": self.residual_threshold,
            "gradient_threshold": self.gradient_threshold,
            "max_residual": self.max_residual,
            "max_grad_f": self.max_grad_f,
            "max_abs_f": self.max_abs_f,
            "sample_count": len(self.points),
            "failed_points": self.failed_points,
            "excluded_points": self.excluded_points,
        }
        if include_points:
            out["points"] = [
                {
                    "point": list(p.point),
                    "ok": p.ok,
                    "f": p.f,
                    "grad_f_norm": p.grad_f_norm,
                    "residual_norm": p.residual_norm,
                    "near_minimal": p.near_minimal,
                    "error": p.error,
                }
                for p in self.points
            ]
        return out


def _residual_at_point(chart: ImmersionChart, orientation: int,
                       near_minimal_f: float, point) -> PointResidual:
    try:
        fd = fundamental_data(chart, point)
        sd = shape_data_euclidean(chart, point, orientation, fd)
        V = gradient_of_mean_curvature(fd, sd)
        lap = rough_laplacian(fd, V)
        A = sd.shape_operator_values()
        v = V.values
        norm_sq = sd.shape_norm_sq.value
        residual = lap + A @ (A @ v) - norm_sq * v
        f = sd.mean_curvature.value
        return PointResidual(
            point=tuple(point),
            ok=True,
            f=f,
            grad_f_norm=fd.norm(v),
            residual=tuple(float(x) for x in residual),
            residual_norm=fd.norm(residual),
            scale_term=abs(norm_sq) * fd.norm(v) + fd.norm(lap),
            near_minimal=abs(f) < near_minimal_f,
        )
    except (DomainError, GeometryError, FloatingPointError) as exc:
        return PointResidual(point=tuple(point), ok=False, error=str(exc))


def hypersurface_residual(chart: ImmersionChart,
                          points: Sequence[tuple] | None = None,
                          orientation: int = 1,
                          tolerances: Tolerances | None = None,
                          workers: int | None = None) -> ResidualReport:
    """Evaluate the bitension residual of the Gauss map over sample points
    and classify. The verdict is orientation-independent."""
    if chart.ambient != "euclidean":
        raise GeometryError("hypersurface residual needs a euclidean chart")
    tol = tolerances or Tolerances()
    if points is None:
        points = chart.sample_points()
    if not points:
        raise GeometryError("empty sample set")
    rows = _map_points(
        _PointWorker(chart, orientation, tol.near_minimal_f), points, workers)
    return _classify(chart.name, rows, tol)


class _PointWorker:
    """Picklable per-point evaluator for the process pool."""

    def __init__(self, chart, orientation, near_minimal_f):
        self.chart = chart
        self.orientation = orientation
        self.near_minimal_f = near_minimal_f

    def __call__(self, point):
        return _residual_at_point(self.chart, self.orientation,
                                  self.near_minimal_f, point)


def _classify(name: str, rows: list[PointResidual], tol: Tolerances) -> ResidualReport:
    ok_rows = [r for r in rows if r.ok]
    failed = len(rows) - len(ok_rows)
    classified = [r for r in ok_rows if not r.near_minimal]
    scale = max((r.scale_term for r in ok_rows), default=0.0)
    max_res = max((r.residual_norm for r in classified), default=0.0)
    max_grad = max((r.grad_f_norm for r in ok_rows), default=0.0)
    max_f = max((abs(r.f) for r in ok_rows), default=0.0)
    res_thr = tol.eps_abs + tol.eps_rel * scale
    grad_thr = tol.grad_rel * (1.0 + max_f)
    if failed > _FAIL_FRACTION * len(rows) or not ok_rows:
        verdict = INCONCLUSIVE
    elif max_grad < grad_thr:
        verdict = HARMONIC
    elif not classified:
        verdict = INCONCLUSIVE
    elif max_res < res_thr:
        verdict = PROPER_BIHARMONIC
    else:
        verdict = NOT_BIHARMONIC
    return ResidualReport(name, verdict, tol, scale, res_thr, grad_thr,
                          max_res, max_grad, max_f, rows, failed,
                          len(ok_rows) - len(classified))


def gauss_tension_norm(chart: ImmersionChart, point, orientation: int = 1) -> float:
    """Tension-field norm of the Gauss map: m * |grad f|_g (vanishes exactly
    for CMC, matching harmonicity of the Gauss map)."""
    fd = fundamental_data(chart, point)
    sd = (shape_data_euclidean if chart.ambient == "euclidean"
          else shape_data_spherical)(chart, point, orientation, fd)
    V = gradient_of_mean_curvature(fd, sd)
    return chart.dim * fd.norm(V.values)


# ---------------------------------------------------------------------------
# Grassmannian curvature


@dataclass(frozen=True)
class GrassmannTangent:
    """Tangent vector to the Grassmannian of m-planes in R^(m+n), stored as
    the m x n coefficient matrix against a split orthonormal frame; the
    rank-one element X* (x) eta has matrix X eta^T."""

    matrix: np.ndarray

    @classmethod
    def rank_one(cls, X: Sequence[float], eta: Sequence[float]) -> "GrassmannTangent":
        x = np.asarray(X, dtype=float)
        n = np.asarray(eta, dtype=float)
        return cls(np.outer(x, n))

    def inner(self, other: "GrassmannTangent") -> float:
        return float(np.sum(self.matrix * other.matrix))

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.matrix * self.matrix)))


def grassmann_curvature(r1: GrassmannTangent, r2: GrassmannTangent,
                        r3: GrassmannTangent) -> GrassmannTangent:
    """Curvature tensor R(r1, r2) r3 of the Grassmannian.

    On rank-one elements Xi* (x) eta_i this is the four-term expression
    <X1,X2><eta2,eta3> X3*eta1 - <X1,X2><eta1,eta3> X3*eta2
    + <X2,X3><eta1,eta2> X1*eta3 - <X1,X3><eta1,eta2> X2*eta3; the matrix
    form below is its trilinear extension. The two difference groupings keep
    antisymmetry in (r1, r2) exact in floating point."""
    C1, C2, C3 = r1.matrix, r2.matrix, r3.matrix
    if C1.shape != C2.shape or C1.shape != C3.shape:
        raise ValueError("mixed Grassmannian dimensions")
    t12 = (C3 @ C2.T) @ C1 - (C3 @ C1.T) @ C2
    t34 = C1 @ (C2.T @ C3) - C2 @ (C1.T @ C3)
    return GrassmannTangent(t12 + t34)


# ---------------------------------------------------------------------------
# Link system for cones


@dataclass
class LinkPointResidual:
    point: tuple[float, ...]
    ok: bool
    f: float = math.nan
    grad_f_norm: float = math.nan
    shape_norm_sq: float = math.nan
    vector_residual: tuple[float, ...] = ()
    vector_norm: float = math.nan
    scalar_residual: float = math.nan
    vector_scale: float = math.nan
    scalar_scale: float = math.nan
    error: str | None = None


@dataclass
class LinkSystemReport:
    chart: str
    verdict: str
    tolerances: Tolerances
    vector_threshold: float
    scalar_threshold: float
    max_vector_residual: float
    max_scalar_residual: float
    max_abs_f: float
    points: list[LinkPointResidual]
    failed_points: int

    def as_dict(self, include_points: bool = True) -> dict:
        out = {
            "chart": self.chart,
            "verdict": self.verdict,
            "tolerances": self.tolerances.as_dict(),
            "vector_threshold": self.vector_threshold,
            "scalar_threshold": self.scalar_threshold,
            "max_vector_residual": self.max_vector_residual,
            "max_scalar_residual": self.max_scalar_residual,
            "max_abs_f": self.max_abs_f,
            "sample_count": len(self.points),
            "failed_points": self.failed_points,
        }
        if include_points:
            out["points"] = [
                {
                    "point": list(p.point),
                    "ok": p.ok,
                    "f": p.f,
                    "vector_norm": p.vector_norm,
                    "scalar_residual": p.scalar_residual,
                    "error": p.error,
                }
                for p in self.points
            ]
        return out


def _link_residual_at_point(chart, orientation, point) -> LinkPointResidual:
    try:
        m = chart.dim
        fd = fundamental_data(chart, point)
        sd = shape_data_spherical(chart, point, orientation, fd)
        V = gradient_of_mean_curvature(fd, sd)
        lap_v = rough_laplacian(fd, V)
        A = sd.shape_operator_values()
        v = V.values
        norm_sq = sd.shape_norm_sq.value
        coef = 2 * m - 3 - norm_sq
        vec = lap_v + A @ (A @ v) + coef * v
        f = sd.mean_curvature.value
        lap_f = scalar_laplacian(fd, sd.mean_curvature)
        scal = 3.0 * lap_f + (3 * m - 6 - norm_sq) * f
        return LinkPointResidual(
            point=tuple(point),
            ok=True,
            f=f,
            grad_f_norm=fd.norm(v),
            shape_norm_sq=norm_sq,
            vector_residual=tuple(float(x) for x in vec),
            vector_norm=fd.norm(vec),
            scalar_residual=float(scal),
            vector_scale=fd.norm(lap_v) + abs(norm_sq) * fd.norm(v)
            + abs(coef) * fd.norm(v) + fd.norm(A @ (A @ v)),
            scalar_scale=3.0 * abs(lap_f) + abs(3 * m - 6 - norm_sq) * abs(f),
        )
    except (DomainError, GeometryError, FloatingPointError) as exc:
        return LinkPointResidual(point=tuple(point), ok=False, error=str(exc))


class _LinkWorker:
    def __init__(self, chart, orientation):
        self.chart = chart
        self.orientation = orientation

    def __call__(self, point):
        return _link_residual_at_point(self.chart, self.orientation, point)


def link_residual_system(chart: ImmersionChart,
                         points: Sequence[tuple] | None = None,
                         orientation: int = 1,
                         tolerances: Tolerances | None = None,
                         workers: int | None = None) -> LinkSystemReport:
    """Evaluate the coupled link system deciding whether the cone over the
    link has proper biharmonic Gauss map:

        Delta(grad f) + A^2(grad f) + (2m - 3 - |A|^2) grad f = 0
        3 Delta f + (3m - 6 - |A|^2) f = 0

    A minimal link (f == 0) satisfies it trivially: verdict HarmonicGauss."""
    if chart.ambient != "sphere":
        raise GeometryError("the link system needs a sphere-ambient chart")
    tol = tolerances or Tolerances()
    if points is None:
        points = chart.sample_points(default_count=5)
    rows = _map_points(_LinkWorker(chart, orientation), points, workers)
    ok_rows = [r for r in rows if r.ok]
    failed = len(rows) - len(ok_rows)
    max_vec = max((r.vector_norm for r in ok_rows), default=0.0)
    max_scal = max((abs(r.scalar_residual) for r in ok_rows), default=0.0)
    max_f = max((abs(r.f) for r in ok_rows), default=0.0)
    shape_scale = math.sqrt(max((r.shape_norm_sq for r in ok_rows), default=0.0))
    vec_thr = tol.eps_abs + tol.eps_rel * max((r.vector_scale for r in ok_rows), default=0.0)
    scal_thr = tol.eps_abs + tol.eps_rel * max((r.scalar_scale for r in ok_rows), default=0.0)
    if failed > _FAIL_FRACTION * len(rows) or not ok_rows:
        verdict = INCONCLUSIVE
    elif max_f < tol.grad_rel * (1.0 + shape_scale):
        verdict = HARMONIC
    elif max_vec < vec_thr and max_scal < scal_thr:
        verdict = PROPER_BIHARMONIC
    else:
        verdict = NOT_BIHARMONIC
    return LinkSystemReport(chart.name, verdict, tol, vec_thr, scal_thr,
                            max_vec, max_scal, max_f, rows, failed)


# ---------------------------------------------------------------------------
# Necessary condition through the Ricci operator


def corollary_necessary_condition(sd: ShapeData, grad_f: TangentField) -> np.ndarray:
    """Value of 2 A^2(grad f) - m f A(grad f) - (2/3)|A|^2 grad f, assembled
    by eliminating the rough Laplacian between the two link equations and
    substituting the Ricci operator from the Gauss equation."""
    m = sd.dim
    ric = ricci_via_gauss_equation(sd, grad_f).values
    A = sd.shape_operator_values()
    v = grad_f.values
    norm_sq = sd.shape_norm_sq.value
    return A @ (A @ v) - ric + (m - 1 - (2.0 / 3.0) * norm_sq) * v


def check_corollary_on_chart(chart: ImmersionChart,
                             points: Sequence[tuple] | None = None,
                             orientation: int = 1) -> dict:
    """Max norm of the necessary condition over sample points. Precondition:
    |A|^2 constant across the sample (checked to 1e-8 relative)."""
    if points is None:
        points = chart.sample_points(default_count=5)
    norms = []
    values = []
    for p in points:
        fd = fundamental_data(chart, p)
        sd = shape_data_spherical(chart, p, orientation, fd)
        norms.append(sd.shape_norm_sq.value)
        V = gradient_of_mean_curvature(fd, sd)
        values.append(fd.norm(corollary_necessary_condition(sd, V)))
    spread = max(norms) - min(norms)
    if spread > 1e-8 * (1.0 + max(norms)):
        raise GeometryError("|A|^2 is not constant across the sample")
    return {"max_condition_norm": float(max(values)),
            "shape_norm_sq": float(np.mean(norms)),
            "sample_count": len(values)}


# ---------------------------------------------------------------------------
# R^3: prolongation certificate


@dataclass
class R3CheckResult:
    k0: float
    k0_dot: float
    k0_ddot: float
    second_eq_residual: float
    prolongation1: float  # k' k^2
    prolongation2: float  # k'' k^2 + 2 k k'^2
    prolongation3: float  # k''' k^2 + 6 k k' k'' + 2 k'^3, with k''' = -k'
    consistent: bool
    message: str


def r3_ode_check(k0: float, k0_dot: float, k0_ddot: float | None = None) -> R3CheckResult:
    """Consistency of curvature initial data with the planar-cone system
    k''' + k' = 0 and k(3 + k^2) + 3k'' = 0.

    Eliminating k''' between the first equation and the derivative of the
    second yields k' k^2 = 0; differentiating again (and once more, using
    k''' = -k') closes the certificate: the only consistent data is
    k0 = k0' = 0, i.e. k == 0 and the cone's Gauss map is harmonic, never
    proper biharmonic."""
    if k0_ddot is None:
        k0_ddot = -k0 * (3.0 + k0 * k0) / 3.0
        second_residual = 0.0
    else:
        second_residual = k0 * (3.0 + k0 * k0) + 3.0 * k0_ddot
    p1 = k0_dot * k0 * k0
    p2 = k0_ddot * k0 * k0 + 2.0 * k0 * k0_dot * k0_dot
    k0_dddot = -k0_dot
    p3 = k0_dddot * k0 * k0 + 6.0 * k0 * k0_dot * k0_ddot + 2.0 * k0_dot ** 3
    scale = 1.0 + abs(k0) + abs(k0_dot) + abs(k0_ddot)
    tolerance = 1e-12 * scale ** 3
    consistent = (abs(second_residual) <= tolerance and abs(p1) <= tolerance
                  and abs(p2) <= tolerance and abs(p3) <= tolerance)
    message = ("only k = 0 admissible: data consistent with the system and "
               "its prolongations" if consistent else
               "inconsistent initial data: the prolongation chain forces k = 0")
    return R3CheckResult(float(k0), float(k0_dot), float(k0_ddot),
                         float(second_residual), float(p1), float(p2),
                         float(p3), consistent, message)


# ---------------------------------------------------------------------------
# R^4: integral obstruction


@dataclass
class R4Obstruction:
    chart: str
    grid: tuple[int, int]
    closures: tuple[str, str]  # per-variable: "periodic" | "capped"
    area: float
    integral_laplacian: float  # integral of 3 Delta f dA
    integral_weighted_f: float  # integral of |A|^2 f dA
    mean_f: float
    orientation_flipped: bool
    obstruction_holds: bool

    def as_dict(self) -> dict:
        return {
            "chart": self.chart,
            "grid": list(self.grid),
            "closures": list(self.closures),
            "area": self.area,
            "integral_laplacian": self.integral_laplacian,
            "integral_weighted_f": self.integral_weighted_f,
            "mean_f": self.mean_f,
            "orientation_flipped": self.orientation_flipped,
            "obstruction_holds": self.obstruction_holds,
        }


def r4_obstruction(chart: ImmersionChart, grid: tuple[int, int] = (24, 24),
                   tolerance: float = 1e-8) -> R4Obstruction:
    """Integral obstruction on a compact 2d link: integrating the scalar link
    equation 3 Delta f = |A|^2 f (the m = 2 case) over the closed surface
    kills the left side by the divergence theorem, so a non-minimal link with
    f of one sign cannot solve it; no cone in R^4 has proper biharmonic Gauss
    map. Integration is the equal-weight rule on a uniform grid with the area
    element sqrt(det g); the grid is offset by half a step so that chart
    degeneracies at the box edges (poles) are never evaluated. Orientation is
    normalized so that the integral of f is >= 0.

    Each variable direction of the domain box must close up: either the chart
    is periodic in it, or the area element vanishes at both edges (a pole
    cap). Anything else raises GeometryError, since the surface would have a
    boundary and the divergence identity fails.
    """
    if chart.ambient != "sphere" or chart.dim != 2:
        raise GeometryError("the obstruction applies to 2d sphere-ambient links")
    (u_lo, u_hi), (v_lo, v_hi) = chart.domain
    nu, nv = grid
    if nu < 4 or nv < 4:
        raise GeometryError("grid too coarse for the integral rule")
    closures = (_closure_kind(chart, 0), _closure_kind(chart, 1))
    du = (u_hi - u_lo) / nu
    dv = (v_hi - v_lo) / nv
    lap_sum = 0.0
    weighted_sum = 0.0
    f_sum = 0.0
    area = 0.0
    for i in range(nu):
        for j in range(nv):
            p = (u_lo + (i + 0.5) * du, v_lo + (j + 0.5) * dv)
            fd = fundamental_data(chart, p, order=4)
            sd = shape_data_spherical(chart, p, 1, fd)
            w = math.sqrt(max(np.linalg.det(fd.metric_values()), 0.0)) * du * dv
            f = sd.mean_curvature.value
            lap_sum += 3.0 * scalar_laplacian(fd, sd.mean_curvature) * w
            weighted_sum += sd.shape_norm_sq.value * f * w
            f_sum += f * w
            area += w
    flipped = f_sum < 0.0
    if flipped:
        lap_sum, weighted_sum, f_sum = -lap_sum, -weighted_sum, -f_sum
    # positivity must hold at scale: a minimal link gives a roundoff-size
    # second integral and no contradiction
    holds = (abs(lap_sum) <= tolerance * max(area, 1.0)
             and weighted_sum > tolerance * max(area, 1.0))
    return R4Obstruction(chart.name, (nu, nv), closures, float(area),
                         float(lap_sum), float(weighted_sum),
                         float(f_sum / area), flipped, holds)


def _edge_points(chart, var: int, at_hi: bool, count: int = 5):
    (u_lo, u_hi), (v_lo, v_hi) = chart.domain
    if var == 0:
        u = u_hi if at_hi else u_lo
        return [(u, v) for v in np.linspace(v_lo, v_hi, count + 2)[1:-1]]
    v = v_hi if at_hi else v_lo
    return [(u, v) for u in np.linspace(u_lo, u_hi, count + 2)[1:-1]]


def _closure_kind(chart, var: int, tol: float = 1e-8) -> str:
    periodic = True
    for lo_pt, hi_pt in zip(_edge_points(chart, var, False),
                            _edge_points(chart, var, True)):
        a = [j.value for j in chart.component_jets(lo_pt, order=0)]
        b = [j.value for j in chart.component_jets(hi_pt, order=0)]
        if max(abs(x - y) for x, y in zip(a, b)) > tol:
            periodic = False
            break
    if periodic:
        return "periodic"
    for at_hi in (False, True):
        for pt in _edge_points(chart, var, at_hi):
            jets = chart.component_jets(pt, order=1)
            tangents = [[j.derivative(i).value for j in jets] for i in range(2)]
            g = np.array([[sum(a * b for a, b in zip(ti, tj)) for tj in tangents]
                          for ti in tangents])
            if abs(np.linalg.det(g)) > tol:
                raise GeometryError(
                    f"chart does not close up in variable {chart.variables[var]!r}"
                    " (neither periodic nor pole-capped)")
    return "capped"
