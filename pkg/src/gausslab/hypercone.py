"""Hypercones over links in the unit sphere, and cylinder constructions.

The cone over a link M in S^(m+1) is the warped product (0, inf) x M with
immersion (t, p) -> t * X(p). Its shape operator kills the radial direction
and scales the link's by 1/t, so mean curvature and |A|^2 obey

    f_cone = m * f_link / ((m+1) t),    |A_cone|^2 = |A_link|^2 / t^2,

with m the link dimension. The radial coefficient of the cone Laplacian on
radial functions is likewise m: Delta(t^a) = -a(a-1) t^(a-2) - m a t^(a-2)
(cross-validated against the jet pipeline in the tests).

Solvers for the constant-|A|^2 links: small spheres S^m(a) (a^2 = m/(4m-6)),
and products S^m1(r1) x S^m2(r2) with m1/r1^2 + m2/r2^2 = 4m - 6. Each root
is certified exactly and flagged: "minimal" links give a harmonic Gauss map,
and the m = 3 product solution satisfies the curvature condition while
falling outside the m > 3 range of the catalog statement, so it is flagged
"paper-range conflict" rather than dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .exprjet import (
    BinOp,
    Call,
    EvalContext,
    JetValue,
    Var,
    antiderivative_jet,
    eval_jet,
    parse_expression,
    shift_variables,
)
from .geometry import (
    GeometryError,
    ImmersionChart,
    SamplingSpec,
    ShapeData,
    chart_from_strings,
    fundamental_data,
    shape_data_spherical,
)
from .roots import Polynomial, isolate_and_refine

__all__ = [
    "LinkSummary",
    "ConeShapeValues",
    "cone_shape_from_link",
    "cmc_cone_condition",
    "SphereConeSolution",
    "sphere_link_solver",
    "CliffordRoot",
    "clifford_link_solver",
    "clifford_shape_norm_sq",
    "build_cone_chart",
    "polynomial_curvature_cylinder",
    "clothoid_cylinder",
    "CompositionEnergy",
    "composition_energy_check",
    "sphere_link_chart",
    "clifford_link_chart",
]

_CONSTANCY_RTOL = 1e-8
_CONDITION_TOL = 1e-9

FLAG_VALID = "valid"
FLAG_MINIMAL = "minimal"
FLAG_EXCLUDED = "excluded"
FLAG_PAPER_RANGE = "paper-range conflict"


# ---------------------------------------------------------------------------
# Link summaries and pointwise cone data


@dataclass
class LinkSummary:
    """Constancy-checked invariants of a link chart."""

    dim: int
    f_value: float
    shape_norm_sq: float
    cmc: bool
    minimal: bool

    @classmethod
    def from_chart(cls, chart: ImmersionChart, points: Sequence[tuple] | None = None,
                   orientation: int = 1) -> "LinkSummary":
        if chart.ambient != "sphere":
            raise GeometryError("link charts live in the unit sphere")
        if points is None:
            points = chart.sample_points(default_count=5)
        fs, norms = [], []
        for p in points:
            sd = shape_data_spherical(chart, p, orientation)
            fs.append(sd.mean_curvature.value)
            norms.append(sd.shape_norm_sq.value)
        fs = np.asarray(fs)
        norms = np.asarray(norms)
        f_spread = float(fs.max() - fs.min())
        n_spread = float(norms.max() - norms.min())
        cmc = bool(f_spread <= _CONSTANCY_RTOL * (1.0 + abs(fs).max())
                   and n_spread <= _CONSTANCY_RTOL * (1.0 + norms.max()))
        f_value = float(fs.mean())
        minimal = abs(f_value) <= 1e-9 * (1.0 + math.sqrt(max(norms.max(), 0.0)))
        return cls(chart.dim, f_value, float(norms.mean()), cmc, minimal)


@dataclass
class ConeShapeValues:
    """Shape invariants of the cone at radius t from link shape data."""

    t: float
    eigenvalues: tuple[float, ...]  # includes the radial 0
    mean_curvature: float
    shape_norm_sq: float


def cone_shape_from_link(link_sd: ShapeData, t: float) -> ConeShapeValues:
    """A(d_t) = 0 and A = A_link / t on the slice directions."""
    if t <= 0.0:
        raise ValueError("cone radius t must be positive")
    m = link_sd.dim
    eigs = np.linalg.eigvals(link_sd.shape_operator_values())
    eigs = np.sort(eigs.real)
    values = (0.0,) + tuple(float(e) / t for e in eigs)
    f = m * link_sd.mean_curvature.value / ((m + 1) * t)
    norm_sq = link_sd.shape_norm_sq.value / (t * t)
    return ConeShapeValues(float(t), values, float(f), float(norm_sq))


def cmc_cone_condition(link: LinkSummary) -> bool:
    """Whether the cone over a CMC, non-minimal link has proper biharmonic
    Gauss map: m > 2 and |A_link|^2 = 3(m-2)."""
    if not link.cmc:
        raise GeometryError("link is not CMC (f or |A|^2 varies across samples)")
    if link.minimal:
        raise GeometryError("link is minimal; the Gauss map question is trivial")
    m = link.dim
    return m > 2 and abs(link.shape_norm_sq - 3.0 * (m - 2)) <= _CONDITION_TOL * (
        1.0 + abs(link.shape_norm_sq))


# ---------------------------------------------------------------------------
# Catalog solvers


@dataclass
class SphereConeSolution:
    m: int
    a: float
    a_sq_exact: Fraction
    shape_norm_sq: float
    f_value: float
    theta: float
    identity_exact: bool  # m (1 - a^2)/a^2 == 3(m-2) in exact arithmetic


def sphere_link_solver(m: int) -> SphereConeSolution | None:
    """Radius of the small-sphere link S^m(a) whose cone has proper
    biharmonic Gauss map; None when no such radius exists (m <= 2)."""
    if m < 1:
        raise ValueError("link dimension must be positive")
    if m <= 2:
        return None
    a_sq = Fraction(m, 4 * m - 6)
    identity = (m * (1 - a_sq) / a_sq == 3 * (m - 2))
    a = math.sqrt(a_sq)
    k1 = math.sqrt(3.0 * (m - 2) / m)  # = sqrt(1-a^2)/a
    return SphereConeSolution(m, a, a_sq, float(3 * (m - 2)), k1,
                              math.asin(a), identity)


def clifford_shape_norm_sq(m1: int, m2: int, r1_sq: float) -> float:
    """|A|^2 of S^m1(r1) x S^m2(r2) in the unit sphere, r2^2 = 1 - r1^2."""
    r2_sq = 1.0 - r1_sq
    return m1 * r2_sq / r1_sq + m2 * r1_sq / r2_sq


@dataclass
class CliffordRoot:
    m: int
    m1: int
    m2: int
    r1_sq: float
    r2_sq: float
    shape_norm_sq: float
    k1: float
    theta: float
    minimal: bool
    theorem_ok: bool       # m > 2, non-minimal, |A|^2 = 3(m-2)
    proposition_ok: bool   # stated catalog range m > 3
    flag: str


def clifford_link_solver(m: int, m1: int) -> list[CliffordRoot]:
    """Product-link radii solving m1/r1^2 + m2/r2^2 = 4m - 6 with
    r1^2 + r2^2 = 1; both theorem-level and catalog-range conditions are
    reported per root."""
    if not 1 <= m1 <= m - 1:
        raise ValueError("need 1 <= m1 <= m-1")
    m2 = m - m1
    # quadratic in x = r1^2
    poly = Polynomial.from_coeffs([m1, -(4 * m - 6 + m1 - m2), 4 * m - 6])
    if poly.degree < 2 and 4 * m - 6 == 0:
        return []
    minimal_x = Fraction(m1, m1 + m2)
    minimal_is_root = poly.eval_exact(minimal_x) == 0
    intervals = isolate_and_refine(poly, 0, 1)
    if not intervals:
        raise ValueError(f"no real solutions in (0, 1) for m={m}, m1={m1}")
    roots = []
    for r in intervals:
        x = r.value
        r2_sq = 1.0 - x
        norm_sq = clifford_shape_norm_sq(m1, m2, x)
        minimal = minimal_is_root and abs(x - float(minimal_x)) <= 1e-9
        theorem_ok = (m > 2 and not minimal
                      and abs(norm_sq - 3.0 * (m - 2)) <= _CONDITION_TOL * (1 + norm_sq))
        proposition_ok = m > 3
        if minimal:
            flag = FLAG_MINIMAL
        elif theorem_ok and proposition_ok:
            flag = FLAG_VALID
        elif theorem_ok:
            flag = FLAG_PAPER_RANGE
        else:
            flag = FLAG_EXCLUDED
        k1 = math.sqrt(r2_sq / x)
        roots.append(CliffordRoot(m, m1, m2, x, r2_sq, norm_sq, k1,
                                  math.asin(math.sqrt(x)), minimal,
                                  theorem_ok, proposition_ok, flag))
    return roots


# ---------------------------------------------------------------------------
# Chart constructors


def _sphere_components(variables: Sequence[str]) -> list[str]:
    """Pole-free box chart of S^m in R^(m+1): iteratively append cos factors."""
    comps = [f"cos({variables[0]})", f"sin({variables[0]})"]
    for v in variables[1:]:
        comps = [f"{c}*cos({v})" for c in comps] + [f"sin({v})"]
    return comps


def sphere_link_chart(m: int, a_sq, name: str | None = None,
                      box: float = 0.6) -> ImmersionChart:
    """Small sphere S^m(a) at constant height in S^(m+1); `a_sq` may be a
    Fraction/int pair-friendly exact value or a float."""
    a_sq_f = Fraction(a_sq) if not isinstance(a_sq, float) else None
    if a_sq_f is not None:
        a_src = f"sqrt({a_sq_f.numerator}/{a_sq_f.denominator})"
        c_src = f"sqrt({(1 - a_sq_f).numerator}/{(1 - a_sq_f).denominator})"
    else:
        a_src = f"sqrt({a_sq!r})"
        c_src = f"sqrt({1.0 - a_sq!r})"
    variables = tuple(f"u{i+1}" for i in range(m))
    comps = [f"({c})*{a_src}" for c in _sphere_components(variables)] + [c_src]
    if m == 1:
        domain = [(0.0, 2 * math.pi)]
    else:
        domain = [(-box, box)] * m
    return chart_from_strings(name or f"sphere_link(m={m})", variables, comps,
                              domain, ambient="sphere")


def clifford_link_chart(m1: int, m2: int, r1_sq, name: str | None = None,
                        box: float = 0.6) -> ImmersionChart:
    """Product link S^m1(r1) x S^m2(r2) in the unit sphere, r2^2 = 1 - r1^2."""
    r1_sq_f = Fraction(r1_sq) if not isinstance(r1_sq, float) else None
    if r1_sq_f is not None:
        r1_src = f"sqrt({r1_sq_f.numerator}/{r1_sq_f.denominator})"
        r2_src = f"sqrt({(1 - r1_sq_f).numerator}/{(1 - r1_sq_f).denominator})"
    else:
        r1_src = f"sqrt({r1_sq!r})"
        r2_src = f"sqrt({1.0 - r1_sq!r})"
    u_vars = tuple(f"u{i+1}" for i in range(m1))
    v_vars = tuple(f"v{i+1}" for i in range(m2))
    comps = [f"({c})*{r1_src}" for c in _sphere_components(u_vars)]
    comps += [f"({c})*{r2_src}" for c in _sphere_components(v_vars)]
    domain = [(0.0, 2 * math.pi) if m1 == 1 else (-box, box)] * m1
    domain += [(0.0, 2 * math.pi) if m2 == 1 else (-box, box)] * m2
    return chart_from_strings(name or f"clifford_link({m1},{m2})",
                              u_vars + v_vars, comps, domain, ambient="sphere")


def build_cone_chart(link: ImmersionChart, t_interval: tuple[float, float] = (0.5, 2.0),
                     t_count: int = 5, t_name: str = "t") -> ImmersionChart:
    """Euclidean chart (t, p) -> t * X(p) over a sphere-ambient link chart."""
    if link.ambient != "sphere":
        raise GeometryError("cone links must be sphere-ambient charts")
    if t_name in link.variables:
        raise GeometryError(f"link chart already uses variable {t_name!r}")
    if t_interval[0] <= 0.0:
        raise GeometryError("cone radius interval must stay positive")
    for comp in link.components:
        if hasattr(comp, "jet"):
            raise GeometryError("cone links need expression components")
    names = (t_name,) + link.variables
    t_var = Var(0, t_name)
    components = tuple(BinOp("*", t_var, shift_variables(c, 1, names))
                       for c in link.components)
    sampling = link.sampling
    if sampling is not None and sampling.counts is not None:
        sampling = SamplingSpec(counts=(t_count,) + sampling.counts)
    elif sampling is not None and sampling.values is not None:
        t_vals = tuple(np.linspace(*t_interval, t_count))
        sampling = SamplingSpec(values=(t_vals,) + sampling.values)
    return ImmersionChart(f"cone({link.name})", link.dim + 1, "euclidean",
                          names, components, (t_interval,) + link.domain, sampling)


# ---------------------------------------------------------------------------
# Quadratic-curvature cylinders


@dataclass(eq=False)
class _QuadratureCurveComponent:
    """Plane-curve coordinate of the arc-length curve with polynomial signed
    curvature: tangent angle theta(s) = sum k_i s^(i+1)/(i+1). Derivatives
    come from jets of cos/sin(theta); the position value from adaptive
    quadrature (abs tol 1e-13)."""

    kind: str  # "cos" | "sin"
    k_coeffs: tuple[float, ...]  # curvature coefficients, low degree first
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def _theta_coeffs(self) -> tuple[float, ...]:
        return tuple(k / (i + 1) for i, k in enumerate(self.k_coeffs))

    def _theta(self, s: float) -> float:
        acc = 0.0
        for i, t in enumerate(self._theta_coeffs):
            acc += t * s ** (i + 1)
        return acc

    def _integrand(self, s: float) -> float:
        t = self._theta(s)
        return math.cos(t) if self.kind == "cos" else math.sin(t)

    def _position(self, s: float) -> float:
        if s not in self._cache:
            val, _ = quad(self._integrand, 0.0, s, epsabs=1e-13, epsrel=1e-13,
                          limit=500)
            self._cache[s] = val
        return self._cache[s]

    def jet(self, point: tuple[float, ...], dim: int, order: int) -> JetValue:
        names = tuple(f"_x{i}" for i in range(dim))
        terms = [f"{t!r}*{names[0]}^{i + 1}" for i, t in enumerate(self._theta_coeffs)
                 if t != 0.0]
        theta_src = " + ".join(terms) if terms else "0"
        ast = Call(self.kind, parse_expression(theta_src, names))
        djet = eval_jet(ast, EvalContext(tuple(point), max(order - 1, 0)))
        return antiderivative_jet(djet, 0, self._position(point[0]))


def polynomial_curvature_cylinder(k_coeffs: Sequence[float],
                                  s_interval: tuple[float, float] = (-1.0, 1.0),
                                  w_interval: tuple[float, float] = (-1.0, 1.0),
                                  name: str | None = None) -> ImmersionChart:
    """Right cylinder (s, w) -> (x(s), y(s), w) over the arc-length plane
    curve with signed curvature k(s) = sum k_i s^i (coefficients low degree
    first). |sigma'| = 1 by construction, since the curve is reconstructed
    from its tangent angle."""
    ks = tuple(float(k) for k in k_coeffs)
    variables = ("s", "w")
    components = (
        _QuadratureCurveComponent("cos", ks),
        _QuadratureCurveComponent("sin", ks),
        Var(1, "w"),
    )
    return ImmersionChart(name or f"curvature_cylinder{ks}", 2,
                          "euclidean", variables, components,
                          (tuple(s_interval), tuple(w_interval)))


def clothoid_cylinder(a: float, b: float, c: float,
                      s_interval: tuple[float, float] = (-1.0, 1.0),
                      w_interval: tuple[float, float] = (-1.0, 1.0),
                      name: str | None = None) -> ImmersionChart:
    """Right cylinder over the curve with quadratic signed curvature
    k(s) = a s^2 + b s + c.

    "Clothoid" classically means k linear in s; the quadratic family is the
    natural closure here since the cylinder's Gauss map is proper biharmonic
    exactly when k''' = 0 with k non-constant."""
    return polynomial_curvature_cylinder(
        (c, b, a), s_interval, w_interval,
        name or f"clothoid_cylinder({a},{b},{c})")


# ---------------------------------------------------------------------------
# Composition energy


@dataclass
class CompositionEnergy:
    m: int
    t: float
    energy: float            # e = m / (2 t^2)
    laplacian: float         # closed form m(m-3)/t^4
    laplacian_numeric: float # radial cone Laplacian applied by jets
    harmonic: bool           # Delta e = 0, i.e. m == 3


def composition_energy_check(m: int, t: float) -> CompositionEnergy:
    """Energy density e = m/(2 t^2) of the cone's Gauss map and its cone
    Laplacian, computed both in closed form m(m-3)/t^4 and by applying the
    radial Laplacian -d^2/dt^2 - (m/t) d/dt to a jet of e."""
    if m < 1:
        raise ValueError("link dimension must be positive")
    if t <= 0.0:
        raise ValueError("t must be positive")
    ast = parse_expression(f"{m}/(2*t^2)", ("t",))
    jet = eval_jet(ast, EvalContext((float(t),), order=2))
    numeric = -jet.partial((2,)) - (m / t) * jet.partial((1,))
    closed = m * (m - 3.0) / t ** 4
    return CompositionEnergy(m, float(t), jet.value, closed, float(numeric),
                             m == 3)
