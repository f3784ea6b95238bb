"""(alpha, beta)-metrics F = alpha * phi(beta / alpha) for the infinite-series
family phi(s) = s^2 / (s - 1) and the exponential family phi(s) = e^s.

alpha(Y) = sqrt(<Y, Y>) and beta(Y) = <X, Y> with <,> taken from a
:class:`~flagcurv.lie.MetricStructure`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import PoleError, UndefinedInputError
from .lie import MetricStructure

# steps are relative to alpha(Y); see _default_step for the pole scaling
DEFAULT_STEP = 1e-4
RIDDERS_STEP = 2e-2
NESTED_INNER_STEP = 1e-3
POLE_EPS = 1e-12


class Family(str, Enum):
    INFINITE_SERIES = "infinite-series"
    EXPONENTIAL = "exponential"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"inf": cls.INFINITE_SERIES, "infinite": cls.INFINITE_SERIES,
                   "exp": cls.EXPONENTIAL}
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class PhiProfile:
    """phi and its first two derivatives for one metric family."""

    family: Family

    @property
    def singularities(self) -> tuple:
        return (1.0,) if self.family is Family.INFINITE_SERIES else ()

    def phi(self, s):
        s = np.asarray(s, dtype=float)
        if self.family is Family.INFINITE_SERIES:
            return s * s / (s - 1.0)
        return np.exp(s)

    def dphi(self, s):
        s = np.asarray(s, dtype=float)
        if self.family is Family.INFINITE_SERIES:
            return (s * s - 2.0 * s) / (s - 1.0) ** 2
        return np.exp(s)

    def d2phi(self, s):
        s = np.asarray(s, dtype=float)
        if self.family is Family.INFINITE_SERIES:
            return 2.0 / (s - 1.0) ** 3
        return np.exp(s)

    def shen_quantity(self, s, b):
        """phi(s) - s phi'(s) + (b^2 - s^2) phi''(s)."""
        s = np.asarray(s, dtype=float)
        return self.phi(s) - s * self.dphi(s) + (b * b - s * s) * self.d2phi(s)

    def rho_coefficients(self, s):
        """Coefficients of the (alpha, beta) fundamental tensor

        g_Y = rho a + rho0 b(x)b + rho1 (b(x)a_Y + a_Y(x)b) + rho2 a_Y(x)a_Y,

        where a_Y = <Y, .>/alpha is the normalised pole covector.
        """
        p, p1, p2 = self.phi(s), self.dphi(s), self.d2phi(s)
        rho = p * (p - s * p1)
        rho0 = p * p2 + p1 * p1
        rho1 = p * p1 - s * rho0
        rho2 = s * (s * rho0 - p * p1)
        return float(rho), float(rho0), float(rho1), float(rho2)


def profile(family) -> PhiProfile:
    return PhiProfile(Family.parse(family))


@dataclass
class ShenReport:
    family: Family
    b: float
    samples: int
    min_value: float
    argmin: float
    passed: bool
    skipped: list = field(default_factory=list)
    findings: list = field(default_factory=list)
    domain_excludes_classical_interval: bool = False
    min_phi: float = float("nan")

    def as_dict(self):
        return {
            "family": self.family.value,
            "b": self.b,
            "samples": self.samples,
            "min_Q": self.min_value,
            "argmin": self.argmin,
            "min_phi": self.min_phi,
            "passed": self.passed,
            "skipped_singularities": list(self.skipped),
            "domain_excludes_classical_interval": self.domain_excludes_classical_interval,
            "findings": list(self.findings),
        }


def shen_criterion(prof: PhiProfile, b: float, s_samples: int = 1001) -> ShenReport:
    """Grid check of phi > 0 and phi - s phi' + (b^2 - s^2) phi'' > 0 on [-b, b]."""
    b = float(b)
    if b < 0 or not math.isfinite(b):
        raise ValueError("b must be a finite non-negative number")
    if s_samples < 1:
        raise ValueError("s_samples must be positive")
    grid = np.array([0.0]) if b == 0 else np.linspace(-b, b, int(s_samples))

    skipped = []
    keep = np.ones(grid.shape, dtype=bool)
    pole_inside = False
    for pole in prof.singularities:
        if -b <= pole <= b:
            pole_inside = True
            near = np.abs(grid - pole) < 1e-9 * max(1.0, b)
            keep &= ~near
            skipped.append(pole)
    s = grid[keep]
    with np.errstate(divide="ignore", invalid="ignore"):
        q = prof.shen_quantity(s, b)
        ph = prof.phi(s)
    i = int(np.argmin(q))
    min_q, arg = float(q[i]), float(s[i])
    min_phi = float(np.min(ph))

    findings = []
    if pole_inside:
        findings.append(f"phi has a pole at s = {skipped[0]:g} inside [-b, b]; "
                        "domain excludes classical Shen interval")
    if min_phi <= 0:
        j = int(np.argmin(ph))
        findings.append(f"phi is not positive on [-b, b]: min phi = {min_phi:.6g} at s = {float(s[j]):.6g}")
        if prof.family is Family.INFINITE_SERIES:
            findings.append("phi(0) = 0 for the infinite-series profile")
    if min_q <= 0:
        findings.append(f"Shen quantity not positive: min Q = {min_q:.6g} at s = {arg:.6g}")
    passed = bool(min_q > 0 and min_phi > 0 and not pole_inside)
    return ShenReport(prof.family, b, len(grid), min_q, arg, passed, skipped, findings,
                      pole_inside, min_phi)


@dataclass(frozen=True)
class AlphaBetaMetric:
    """F = alpha phi(beta/alpha) with beta(Y) = <X, Y>."""

    family: Family
    X: np.ndarray
    structure: MetricStructure = field(repr=False)

    def __post_init__(self):
        fam = Family.parse(self.family)
        X = np.array(self.X, dtype=float)
        if X.shape != (self.structure.dim,):
            raise ValueError(f"X must have shape ({self.structure.dim},)")
        if not np.all(np.isfinite(X)):
            raise ValueError("X must be finite")
        if fam is Family.INFINITE_SERIES and not np.any(X):
            raise UndefinedInputError("infinite-series metric needs X != 0 (beta = 0 gives F = 0)")
        X.setflags(write=False)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "X", X)

    @property
    def profile(self) -> PhiProfile:
        return PhiProfile(self.family)

    @property
    def b(self) -> float:
        """Length of beta with respect to alpha."""
        return self.structure.norm(self.X)

    @property
    def norm_bound_flag(self) -> bool:
        return self.b < 1.0

    def with_X(self, X) -> "AlphaBetaMetric":
        return AlphaBetaMetric(self.family, X, self.structure)

    def alpha_beta(self, Y):
        G = self.structure.gram
        Y = np.asarray(Y, dtype=float)
        return math.sqrt(max(float(Y @ G @ Y), 0.0)), float(self.X @ G @ Y)

    def s_value(self, Y) -> float:
        a, b = self.alpha_beta(Y)
        if a == 0:
            raise UndefinedInputError("Y = 0")
        return b / a


def _alpha_beta_batch(metric, pts):
    G = metric.structure.gram
    a = np.sqrt(np.maximum(np.einsum("ki,ij,kj->k", pts, G, pts), 0.0))
    b = pts @ (G @ metric.X)
    return a, b


def _half_sq_batch(metric, pts, pole_margin=POLE_EPS):
    """1/2 F^2 on a stack of points; raises PoleError near singular points."""
    a, b = _alpha_beta_batch(metric, pts)
    if np.any(a <= 0):
        raise PoleError("alpha vanishes at an evaluation point", factor="alpha")
    s = b / a
    if metric.family is Family.INFINITE_SERIES:
        bad = np.abs(s - 1.0) <= pole_margin
        if np.any(bad):
            raise PoleError(f"beta/alpha within {pole_margin:g} of the pole s = 1",
                            s_value=float(s[np.argmax(bad)]), factor="beta - alpha")
        F = b * b / (b - a)
    else:
        F = a * np.exp(s)
    return 0.5 * F * F


def finsler_norm(metric: AlphaBetaMetric, Y) -> float:
    Y = np.asarray(Y, dtype=float)
    a, b = metric.alpha_beta(Y)
    if a == 0:
        raise UndefinedInputError("F is undefined at Y = 0")
    if metric.family is Family.INFINITE_SERIES:
        if abs(b - a) <= POLE_EPS * a:
            raise PoleError("beta = alpha: infinite-series metric has a pole here",
                            s_value=b / a, factor="beta - alpha")
        return b * b / (b - a)
    return a * math.exp(b / a)


def _default_step(metric, a, b, base):
    """base * alpha(Y), shrunk near the infinite-series pole s = 1.

    A unit step moves s = beta/alpha by at most (|X| + |s|) / alpha, so the
    factor |s - 1| / (|X| + |s|) keeps stencils well inside the pole-free
    neighbourhood of Y.
    """
    h = base * a
    if metric.family is Family.INFINITE_SERIES:
        s = b / a
        h *= min(1.0, abs(s - 1.0) / (metric.b + abs(s)))
    return h


def _unit(metric, v):
    n = metric.structure.norm(v)
    return (np.asarray(v, dtype=float) / n, n) if n > 0 else (None, 0.0)


def ridders(fn, h0, shrink=2.0, levels=10, order=2, safe=2.0):
    """Ridders' extrapolation of fn(h) -> limit as h -> 0.

    ``fn`` must have an error expansion in powers of h**order.  Returns the
    tableau entry with the smallest estimated error and that estimate.
    """
    c = shrink**order
    prev = [fn(h0)]
    best, err = prev[0], math.inf
    h = h0
    for _ in range(1, levels):
        h /= shrink
        row = [fn(h)]
        fac = c
        for j in range(1, len(prev) + 1):
            row.append((row[j - 1] * fac - prev[j - 1]) / (fac - 1.0))
            fac *= c
            e = max(abs(row[j] - row[j - 1]), abs(row[j] - prev[j - 1]))
            if e <= err:
                best, err = row[j], e
        if abs(row[-1] - prev[-1]) >= safe * err:
            break
        prev = row
    return best, err


def fundamental_tensor_numeric(metric, Y, U, V, step=None, method="ridders") -> float:
    """Central mixed difference of 1/2 F^2 (Y + sU + tV) at s = t = 0.

    U and V are normalised before differencing and the result rescaled, so
    ``step`` is an absolute step along unit directions.  ``method="ridders"``
    (default) starts at ``step`` (default ``RIDDERS_STEP * alpha(Y)``, pole
    scaled) and extrapolates over a shrinking sequence; ``method="fixed"``
    uses ``step`` (default ``DEFAULT_STEP * alpha(Y)``) with one Richardson
    level.
    """
    Y = np.asarray(Y, dtype=float)
    a, b = metric.alpha_beta(Y)
    if a == 0:
        raise UndefinedInputError("fundamental tensor undefined at Y = 0")
    u, nu = _unit(metric, U)
    v, nv = _unit(metric, V)
    if nu == 0 or nv == 0:
        return 0.0
    if method not in ("ridders", "fixed"):
        raise ValueError(f"unknown method {method!r}")
    base = RIDDERS_STEP if method == "ridders" else DEFAULT_STEP
    h = _default_step(metric, a, b, base) if step is None else float(step)
    margin = max(POLE_EPS, 2.5 * h / a)

    def diff(hh):
        pts = np.array([Y + hh * u + hh * v, Y + hh * u - hh * v,
                        Y - hh * u + hh * v, Y - hh * u - hh * v])
        G = _half_sq_batch(metric, pts, pole_margin=margin)
        return (G[0] - G[1] - G[2] + G[3]) / (4.0 * hh * hh)

    if method == "ridders":
        d, _ = ridders(diff, h)
    else:
        d = (4.0 * diff(0.5 * h) - diff(h)) / 3.0
    return float(d * nu * nv)


def _check_smooth(metric, Y):
    a, b = metric.alpha_beta(Y)
    if a == 0:
        raise UndefinedInputError("Y = 0")
    if metric.family is Family.INFINITE_SERIES and abs(b - a) <= POLE_EPS * a:
        raise PoleError("beta = alpha", s_value=b / a, factor="beta - alpha")
    return a, b


def fundamental_tensor_closed(metric, Y, U, V, form="literal") -> float:
    """Closed-form g_Y(U, V).

    ``form="literal"`` transcribes the published general-Y expressions term
    by term; ``form="corrected"`` uses the rho-coefficient identity for
    (alpha, beta)-metrics and agrees with the Hessian of 1/2 F^2.
    """
    Y, U, V = (np.asarray(w, dtype=float) for w in (Y, U, V))
    ip = metric.structure.inner
    X = metric.X
    a, xy = _check_smooth(metric, Y)
    yy = a * a
    xu, xv = ip(X, U), ip(X, V)
    uy, vy, uv = ip(U, Y), ip(V, Y), ip(U, V)

    if form == "corrected":
        rho, rho0, rho1, rho2 = metric.profile.rho_coefficients(xy / a)
        return (rho * uv + rho0 * xu * xv + rho1 * (xu * vy + xv * uy) / a
                + rho2 * uy * vy / yy)
    if form != "literal":
        raise ValueError(f"unknown form {form!r}")

    if metric.family is Family.INFINITE_SERIES:
        bracket = (xy**2 * xv * xu
                   - 4.0 * yy**1.5 * xv * xu
                   + 6.0 * yy * xv * xu
                   + xy**2 * xv * uy / a
                   - 4.0 * xy * xv * uy
                   - xy**3 * uy * vy / yy**1.5
                   + xy**3 * uv / a
                   + 4.0 * xy**2 * uy * vy / yy
                   - xy**2 * uv
                   + xy**2 * xu * vy / a
                   - 4.0 * xy * xu * vy)
        return xy**2 / (xy - a) ** 4 * bracket

    return math.exp(2.0 * xy / a) * (
        uv + 2.0 * xu * xv - xy * uy * vy / yy**1.5
        + (xu * vy + xv * uy - xy * uv) / a
        + 2.0 * xy / yy * (xy * uy * vy / yy - uy * xv - xu * vy))


def fundamental_tensor_orthonormal(metric, Y, U, V) -> float:
    """Published reduction of g_Y(U, V) for <Y,Y> = 1 and <U,Y> = 0."""
    ip = metric.structure.inner
    X = metric.X
    b = ip(X, Y)
    xu, xv, vy, uv = ip(X, U), ip(X, V), ip(V, Y), ip(U, V)
    if metric.family is Family.INFINITE_SERIES:
        if abs(b - 1.0) <= POLE_EPS:
            raise PoleError("<X,Y> = 1", s_value=b, factor="<X,Y> - 1")
        return b**2 / (b - 1.0) ** 4 * (b**2 * xu * (xv + vy) + 2.0 * xv * xu
                                        - 4.0 * b * xu * vy + b**2 * uv * (b - 1.0))
    return math.exp(2.0 * b) * (uv + 2.0 * xu * xv + xu * vy - b * uv - 2.0 * b * xu * vy)


def flag_gram_literal(family, b, xu):
    """Published (g_Y(Y,Y), g_Y(Y,U), g_Y(U,U)) for an orthonormal flag.

    ``b`` is <X, Y> and ``xu`` is <X, U>.
    """
    family = Family.parse(family)
    if family is Family.INFINITE_SERIES:
        d = (b - 1.0) ** 4
        return (b**4 / d * (b**2 + 2.0 * b - 3.0),
                b**3 / d * (b**2 * xu + b * xu - 2.0 * xu),
                b**2 / d * (xu**2 * b**2 + 2.0 * xu**2 - b**2 + b**3))
    e = math.exp(2.0 * b)
    return e * (1.0 + 4.0 * b**2), e * xu, e * (1.0 + 2.0 * xu**2 - b)


def flag_determinant_literal(family, b, xu) -> float:
    """Published g_Y(Y,Y) g_Y(U,U) - g_Y(Y,U)^2 for an orthonormal flag."""
    family = Family.parse(family)
    if family is Family.INFINITE_SERIES:
        return b**6 / (b - 1.0) ** 8 * (b**5 + b**4 - 5.0 * b**3 + 3.0 * b**2
                                         + 2.0 * b**2 * xu**2 + 8.0 * b * xu**2 - 10.0 * xu**2)
    return math.exp(4.0 * b) * ((1.0 - b) * (1.0 + 4.0 * b**2) + xu**2 * (1.0 + 8.0 * b**2))


def cartan_tensor_numeric(metric, Y, Z, U, V, step=None, method="stencil") -> float:
    """C_Y(Z, U, V) = 1/2 d/dt g_{Y+tV}(Z, U) at t = 0.

    ``method="stencil"`` differences 1/2 F^2 on a 2x2x2 cube (third mixed
    derivative) with Ridders extrapolation; ``method="nested"`` differences
    the numeric fundamental tensor along V, which treats V differently from Z
    and U and so gives an independent route for symmetry checks.
    """
    Y = np.asarray(Y, dtype=float)
    a, b = metric.alpha_beta(Y)
    if a == 0:
        raise UndefinedInputError("Cartan tensor undefined at Y = 0")
    z, nz = _unit(metric, Z)
    u, nu = _unit(metric, U)
    v, nv = _unit(metric, V)
    if nz == 0 or nu == 0 or nv == 0:
        return 0.0
    h = _default_step(metric, a, b, RIDDERS_STEP) if step is None else float(step)
    margin = max(POLE_EPS, 3.5 * h / a)

    if method == "nested":
        inner = _default_step(metric, a, b, NESTED_INNER_STEP)

        def dg(hh):
            gp = fundamental_tensor_numeric(metric, Y + hh * v, z, u, step=inner, method="fixed")
            gm = fundamental_tensor_numeric(metric, Y - hh * v, z, u, step=inner, method="fixed")
            return (gp - gm) / (2.0 * hh)
        d, _ = ridders(dg, h, levels=6)
        return float(0.5 * d * nz * nu * nv)
    if method != "stencil":
        raise ValueError(f"unknown method {method!r}")

    signs = np.array([(i, j, k) for i in (1, -1) for j in (1, -1) for k in (1, -1)], dtype=float)
    weights = signs.prod(axis=1)

    def third(hh):
        pts = Y + hh * (signs[:, :1] * z + signs[:, 1:2] * u + signs[:, 2:3] * v)
        G = _half_sq_batch(metric, pts, pole_margin=margin)
        return float(weights @ G) / (8.0 * hh**3)

    d, _ = ridders(third, h)
    return float(0.5 * d * nz * nu * nv)
