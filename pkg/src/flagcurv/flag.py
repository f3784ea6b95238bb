"""Flag curvature K(P, Y) of the two (alpha, beta)-metric families on G/H.

Every closed form is reported next to an independent oracle, the quotient

    K = g_Y(U, R(U,Y)Y) / (g_Y(Y,Y) g_Y(U,U) - g_Y(Y,U)^2)

with g_Y obtained by finite differences of 1/2 F^2 and R(U,Y)Y from the
Puettmann tensor.  Closed forms come in two flavours:

* ``form="literal"``: the published expressions, transcribed as printed.
* ``form="corrected"``: the same quotient with g_Y rebuilt from the rho
  coefficients of the (alpha, beta) fundamental tensor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .curvature import (Convention, CurvatureContext, component_u_ruyy, component_x_ruyy,
                        component_y_ruyy, curvature_vector, natred_curvature_ruyy)
from .errors import (DegenerateFlagError, DegenerateMetricError, HypothesisError, PoleError,
                     UndefinedInputError)
from .lie import MetricStructure
from .metrics import (AlphaBetaMetric, Family, finsler_norm, flag_determinant_literal,
                      flag_gram_literal, fundamental_tensor_numeric, fundamental_tensor_orthonormal,
                      profile, shen_criterion)
from .natred import natred_check_riemannian, parallel_X_check

FLAG_TOL = 1e-12
AGREEMENT_TOL = 1e-6
# <X,Y> this close to 0 or 1 is refused by the infinite-series closed forms
POLE_BAND = 1e-8
FORMS = ("literal", "corrected")


@dataclass(frozen=True)
class Flag:
    U: np.ndarray
    Y: np.ndarray

    def as_dict(self):
        return {"U": [float(x) for x in self.U], "Y": [float(x) for x in self.Y]}


def orthonormalize_flag(U_raw, Y_raw, ms: MetricStructure) -> Flag:
    """Gram-Schmidt with respect to <,>: Y is normalised first, then U is
    made orthogonal to Y and normalised."""
    U = np.asarray(U_raw, dtype=float)
    Y = np.asarray(Y_raw, dtype=float)
    if U.shape != Y.shape or U.shape != (ms.dim,):
        raise DegenerateFlagError(f"flag vectors must have shape ({ms.dim},)")
    ny = ms.norm(Y)
    if ny == 0 or not math.isfinite(ny):
        raise DegenerateFlagError("Y must be a nonzero finite vector")
    Y = Y / ny
    nu0 = ms.norm(U)
    U = U - ms.inner(U, Y) * Y
    nu = ms.norm(U)
    if nu0 == 0 or nu <= 1e-12 * nu0:
        raise DegenerateFlagError("U and Y are linearly dependent")
    U = U / nu
    # one re-orthogonalisation pass keeps <U,Y> at rounding level
    U = U - ms.inner(U, Y) * Y
    U = U / ms.norm(U)
    U.setflags(write=False)
    Y.setflags(write=False)
    return Flag(U, Y)


def check_flag(flag: Flag, ms: MetricStructure, tol: float = FLAG_TOL):
    ip = ms.inner
    for name, val, want in (("<Y,Y>", ip(flag.Y, flag.Y), 1.0), ("<U,U>", ip(flag.U, flag.U), 1.0),
                            ("<U,Y>", ip(flag.U, flag.Y), 0.0)):
        if abs(val - want) > tol:
            raise DegenerateFlagError(f"flag is not orthonormal: {name} = {val!r}")


def random_flag(algebra, ms, rng, metric: AlphaBetaMetric | None = None,
                pole_margin: float = 0.05, max_tries: int = 1000) -> Flag:
    """Random orthonormal flag in m, kept away from the singular values of
    <X,Y> for the infinite-series family."""
    m = list(algebra.m_indices)
    if len(m) < 2:
        raise DegenerateFlagError("m must be at least two-dimensional")
    for _ in range(max_tries):
        U = np.zeros(algebra.dim)
        Y = np.zeros(algebra.dim)
        U[m] = rng.normal(size=len(m))
        Y[m] = rng.normal(size=len(m))
        try:
            flag = orthonormalize_flag(U, Y, ms)
        except DegenerateFlagError:
            continue
        if metric is not None and metric.family is Family.INFINITE_SERIES:
            b = ms.inner(metric.X, flag.Y)
            if abs(b) < pole_margin or abs(b - 1.0) < pole_margin:
                continue
        return flag
    raise DegenerateFlagError("could not draw an admissible flag")


# --- oracle -----------------------------------------------------------------

def _oracle_step(metric, Y):
    # F^2 is quadratic when X = 0 (exponential family), so a wide step is exact
    if metric.family is Family.EXPONENTIAL and not np.any(metric.X):
        return 0.25 * metric.structure.norm(Y)
    return None


def oracle_terms(metric: AlphaBetaMetric, ctx: CurvatureContext, flag: Flag) -> dict:
    """Numeric pieces of the flag-curvature quotient."""
    U, Y = flag.U, flag.Y
    W = curvature_vector(ctx, U, Y)
    h = _oracle_step(metric, Y)
    g = lambda a, b: fundamental_tensor_numeric(metric, Y, a, b, step=h)
    gyy, gyu, guu = g(Y, Y), g(Y, U), g(U, U)
    ip = metric.structure.inner
    return {
        "g_Y(Y,Y)": gyy,
        "g_Y(Y,U)": gyu,
        "g_Y(U,U)": guu,
        "denominator": gyy * guu - gyu * gyu,
        "numerator": g(U, W),
        "<X,R(U,Y)Y>": ip(metric.X, W),
        "<U,R(U,Y)Y>": ip(U, W),
    }


def _quotient(num, den, scale=1.0):
    if den == 0 or abs(den) <= 1e-14 * max(scale, 1e-300):
        raise DegenerateMetricError("flag-curvature denominator vanishes")
    return num / den


def flag_curvature_oracle(metric: AlphaBetaMetric, ctx: CurvatureContext, flag: Flag) -> float:
    t = oracle_terms(metric, ctx, flag)
    scale = abs(t["g_Y(Y,Y)"] * t["g_Y(U,U)"]) + t["g_Y(Y,U)"] ** 2
    return _quotient(t["numerator"], t["denominator"], scale)


# --- closed forms -----------------------------------------------------------

def _check_inf_band(b):
    if abs(b) < POLE_BAND:
        raise PoleError("<X,Y> = 0: prefactor ((<X,Y>-1)/<X,Y>)^4 is singular", s_value=b, factor="<X,Y>")
    if abs(b - 1.0) < POLE_BAND:
        raise PoleError("<X,Y> = 1: closed form is singular", s_value=b, factor="<X,Y> - 1")


def quotient_literal(family, b, xu, xr, ur, yr=0.0) -> dict:
    """Published K(P,Y) quotient for an orthonormal flag, with its pieces.

    ``b = <X,Y>``, ``xu = <X,U>``, ``xr = <X,R(U,Y)Y>``, ``ur = <U,R(U,Y)Y>``,
    ``yr = <Y,R(U,Y)Y>`` (only used by the numerator identity).
    """
    family = Family.parse(family)
    if family is Family.INFINITE_SERIES:
        _check_inf_band(b)
    gyy, gyu, guu = flag_gram_literal(family, b, xu)
    if family is Family.INFINITE_SERIES:
        num = b**2 / (b - 1.0) ** 4 * (xr * xu * (b**2 + 2.0)
                                       + yr * b * xu * (b - 4.0)
                                       + ur * b**2 * (b - 1.0))
        top = xr * xu * (b**2 + 2.0) + ur * b**2 * (b - 1.0)
        bottom = b**2 * (b**3 + b**2 - 5.0 * b + 3.0) + 2.0 * xu**2 * (b**2 + 4.0 * b - 5.0)
        K = ((b - 1.0) / b) ** 4 * _quotient(top, bottom, b**2 + xu**2)
    else:
        e = math.exp(2.0 * b)
        num = e * (2.0 * xr * xu + yr * xu * (1.0 - 2.0 * b) + ur * (1.0 - b))
        bottom = (1.0 - b) * (1.0 + 4.0 * b**2) + xu**2 * (1.0 + 8.0 * b**2)
        K = _quotient(2.0 * xr * xu + ur * (1.0 - b), e * bottom, e)
    return {"g_Y(Y,Y)": gyy, "g_Y(Y,U)": gyu, "g_Y(U,U)": guu,
            "denominator": flag_determinant_literal(family, b, xu), "numerator": num, "K": K}


def quotient_corrected(family, b, xu, xr, ur, yr=0.0) -> dict:
    """K(P,Y) for an orthonormal flag with g_Y from the rho coefficients."""
    family = Family.parse(family)
    if family is Family.INFINITE_SERIES:
        _check_inf_band(b)
    rho, rho0, rho1, rho2 = profile(family).rho_coefficients(b)
    gyy = rho + rho0 * b * b + 2.0 * rho1 * b + rho2
    gyu = (rho0 * b + rho1) * xu
    guu = rho + rho0 * xu * xu
    den = gyy * guu - gyu * gyu
    num = rho * ur + rho0 * xu * xr + rho1 * xu * yr
    K = _quotient(num, den, abs(gyy * guu) + gyu * gyu)
    return {"g_Y(Y,Y)": gyy, "g_Y(Y,U)": gyu, "g_Y(U,U)": guu,
            "denominator": den, "numerator": num, "K": K}


def natred_components(ctx: CurvatureContext, metric: AlphaBetaMetric, flag: Flag):
    """(<X,R>, <U,R>) with R(U,Y)Y from the nested-bracket shortcut."""
    R = natred_curvature_ruyy(ctx, flag.U, flag.Y)
    ip = metric.structure.inner
    return ip(metric.X, R), ip(flag.U, R)


def quotient_natred_literal(family, b, xu, ctx, metric, flag) -> float:
    """Published naturally reductive K, keeping the printed split into the
    [.,.]_m and [.,.]_h pieces and their coefficients."""
    alg = ctx.algebra
    ip = metric.structure.inner
    U, Y, X = flag.U, flag.Y, metric.X
    uy = alg.bracket(U, Y)
    A = alg.bracket_m(Y, alg.project_m(uy))
    Bh = alg.bracket(Y, alg.project_h(uy))
    sgn = ctx.convention.sign
    xa, xb, ua, ub = (sgn * ip(X, A), sgn * ip(X, Bh), sgn * ip(U, A), sgn * ip(U, Bh))
    family = Family.parse(family)
    if family is Family.INFINITE_SERIES:
        _check_inf_band(b)
        top = ((0.25 * xa + xb) * xu * (b**2 + 2.0) + (0.25 * ua + ub) * b**2 * (b - 1.0))
        bottom = b**2 * (b**3 + b**2 - 5.0 * b + 3.0) + 2.0 * xu**2 * (b**2 + 4.0 * b - 5.0)
        return ((b - 1.0) / b) ** 4 * _quotient(top, bottom, b**2 + xu**2)
    e = math.exp(2.0 * b)
    top = (0.5 * xa + 2.0 * xb) * xu + (0.25 * ua + ub) * (1.0 - b)
    bottom = (1.0 - b) * (1.0 + 4.0 * b**2) + xu**2 * (1.0 + 8.0 * b**2)
    return _quotient(top, e * bottom, e)


def quotient_corollary_literal(family, b, xu, ctx, metric, flag) -> float:
    """Published H = {e} corollary: full double brackets, denominator times 4."""
    alg = ctx.algebra
    ip = metric.structure.inner
    U, Y, X = flag.U, flag.Y, metric.X
    sgn = ctx.convention.sign
    family = Family.parse(family)
    if family is Family.INFINITE_SERIES:
        _check_inf_band(b)
        A = alg.bracket(Y, alg.bracket(U, Y))
        xa, ua = sgn * ip(X, A), sgn * ip(U, A)
        top = xa * xu * (b**2 + 2.0) + ua * b**2 * (b - 1.0)
        bottom = b**2 * (b**3 + b**2 - 5.0 * b + 3.0) + 2.0 * xu**2 * (b**2 + 4.0 * b - 5.0)
        return ((b - 1.0) / b) ** 4 * _quotient(top, 4.0 * bottom, b**2 + xu**2)
    A = alg.bracket_m(Y, alg.bracket_m(U, Y))
    xa, ua = sgn * ip(X, A), sgn * ip(U, A)
    e = math.exp(2.0 * b)
    top = 2.0 * xa * xu + ua * (1.0 - b)
    bottom = (1.0 - b) * (1.0 + 4.0 * b**2) + xu**2 * (1.0 + 8.0 * b**2)
    return _quotient(top, 4.0 * e * bottom, e)


# --- reports ----------------------------------------------------------------

@dataclass
class TermComparison:
    name: str
    closed: float
    oracle: float
    scale: float = 0.0  # natural size of the term, for entries that can vanish

    @property
    def abs_diff(self) -> float:
        return abs(self.closed - self.oracle)

    @property
    def rel_diff(self) -> float:
        return self.abs_diff / max(abs(self.oracle), self.scale, 1e-12)

    def as_dict(self):
        return {"term": self.name, "closed": self.closed, "oracle": self.oracle,
                "rel_diff": self.rel_diff}


@dataclass
class CurvatureReport:
    formula: str
    form: str
    family: Family
    closed_form: float
    oracle: float
    convention: Convention
    domain_stamp: dict
    ledger_notes: list = field(default_factory=list)
    terms: list = field(default_factory=list)
    inputs: dict = field(default_factory=dict)
    berwald: bool | None = None
    hypothesis_violated: bool = False
    tolerance: float = AGREEMENT_TOL
    sample_index: int | None = None
    seed: int | None = None

    @property
    def abs_diff(self) -> float:
        return abs(self.closed_form - self.oracle)

    @property
    def rel_diff(self) -> float:
        return self.abs_diff / max(abs(self.oracle), 1e-300)

    @property
    def agrees(self) -> bool:
        """Agreement at ``tolerance`` with a 1e-12 floor on the oracle scale."""
        return self.abs_diff / max(abs(self.oracle), 1e-12) < self.tolerance

    def failing_terms(self):
        return [t for t in self.terms if t.rel_diff >= self.tolerance]

    def as_dict(self):
        return {
            "formula": self.formula,
            "form": self.form,
            "family": self.family.value,
            "convention": self.convention.value,
            "closed_form": self.closed_form,
            "oracle": self.oracle,
            "abs_diff": self.abs_diff,
            "rel_diff": self.rel_diff,
            "agrees": self.agrees,
            "domain_stamp": dict(self.domain_stamp),
            "berwald": self.berwald,
            "hypothesis_violated": self.hypothesis_violated,
            "ledger_notes": list(self.ledger_notes),
            "terms": [t.as_dict() for t in self.terms],
            "inputs": self.inputs,
            "sample_index": self.sample_index,
            "seed": self.seed,
        }


@lru_cache(maxsize=256)
def _shen_ok(family: Family, b: float) -> bool:
    return shen_criterion(profile(family), b, 1001).passed


def domain_stamp(metric: AlphaBetaMetric, Y) -> dict:
    try:
        F = finsler_norm(metric, Y)
        positive = bool(F > 0)
    except (PoleError, UndefinedInputError):
        positive = False
    return {"F_positive": positive,
            "shen_ok": _shen_ok(metric.family, round(metric.b, 12)),
            "norm_bound_ok": metric.norm_bound_flag}


def _prepare(metric, ctx, flag, family):
    if metric.family is not family:
        raise ValueError(f"expected a {family.value} metric, got {metric.family.value}")
    if metric.structure is not ctx.structure and not np.array_equal(metric.structure.gram, ctx.structure.gram):
        raise ValueError("metric and context use different inner products")
    check_flag(flag, metric.structure)
    ip = metric.structure.inner
    return ip(metric.X, flag.Y), ip(metric.X, flag.U)


def _base_report(formula, form, metric, ctx, flag, closed, closed_terms):
    notes = []
    try:
        o = oracle_terms(metric, ctx, flag)
        scale = abs(o["g_Y(Y,Y)"] * o["g_Y(U,U)"]) + o["g_Y(Y,U)"] ** 2
        oracle = _quotient(o["numerator"], o["denominator"], scale)
    except (PoleError, DegenerateMetricError) as exc:
        o, oracle = {}, float("nan")
        notes.append(f"oracle unavailable: {exc}")
    scales = {}
    if o:
        gg = abs(o["g_Y(Y,Y)"] * o["g_Y(U,U)"])
        scales = {"g_Y(Y,U)": math.sqrt(gg), "denominator": gg + o["g_Y(Y,U)"] ** 2}
    terms = [TermComparison(k, float(closed_terms[k]), float(o[k]), scales.get(k, 0.0))
             for k in closed_terms if k in o]
    berwald = parallel_X_check(ctx.algebra, ctx.structure, metric.X).passed
    if not berwald:
        notes.append("X is not parallel: Berwald hypothesis not met")
    if ctx.hypothesis_violated:
        notes.append("hypothesis violated: " + ", ".join(w.name for w in ctx.validation.warnings))
    if ctx.convention is Convention.LITERAL:
        notes.append("literal convention: values are negatives of the standard-convention values")
    stamp = domain_stamp(metric, flag.Y)
    if not stamp["norm_bound_ok"]:
        notes.append("|X| >= 1: outside the theorem's norm bound")
    return CurvatureReport(
        formula=formula, form=form, family=metric.family, closed_form=float(closed),
        oracle=float(oracle), convention=ctx.convention, domain_stamp=stamp,
        ledger_notes=notes, terms=terms,
        inputs={"U": [float(x) for x in flag.U], "Y": [float(x) for x in flag.Y],
                "X": [float(x) for x in metric.X]},
        berwald=berwald, hypothesis_violated=ctx.hypothesis_violated)


def _theorem(metric, ctx, flag, form, family, formula):
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    b, xu = _prepare(metric, ctx, flag, family)
    xr = component_x_ruyy(ctx, metric.X, flag.U, flag.Y)
    ur = component_u_ruyy(ctx, flag.U, flag.Y)
    yr = component_y_ruyy(ctx, flag.U, flag.Y)
    q = (quotient_literal if form == "literal" else quotient_corrected)(family, b, xu, xr, ur, yr)
    closed_terms = dict(q)
    K = closed_terms.pop("K")
    closed_terms["<X,R(U,Y)Y>"] = xr
    closed_terms["<U,R(U,Y)Y>"] = ur
    rep = _base_report(formula, form, metric, ctx, flag, K, closed_terms)
    rep.terms.append(TermComparison("K", rep.closed_form, rep.oracle))
    if form == "literal":
        # the printed numerator should be the orthonormal g_Y reduction at V = R(U,Y)Y
        W = curvature_vector(ctx, flag.U, flag.Y)
        reduced = fundamental_tensor_orthonormal(metric, flag.Y, flag.U, W)
        rep.inputs["numerator_vs_orthonormal_reduction"] = TermComparison(
            "numerator", float(q["numerator"]), float(reduced)).rel_diff
    return rep


def flag_curvature_infinite(metric, ctx, flag, form="literal") -> CurvatureReport:
    return _theorem(metric, ctx, flag, form, Family.INFINITE_SERIES, "theorem-infinite")


def flag_curvature_exponential(metric, ctx, flag, form="literal") -> CurvatureReport:
    return _theorem(metric, ctx, flag, form, Family.EXPONENTIAL, "theorem-exponential")


def _require_natred(ctx, override, notes):
    chk = natred_check_riemannian(ctx.algebra, ctx.structure)
    if not chk.passed:
        if not override:
            raise HypothesisError(f"space is not naturally reductive (residual {chk.max_residual:.3g})")
        notes.append(f"override: space is not naturally reductive (residual {chk.max_residual:.3g})")


def _natred(metric, ctx, flag, form, family, override, corollary):
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    b, xu = _prepare(metric, ctx, flag, family)
    notes = []
    _require_natred(ctx, override, notes)
    if corollary:
        if ctx.algebra.h_indices or not np.allclose(ctx.structure.psi, np.eye(ctx.structure.dim)):
            if not override:
                raise HypothesisError("corollary needs H = {e} and a bi-invariant metric (psi = I)")
            notes.append("override: corollary applied without H = {e} and psi = I")
    xr, ur = natred_components(ctx, metric, flag)
    if form == "literal":
        fn = quotient_corollary_literal if corollary else quotient_natred_literal
        K = fn(family, b, xu, ctx, metric, flag)
        closed_terms = {}
    else:
        q = quotient_corrected(family, b, xu, xr, ur, 0.0)
        K = q.pop("K")
        closed_terms = q
    closed_terms["<X,R(U,Y)Y>"] = xr
    closed_terms["<U,R(U,Y)Y>"] = ur
    name = ("corollary-" if corollary else "natred-") + ("infinite" if family is Family.INFINITE_SERIES
                                                        else "exponential")
    rep = _base_report(name, form, metric, ctx, flag, K, closed_terms)
    rep.ledger_notes[:0] = notes
    rep.terms.append(TermComparison("K", rep.closed_form, rep.oracle))
    theorem = _theorem(metric, ctx, flag, form, family, "")
    rep.inputs["theorem_closed_form"] = theorem.closed_form
    return rep


def flag_curvature_natred_infinite(metric, ctx, flag, form="literal", override=False):
    return _natred(metric, ctx, flag, form, Family.INFINITE_SERIES, override, False)


def flag_curvature_natred_exponential(metric, ctx, flag, form="literal", override=False):
    return _natred(metric, ctx, flag, form, Family.EXPONENTIAL, override, False)


def flag_curvature_corollary_infinite(metric, ctx, flag, form="literal", override=False):
    return _natred(metric, ctx, flag, form, Family.INFINITE_SERIES, override, True)


def flag_curvature_corollary_exponential(metric, ctx, flag, form="literal", override=False):
    return _natred(metric, ctx, flag, form, Family.EXPONENTIAL, override, True)


THEOREMS = {
    "theorem": (flag_curvature_infinite, flag_curvature_exponential),
    "natred": (flag_curvature_natred_infinite, flag_curvature_natred_exponential),
    "corollary": (flag_curvature_corollary_infinite, flag_curvature_corollary_exponential),
}


def flag_curvature_closed(metric, ctx, flag, theorem="theorem", form="literal", **kw) -> CurvatureReport:
    try:
        pair = THEOREMS[theorem]
    except KeyError:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {sorted(THEOREMS)}") from None
    fn = pair[0] if metric.family is Family.INFINITE_SERIES else pair[1]
    return fn(metric, ctx, flag, form=form, **kw)


# --- ledger -----------------------------------------------------------------

@dataclass
class LedgerEntry:
    kind: str
    formula: str
    form: str
    term: str
    convention: str
    count: int
    worst_rel_diff: float
    reproduction: dict
    note: str = ""

    def sort_key(self):
        return (self.kind, self.formula, self.form, self.term, self.convention)

    def as_dict(self):
        return {"kind": self.kind, "formula": self.formula, "form": self.form, "term": self.term,
                "convention": self.convention, "count": self.count,
                "worst_rel_diff": self.worst_rel_diff, "reproduction": self.reproduction,
                "note": self.note}


@dataclass
class LedgerDocument:
    entries: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)
    report_count: int = 0
    tolerance: float = AGREEMENT_TOL

    @property
    def empty(self) -> bool:
        return not self.entries and not self.mismatches

    def entries_for(self, formula=None, term=None, kind=None):
        return [e for e in self.entries
                if (formula is None or e.formula == formula)
                and (term is None or e.term == term)
                and (kind is None or e.kind == kind)]

    def as_dict(self):
        return {"reports": self.report_count, "tolerance": self.tolerance,
                "entries": [e.as_dict() for e in self.entries],
                "mismatches": list(self.mismatches)}


def _reproduction(rep: CurvatureReport):
    return {"sample_index": rep.sample_index, "seed": rep.seed, "convention": rep.convention.value,
            "family": rep.family.value, **{k: rep.inputs[k] for k in ("U", "Y", "X")}}


def discrepancy_ledger(reports, tol: float | None = None) -> LedgerDocument:
    reports = list(reports)
    if not reports:
        raise ValueError("the ledger needs at least one report")
    tol = reports[0].tolerance if tol is None else float(tol)
    grouped = {}
    mismatches = []
    conventions = set()
    numerator_inconsistent = {}
    for idx, rep in enumerate(reports):
        if rep.convention is Convention.LITERAL:
            conventions.add((rep.formula, rep.form))
        key_idx = rep.sample_index if rep.sample_index is not None else idx
        failing = [t for t in rep.terms if t.rel_diff >= tol]
        if not (rep.abs_diff / max(abs(rep.oracle), 1e-12) < tol):
            mismatches.append({"formula": rep.formula, "form": rep.form,
                               "convention": rep.convention.value, "index": key_idx,
                               "closed_form": rep.closed_form, "oracle": rep.oracle,
                               "rel_diff": rep.rel_diff,
                               "failing_terms": [t.as_dict() for t in failing],
                               "reproduction": _reproduction(rep)})
        for t in failing:
            k = (rep.formula, rep.form, t.name, rep.convention.value)
            cur = grouped.get(k)
            # ties on the worst value go to the lowest index, whatever the input order
            if cur is None:
                grouped[k] = [1, t.rel_diff, rep, t, key_idx]
            else:
                cur[0] += 1
                if (t.rel_diff, -key_idx) > (cur[1], -cur[4]):
                    cur[1:] = [t.rel_diff, rep, t, key_idx]
        r = rep.inputs.get("numerator_vs_orthonormal_reduction")
        if r is not None and r >= tol:
            k = (rep.formula, rep.form)
            numerator_inconsistent[k] = max(numerator_inconsistent.get(k, 0.0), r)

    entries = []
    for (formula, form, term, conv), (count, worst, rep, t, _) in grouped.items():
        repro = _reproduction(rep)
        repro.update(closed=t.closed, oracle=t.oracle)
        entries.append(LedgerEntry("term-mismatch", formula, form, term, conv, count, worst, repro,
                                   f"{count} of the reports disagree with the oracle on this term"))
    for (formula, form), worst in numerator_inconsistent.items():
        entries.append(LedgerEntry("numerator-connectives", formula, form, "numerator", "", 0, worst, {},
                                   "summed reading of the numerator lines disagrees with the "
                                   "orthonormal g_Y reduction"))
    for formula, form in conventions:
        entries.append(LedgerEntry(
            "convention", formula, form, "", Convention.LITERAL.value, 0, 0.0, {},
            "literal slot pairing of the curvature formula: every curvature value is the "
            "negative of the standard convention (round su(2): -1/4 instead of +1/4)"))
    entries.sort(key=LedgerEntry.sort_key)
    mismatches.sort(key=lambda d: (d["formula"], d["form"], d["convention"], d["index"]))
    return LedgerDocument(entries, mismatches, len(reports), tol)


def with_sample(rep: CurvatureReport, index: int, seed: int | None) -> CurvatureReport:
    return replace(rep, sample_index=int(index), seed=seed)
