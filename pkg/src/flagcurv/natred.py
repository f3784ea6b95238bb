"""Naturally reductive checks (Riemannian and Finslerian), the parallel-X
(Berwald) hypothesis check and a harness comparing the two natural
reductivity verdicts space by space.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import DimensionError, PoleError, UndefinedInputError
from .lie import LieAlgebraSpec, MetricStructure
from .metrics import (AlphaBetaMetric, Family, cartan_tensor_numeric,
                      fundamental_tensor_numeric)

RIEMANNIAN_TOL = 1e-10
FINSLER_TOL = 1e-6
PARALLEL_TOL = 1e-10
BRACKET_TOL = 1e-8
DEFAULT_SAMPLES = 500


@dataclass
class CheckReport:
    name: str
    passed: bool
    max_residual: float
    tolerance: float
    worst: tuple | None = None
    samples: int = 0
    skipped: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def hypothesis_violated(self) -> bool:
        return not self.passed

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "worst": list(self.worst) if self.worst is not None else None,
            "samples": self.samples,
            "skipped": list(self.skipped),
            "details": dict(self.details),
        }


def _m_gram(algebra, ms):
    m = list(algebra.m_indices)
    G = ms.gram[np.ix_(m, m)]
    return m, 0.5 * (G + G.T)


def natred_check_riemannian(algebra: LieAlgebraSpec, ms: MetricStructure,
                            tol: float = RIEMANNIAN_TOL) -> CheckReport:
    """<[A,B]_m, C> + <B, [A,C]_m> over all basis triples (A, B, C) of m."""
    m = list(algebra.m_indices)
    C = algebra.constants
    G = ms.gram
    # T[a,b,c] = <[e_a, e_b]_m, e_c> restricted to m indices
    Cm = C[np.ix_(m, m, m)]
    T = np.einsum("abk,kc->abc", Cm, G[np.ix_(m, m)])
    res = np.abs(T + T.transpose(0, 2, 1))
    labels = algebra.basis_labels
    if res.size == 0:
        return CheckReport("natred-riemannian", True, 0.0, tol, samples=0)
    worst_val = float(res.max())
    a, b, c = np.unravel_index(int(np.argmax(res)), res.shape)
    worst = (labels[m[a]], labels[m[b]], labels[m[c]])
    return CheckReport("natred-riemannian", bool(worst_val <= tol), worst_val, tol,
                       worst=worst, samples=int(res.size))


def _unit_in_m(rng, algebra, ms, m):
    for _ in range(100):
        v = np.zeros(algebra.dim)
        v[m] = rng.normal(size=len(m))
        n = ms.norm(v)
        if n > 1e-8:
            return v / n
    raise RuntimeError("could not draw a nonzero vector in m")


def natred_check_finsler(metric: AlphaBetaMetric, algebra: LieAlgebraSpec,
                         ms: MetricStructure | None = None, sample_count: int = DEFAULT_SAMPLES,
                         seed: int = 0, tol: float = FINSLER_TOL) -> CheckReport:
    """Monte Carlo check of

        g_Y([W,U]_m, V) + g_Y(U, [W,V]_m) + 2 C_Y([W,Y]_m, U, V) = 0

    over random unit Y, W, U, V in m.  Sample i draws from
    ``default_rng([seed, i])`` so results do not depend on evaluation order.
    The residual is divided by max(1, largest term) so that the tolerance
    stays meaningful when F is large.
    """
    ms = metric.structure if ms is None else ms
    m = list(algebra.m_indices)
    brm = algebra.bracket_m
    worst_val, worst_idx = 0.0, None
    skipped = []
    used = 0
    for i in range(int(sample_count)):
        rng = np.random.default_rng([int(seed), i])
        Y, W, U, V = (_unit_in_m(rng, algebra, ms, m) for _ in range(4))
        try:
            t1 = fundamental_tensor_numeric(metric, Y, brm(W, U), V)
            t2 = fundamental_tensor_numeric(metric, Y, U, brm(W, V))
            t3 = 2.0 * cartan_tensor_numeric(metric, Y, brm(W, Y), U, V)
        except (PoleError, UndefinedInputError) as exc:
            skipped.append({"sample": i, "reason": str(exc)})
            continue
        used += 1
        r = abs(t1 + t2 + t3) / max(1.0, abs(t1), abs(t2), abs(t3))
        if r > worst_val or worst_idx is None:
            worst_val, worst_idx = r, i
    name = f"natred-finsler[{metric.family.value}]"
    return CheckReport(name, bool(worst_val <= tol) and used > 0, float(worst_val), tol,
                       worst=None if worst_idx is None else ("sample", worst_idx),
                       samples=used, skipped=skipped, details={"seed": int(seed)})


def levi_civita(algebra: LieAlgebraSpec, ms: MetricStructure, Y, Z) -> np.ndarray:
    """nabla_Y Z = 1/2 [Y,Z]_m + U(Y,Z) for the invariant metric on G/H,
    with 2 <U(Y,Z), W> = <[W,Y]_m, Z> + <Y, [W,Z]_m>."""
    m, Gm = _m_gram(algebra, ms)
    ip, brm = ms.inner, algebra.bracket_m
    rhs = np.array([0.5 * (ip(brm(algebra.basis(k), Y), Z) + ip(Y, brm(algebra.basis(k), Z)))
                    for k in m])
    Uvec = np.zeros(algebra.dim)
    Uvec[m] = np.linalg.solve(Gm, rhs)
    return 0.5 * brm(Y, Z) + Uvec


def _check_in_m(algebra, X):
    X = algebra.check_vector(X, "X")
    h = list(algebra.h_indices)
    if h and np.max(np.abs(X[h])) > 0:
        raise DimensionError("X must lie in m")
    return X


def parallel_X_check(algebra: LieAlgebraSpec, ms: MetricStructure, X,
                     tol: float = PARALLEL_TOL) -> CheckReport:
    """max over basis vectors e_k of m of ||nabla_{e_k} X||."""
    X = _check_in_m(algebra, X)
    worst_val, worst = 0.0, None
    for k in algebra.m_indices:
        r = ms.norm(levi_civita(algebra, ms, algebra.basis(k), X))
        if worst is None or r > worst_val:
            worst_val, worst = r, (algebra.basis_labels[k],)
    return CheckReport("parallel-X", bool(worst_val < tol), float(worst_val), tol, worst=worst,
                       samples=len(algebra.m_indices))


def berwald_bracket_residual(algebra: LieAlgebraSpec, ms: MetricStructure, X) -> float:
    """max |<X, [e_i, e_j]_m>| over basis pairs of m."""
    X = _check_in_m(algebra, X)
    m = list(algebra.m_indices)
    best = 0.0
    for i, j in product(m, repeat=2):
        best = max(best, abs(ms.inner(X, algebra.bracket_m(algebra.basis(i), algebra.basis(j)))))
    return best


@dataclass
class EquivalenceEntry:
    name: str
    family: Family
    riemannian: CheckReport
    finsler: CheckReport | None
    berwald: bool
    in_scope: bool
    agree: bool | None
    reason: str = ""

    @property
    def flagged(self) -> bool:
        return self.in_scope and self.agree is False

    def as_dict(self):
        return {
            "space": self.name,
            "family": self.family.value,
            "riemannian": self.riemannian.as_dict(),
            "finsler": None if self.finsler is None else self.finsler.as_dict(),
            "berwald": self.berwald,
            "in_scope": self.in_scope,
            "agree": self.agree,
            "flagged": self.flagged,
            "reason": self.reason,
        }


@dataclass
class EquivalenceReport:
    family: Family
    entries: list = field(default_factory=list)

    @property
    def flagged(self):
        return [e for e in self.entries if e.flagged]

    @property
    def all_agree(self) -> bool:
        return not self.flagged

    def as_dict(self):
        return {"family": self.family.value, "all_agree": self.all_agree,
                "entries": [e.as_dict() for e in self.entries]}


def _verdicts_agree(a: CheckReport, b: CheckReport) -> bool:
    if a.passed == b.passed:
        return True
    failing = b if a.passed else a
    return failing.max_residual < 10.0 * failing.tolerance


def theorem4_equivalence_harness(family, spaces, sample_count: int = DEFAULT_SAMPLES,
                                 seed: int = 0) -> EquivalenceReport:
    """Run both natural reductivity checks on each space.

    ``spaces`` holds objects exposing ``name``, ``algebra``, ``structure``,
    ``X`` and ``berwald`` (an explicit assertion or None).  The comparison
    is only meaningful for Berwald metrics, so spaces whose X is not
    parallel are reported as out of scope instead of being flagged.
    """
    family = Family.parse(family)
    report = EquivalenceReport(family)
    for sp in spaces:
        riem = natred_check_riemannian(sp.algebra, sp.structure)
        X = np.asarray(sp.X, dtype=float)
        asserted = getattr(sp, "berwald", None)
        berwald = bool(asserted) if asserted is not None else parallel_X_check(sp.algebra, sp.structure, X).passed
        if family is Family.INFINITE_SERIES and not np.any(X):
            report.entries.append(EquivalenceEntry(sp.name, family, riem, None, berwald, False, None,
                                                   "infinite-series metric requires X != 0"))
            continue
        metric = AlphaBetaMetric(family, X, sp.structure)
        fin = natred_check_finsler(metric, sp.algebra, sp.structure, sample_count, seed)
        reason = "" if berwald else "X is not parallel, metric is not of Berwald type"
        report.entries.append(EquivalenceEntry(sp.name, family, riem, fin, berwald, berwald,
                                               _verdicts_agree(riem, fin), reason))
    return report
