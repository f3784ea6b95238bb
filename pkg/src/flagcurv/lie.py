"""Lie algebra data: structure constants, the reductive split g = m + h and the
pair of inner products <<,>> (bi-invariant) and <,> = <<psi ., .>>.

Vectors are plain 1-D numpy arrays of coordinates in the chosen basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionError

STRUCTURAL_TOL = 1e-12
NUMERIC_TOL = 1e-10


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LieAlgebraSpec:
    """Structure constants plus a basis-adapted reductive split.

    ``structure`` is a sparse list of ``(i, j, k, c)`` meaning
    ``[e_i, e_j] = sum_k c e_k``.  A pair ``(j, i)`` that is never listed is
    filled in by antisymmetry; listing both orders keeps whatever was given so
    that bad data can be reported instead of silently repaired.
    """

    dim: int
    structure: tuple
    basis_labels: tuple = ()
    h_indices: tuple = ()
    constants: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.dim)
        if n <= 0:
            raise DimensionError("dimension must be a positive integer")
        labels = tuple(self.basis_labels) or tuple(f"e{i + 1}" for i in range(n))
        if len(labels) != n:
            raise DimensionError(f"expected {n} basis labels, got {len(labels)}")
        entries = tuple((int(i), int(j), int(k), float(c)) for i, j, k, c in self.structure)
        h = tuple(sorted(set(int(i) for i in self.h_indices)))
        for i, j, k, _ in entries:
            if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
                raise DimensionError(f"bracket index out of range: {(i, j, k)}")
        if any(not 0 <= i < n for i in h):
            raise DimensionError("h_indices out of range")

        C = np.zeros((n, n, n))
        listed = {(i, j) for i, j, _, _ in entries}
        for i, j, k, c in entries:
            C[i, j, k] += c
            if (j, i) not in listed and i != j:
                C[j, i, k] -= c
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "structure", entries)
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "h_indices", h)
        object.__setattr__(self, "constants", _frozen(C))

    @property
    def m_indices(self) -> tuple:
        h = set(self.h_indices)
        return tuple(i for i in range(self.dim) if i not in h)

    @property
    def m_mask(self) -> np.ndarray:
        mask = np.ones(self.dim, dtype=bool)
        mask[list(self.h_indices)] = False
        return mask

    def basis(self, index: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[index] = 1.0
        return e

    def label_index(self, label: str) -> int:
        try:
            return self.basis_labels.index(label)
        except ValueError:
            raise KeyError(f"unknown basis label {label!r}") from None

    def check_vector(self, v, name="vector") -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionError(f"{name} must have shape ({self.dim},), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DimensionError(f"{name} has non-finite entries")
        return v

    def bracket(self, a, b) -> np.ndarray:
        a = self.check_vector(a, "a")
        b = self.check_vector(b, "b")
        return np.einsum("i,j,ijk->k", a, b, self.constants)

    def project_m(self, v) -> np.ndarray:
        v = self.check_vector(v)
        return np.where(self.m_mask, v, 0.0)

    def project_h(self, v) -> np.ndarray:
        v = self.check_vector(v)
        return np.where(self.m_mask, 0.0, v)

    def bracket_m(self, a, b) -> np.ndarray:
        return self.project_m(self.bracket(a, b))

    def bracket_h(self, a, b) -> np.ndarray:
        return self.project_h(self.bracket(a, b))


class MetricStructure:
    """The bi-invariant product <<,>> and the metric endomorphism psi.

    The derived product is ``<Y, Z> = <<psi Y, Z>>`` whose Gram matrix is
    ``bi_inner @ psi``.  psi^-1 is applied through an LU factorisation.
    """

    def __init__(self, bi_inner, psi=None):
        B = np.array(bi_inner, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise DimensionError("bi_inner must be a square matrix")
        n = B.shape[0]
        P = np.eye(n) if psi is None else np.array(psi, dtype=float)
        if P.shape != (n, n):
            raise DimensionError(f"psi must be {n}x{n}")
        self.bi_inner = _frozen(B)
        self.psi = _frozen(P)
        self.gram = _frozen(B @ P)
        self._lu = scipy.linalg.lu_factor(P, check_finite=True)

    @property
    def dim(self) -> int:
        return self.bi_inner.shape[0]

    def __repr__(self):
        return f"MetricStructure(dim={self.dim})"

    def inner(self, a, b) -> float:
        return float(np.asarray(a) @ self.gram @ np.asarray(b))

    def bi_product(self, a, b) -> float:
        return float(np.asarray(a) @ self.bi_inner @ np.asarray(b))

    def norm(self, a) -> float:
        return float(np.sqrt(max(self.inner(a, a), 0.0)))

    def psi_apply(self, v) -> np.ndarray:
        return self.psi @ np.asarray(v, dtype=float)

    def psi_inverse_apply(self, v) -> np.ndarray:
        return scipy.linalg.lu_solve(self._lu, np.asarray(v, dtype=float))


@dataclass
class CheckItem:
    name: str
    passed: bool
    residual: float
    severity: str = "error"
    detail: str = ""
    worst: tuple | None = None

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "severity": self.severity,
            "detail": self.detail,
            "worst": list(self.worst) if self.worst is not None else None,
        }


@dataclass
class ValidationReport:
    items: list

    @property
    def errors(self):
        return [it for it in self.items if not it.passed and it.severity == "error"]

    @property
    def warnings(self):
        return [it for it in self.items if not it.passed and it.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def hypothesis_violated(self) -> bool:
        return bool(self.warnings)

    def get(self, name) -> CheckItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)

    def as_dict(self):
        return {
            "ok": self.ok,
            "hypothesis_violated": self.hypothesis_violated,
            "checks": [it.as_dict() for it in self.items],
        }


def _worst(residuals: np.ndarray):
    if residuals.size == 0:
        return 0.0, None
    idx = np.unravel_index(int(np.argmax(residuals)), residuals.shape)
    return float(residuals[idx]), tuple(int(i) for i in idx)


def _is_spd(M) -> bool:
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return False
    return True


def jacobi_tensor(C: np.ndarray) -> np.ndarray:
    """J[i,j,k] = [[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] (a vector)."""
    term = np.einsum("ijl,lkr->ijkr", C, C)
    return term + term.transpose(1, 2, 0, 3) + term.transpose(2, 0, 1, 3)


def validate_spec(spec: LieAlgebraSpec, ms: MetricStructure, X=None) -> ValidationReport:
    """Check every structural hypothesis; never raises on bad data."""
    n = spec.dim
    C = spec.constants
    cmax = float(np.max(np.abs(C))) if C.size else 0.0
    scale = cmax if cmax > 0 else 1.0
    h = list(spec.h_indices)
    m = list(spec.m_indices)
    items = []

    if ms.dim != n:
        items.append(CheckItem("dimension", False, float("inf"),
                               detail=f"algebra has dim {n}, metric has dim {ms.dim}"))
        return ValidationReport(items)

    res, where = _worst(np.abs(C + C.transpose(1, 0, 2)))
    items.append(CheckItem("antisymmetry", res <= STRUCTURAL_TOL * scale, res, worst=where))

    J = np.abs(jacobi_tensor(C))
    res, where = _worst(J.max(axis=3) if J.size else J)
    items.append(CheckItem("jacobi", res <= STRUCTURAL_TOL * scale * scale, res, worst=where,
                           detail="cyclic sum over basis triples (i, j, k)"))

    if h:
        sub = np.abs(C[np.ix_(h, h, m)]) if m else np.zeros(0)
        res, where = _worst(sub)
        if where is not None:
            where = (h[where[0]], h[where[1]], m[where[2]])
    else:
        res, where = 0.0, None
    items.append(CheckItem("h subalgebra", res <= STRUCTURAL_TOL * scale, res, worst=where,
                           detail="m-components of [h, h]"))

    if h and m:
        sub = np.abs(C[np.ix_(h, m, h)])
        res, where = _worst(sub)
        if where is not None:
            where = (h[where[0]], m[where[1]], h[where[2]])
    else:
        res, where = 0.0, None
    items.append(CheckItem("ad(h)-invariance of m", res <= STRUCTURAL_TOL * scale, res,
                           worst=where, detail="h-components of [h, m]"))

    B = ms.bi_inner
    res = float(np.max(np.abs(B - B.T)))
    items.append(CheckItem("bi_inner symmetry", res <= NUMERIC_TOL * max(1.0, np.max(np.abs(B))), res))
    eig_b = float(np.min(np.linalg.eigvalsh(0.5 * (B + B.T))))
    items.append(CheckItem("bi_inner positive-definite", _is_spd(0.5 * (B + B.T)) and eig_b > 0, eig_b,
                           detail="smallest eigenvalue"))

    if h and m:
        res = float(np.max(np.abs(B[np.ix_(h, m)])))
    else:
        res = 0.0
    items.append(CheckItem("m orthogonal to h", res <= NUMERIC_TOL, res,
                           detail="<<h, m>> block of bi_inner"))

    G = ms.gram
    res = float(np.max(np.abs(G - G.T)))
    items.append(CheckItem("psi self-adjoint", res <= NUMERIC_TOL * max(1.0, np.max(np.abs(G))), res,
                           detail="asymmetry of bi_inner @ psi"))
    eig_psi = np.linalg.eigvals(ms.psi)
    min_re = float(np.min(eig_psi.real))
    max_im = float(np.max(np.abs(eig_psi.imag)))
    items.append(CheckItem("psi positive-definite", min_re > 0 and max_im <= NUMERIC_TOL, min_re,
                           detail="smallest real part of the eigenvalues of psi"))
    Gs = 0.5 * (G + G.T)
    eig_g = float(np.min(np.linalg.eigvalsh(Gs)))
    items.append(CheckItem("inner positive-definite", _is_spd(Gs) and eig_g > 0, eig_g,
                           detail="smallest eigenvalue of the Gram matrix of <,>"))

    # <<[e_a, e_b], e_c>> + <<e_b, [e_a, e_c]>>
    BC = np.einsum("abk,kc->abc", C, B)
    bi_res = np.abs(BC + BC.transpose(0, 2, 1))
    res, where = _worst(bi_res)
    tol = NUMERIC_TOL * scale * max(1.0, float(np.max(np.abs(B))))
    items.append(CheckItem("bi-invariance", res <= tol, res, severity="warning", worst=where,
                           detail="compactness hypothesis behind the curvature formula"))

    if h:
        P = ms.psi
        res = float(np.max(np.abs(P[np.ix_(h, h)] - np.eye(len(h)))))
        if m:
            res_split = float(max(np.max(np.abs(P[np.ix_(h, m)])), np.max(np.abs(P[np.ix_(m, h)]))))
        else:
            res_split = 0.0
        items.append(CheckItem("psi h-block identity", res <= NUMERIC_TOL, res, severity="warning",
                               detail="<,> should agree with <<,>> on h"))
        items.append(CheckItem("psi preserves split", res_split <= NUMERIC_TOL, res_split,
                               severity="warning"))
        # Ad(h)-invariance of <,> restricted to m
        GC = np.einsum("abk,kc->abc", C, G)
        inv = np.abs(GC + GC.transpose(0, 2, 1))[np.ix_(h, m, m)]
        res, where = _worst(inv)
        if where is not None:
            where = (h[where[0]], m[where[1]], m[where[2]])
        items.append(CheckItem("ad(h)-invariance of <,>", res <= NUMERIC_TOL * scale * max(1.0, np.max(np.abs(G))),
                               res, severity="warning", worst=where))

    if X is not None:
        X = np.asarray(X, dtype=float)
        if X.shape != (n,) or not np.all(np.isfinite(X)):
            items.append(CheckItem("X shape", False, float("inf"), detail=f"X must be a finite {n}-vector"))
        else:
            res = float(np.max(np.abs(X[h]))) if h else 0.0
            items.append(CheckItem("X in m", res <= NUMERIC_TOL, res))
            if h:
                res = max(float(np.max(np.abs(spec.bracket(spec.basis(a), X)))) for a in h)
            else:
                res = 0.0
            items.append(CheckItem("X ad(h)-invariant", res <= NUMERIC_TOL * scale, res, severity="warning",
                                   detail="X must be fixed by Ad(H) to define an invariant vector field"))
    return ValidationReport(items)

