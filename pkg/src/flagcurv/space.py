"""JSON space descriptors: parsing, validation, serialisation and the
bundled example spaces."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (DimensionError, SpaceIOError, SpaceParseError, SpaceValidationError,
                     UndefinedInputError)
from .lie import LieAlgebraSpec, MetricStructure, ValidationReport, validate_spec
from .metrics import AlphaBetaMetric, Family

REQUIRED = ("dimension", "basis", "brackets", "bi_inner", "h_indices", "X", "metric")
OPTIONAL = ("psi", "assertions")
BUNDLED = ("abelian_r3", "su2_biinvariant", "su2_berger", "sphere_s2", "u2_central")


@dataclass(frozen=True)
class SpaceDescriptor:
    name: str
    dimension: int
    basis: tuple
    brackets: tuple
    bi_inner: tuple
    psi: tuple | None
    h_indices: tuple
    X: tuple
    family: Family
    berwald: bool | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def algebra(self) -> LieAlgebraSpec:
        if "algebra" not in self._cache:
            self._cache["algebra"] = LieAlgebraSpec(self.dimension, self.brackets, self.basis,
                                                    self.h_indices)
        return self._cache["algebra"]

    @property
    def structure(self) -> MetricStructure:
        if "structure" not in self._cache:
            psi = None if self.psi is None else np.array(self.psi)
            self._cache["structure"] = MetricStructure(np.array(self.bi_inner), psi)
        return self._cache["structure"]

    @property
    def X_vector(self) -> np.ndarray:
        return np.array(self.X, dtype=float)

    def metric(self, family=None, X=None) -> AlphaBetaMetric:
        fam = self.family if family is None else Family.parse(family)
        return AlphaBetaMetric(fam, self.X_vector if X is None else np.asarray(X, float), self.structure)

    def validate(self) -> ValidationReport:
        return validate_spec(self.algebra, self.structure, self.X_vector)

    def with_psi(self, psi, name=None) -> "SpaceDescriptor":
        rows = tuple(tuple(float(x) for x in r) for r in np.asarray(psi, dtype=float))
        return replace(self, psi=rows, name=name or self.name)

    def to_dict(self) -> dict:
        out = {
            "dimension": self.dimension,
            "basis": list(self.basis),
            "brackets": [[i, j, k, c] for i, j, k, c in self.brackets],
            "bi_inner": [list(r) for r in self.bi_inner],
        }
        if self.psi is not None:
            out["psi"] = [list(r) for r in self.psi]
        out["h_indices"] = list(self.h_indices)
        out["X"] = list(self.X)
        out["metric"] = {"family": self.family.value}
        if self.berwald is not None:
            out["assertions"] = {"berwald": self.berwald}
        return out


# --- number formatting -------------------------------------------------------

def fmt(x) -> str:
    """Decimal with 17 significant digits (round-trips every double)."""
    return format(float(x), ".17g")


def dumps(obj, indent: int | None = 2) -> str:
    """JSON with every float written by :func:`fmt`; non-finite floats become null."""
    def enc(o, level):
        pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
        end = "" if indent is None else "\n" + " " * (indent * level)
        sep = ","
        if o is None:
            return "null"
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return fmt(o) if math.isfinite(o) else "null"
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            colon = ": " if indent is not None else ":"
            items = [pad + json.dumps(str(k)) + colon + enc(v, level + 1) for k, v in o.items()]
            return "{" + sep.join(items) + end + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            if len(o) == 0:
                return "[]"
            if all(isinstance(v, (int, float, np.integer, np.floating))
                   and not isinstance(v, (bool, np.bool_)) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[" + sep.join(pad + enc(v, level + 1) for v in o) + end + "]"
        if hasattr(o, "as_dict"):
            return enc(o.as_dict(), level)
        if hasattr(o, "value"):
            return enc(o.value, level)
        raise TypeError(f"cannot serialise {type(o).__name__}")
    return enc(obj, 0)


# --- parsing -----------------------------------------------------------------

def _number(v, fld):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpaceParseError("expected a number", fld)
    if not math.isfinite(float(v)):
        raise SpaceParseError("numbers must be finite", fld)
    return float(v)


def _index(v, fld, n):
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpaceParseError("expected an integer index", fld)
    if not 0 <= v < n:
        raise SpaceParseError(f"index {v} out of range 0..{n - 1}", fld)
    return int(v)


def _matrix(v, fld, n):
    if not isinstance(v, list) or len(v) != n:
        raise SpaceParseError(f"expected {n} rows", fld)
    rows = []
    for i, r in enumerate(v):
        if not isinstance(r, list) or len(r) != n:
            raise SpaceParseError(f"row {i} must have {n} entries", fld)
        rows.append(tuple(_number(x, f"{fld}[{i}]") for x in r))
    return tuple(rows)


def space_from_dict(data, name: str = "space", validate: bool = True) -> SpaceDescriptor:
    if not isinstance(data, dict):
        raise SpaceParseError("descriptor must be a JSON object")
    unknown = sorted(set(data) - set(REQUIRED) - set(OPTIONAL))
    if unknown:
        raise SpaceParseError("unknown field(s): " + ", ".join(unknown), unknown[0])
    for key in REQUIRED:
        if key not in data:
            raise SpaceParseError("missing required field", key)

    n = data["dimension"]
    if isinstance(n, bool) or not isinstance(n, int) or n <= 0:
        raise SpaceParseError("must be a positive integer", "dimension")
    basis = data["basis"]
    if (not isinstance(basis, list) or len(basis) != n
            or not all(isinstance(b, str) and b for b in basis)):
        raise SpaceParseError(f"expected {n} non-empty string labels", "basis")
    if len(set(basis)) != n:
        raise SpaceParseError("labels must be distinct", "basis")

    if not isinstance(data["brackets"], list):
        raise SpaceParseError("expected a list of [i, j, k, value]", "brackets")
    brackets = []
    for t, q in enumerate(data["brackets"]):
        fld = f"brackets[{t}]"
        if not isinstance(q, list) or len(q) != 4:
            raise SpaceParseError("expected [i, j, k, value]", fld)
        brackets.append((_index(q[0], fld, n), _index(q[1], fld, n), _index(q[2], fld, n),
                         _number(q[3], fld)))

    bi_inner = _matrix(data["bi_inner"], "bi_inner", n)
    psi = _matrix(data["psi"], "psi", n) if "psi" in data else None

    h = data["h_indices"]
    if not isinstance(h, list):
        raise SpaceParseError("expected a list of indices", "h_indices")
    h = tuple(_index(i, "h_indices", n) for i in h)
    if len(set(h)) != len(h):
        raise SpaceParseError("duplicate index", "h_indices")

    X = data["X"]
    if not isinstance(X, list) or len(X) != n:
        raise SpaceParseError(f"expected {n} numbers", "X")
    X = tuple(_number(x, "X") for x in X)

    metric = data["metric"]
    if not isinstance(metric, dict) or set(metric) != {"family"}:
        raise SpaceParseError('expected {"family": ...}', "metric")
    try:
        family = Family(metric["family"])
    except (ValueError, TypeError):
        raise SpaceParseError('must be "infinite-series" or "exponential"', "metric.family") from None

    berwald = None
    if "assertions" in data:
        a = data["assertions"]
        if not isinstance(a, dict) or set(a) - {"berwald"}:
            raise SpaceParseError('only {"berwald": bool} is allowed', "assertions")
        if "berwald" in a:
            if not isinstance(a["berwald"], bool):
                raise SpaceParseError("must be true or false", "assertions.berwald")
            berwald = a["berwald"]

    desc = SpaceDescriptor(name, n, tuple(basis), tuple(brackets), bi_inner, psi, h, X, family, berwald)
    try:
        desc.algebra
        desc.structure
    except DimensionError as exc:
        raise SpaceParseError(str(exc)) from None
    if validate:
        report = desc.validate()
        if not report.ok:
            raise SpaceValidationError(report)
        if family is Family.INFINITE_SERIES and not any(X):
            raise SpaceParseError("infinite-series metric needs X != 0", "X")
    return desc


def parse_space(path, validate: bool = True) -> SpaceDescriptor:
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except OSError as exc:
        raise SpaceIOError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise SpaceParseError("file is not valid UTF-8") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpaceParseError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return space_from_dict(data, name=path.stem, validate=validate)


def serialize_space(desc: SpaceDescriptor) -> str:
    return dumps(desc.to_dict()) + "\n"


def write_space(desc: SpaceDescriptor, path):
    Path(path).write_text(serialize_space(desc), encoding="utf-8")


def bundled_names() -> tuple:
    return BUNDLED


def bundled_path(name: str):
    if name not in BUNDLED:
        raise SpaceIOError(f"no bundled space named {name!r}")
    return resources.files("flagcurv") / "fixtures" / f"{name}.json"


def bundled_space(name: str) -> SpaceDescriptor:
    ref = bundled_path(name)
    data = json.loads(ref.read_text(encoding="utf-8"))
    return space_from_dict(data, name=name)


def load_space(spec: str) -> SpaceDescriptor:
    """A file path, or the name of a bundled space."""
    p = Path(spec)
    if p.exists() or p.suffix == ".json" and p.stem not in BUNDLED:
        return parse_space(p)
    key = p.stem if p.suffix == ".json" else spec
    if key in BUNDLED:
        return bundled_space(key)
    raise SpaceIOError(f"{spec}: no such file or bundled space")


def perturbed_space(desc: SpaceDescriptor, rng, scale: float = 0.3, name=None) -> SpaceDescriptor:
    """Random self-adjoint perturbation of psi on m that keeps the data valid.

    Only available for H = {e}.  The perturbation annihilates X (and is
    self-adjoint for <<,>>), so the block of psi along X is left alone.
    """
    if desc.h_indices:
        raise UndefinedInputError("perturbations are only generated for H = {e}")
    n = desc.dimension
    B = np.array(desc.bi_inner)
    P = np.eye(n) if desc.psi is None else np.array(desc.psi)
    X = desc.X_vector
    # projector onto the <<,>>-orthogonal complement of X
    Q = np.eye(n)
    if np.any(X):
        Q = Q - np.outer(X, X @ B) / float(X @ B @ X)
    for _ in range(100):
        A = rng.normal(size=(n, n))
        S = Q.T @ (A + A.T) @ Q
        dP = scale * np.linalg.solve(B, S) / max(1.0, float(np.max(np.abs(S))))
        newP = P + dP
        G = B @ newP
        if np.min(np.linalg.eigvalsh(0.5 * (G + G.T))) > 1e-3:
            return desc.with_psi(newP, name=name or f"{desc.name}~perturbed")
    raise UndefinedInputError("could not find a positive perturbation")
