"""Curvature of an invariant metric <,> = <<psi ., .>> on a compact homogeneous
space G/H, evaluated with Puettmann's bracket formula.

Sign conventions
----------------
``Convention.LITERAL`` returns the formula exactly as it is usually printed,
which pairs the slots so that the round su(2) gives <U, R(U,Y)Y> = -1/4.
``Convention.STANDARD`` swaps the (Z, W) pairing, i.e. returns
<R(X,Y)Z, W> with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y], so sectional
curvatures come out with their textbook sign (+1/4 for round su(2)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import SpaceValidationError
from .lie import LieAlgebraSpec, MetricStructure, ValidationReport, validate_spec


class Convention(str, Enum):
    LITERAL = "literal"
    STANDARD = "standard"

    @property
    def sign(self) -> float:
        """Multiplier turning a STANDARD-convention value into this convention."""
        return -1.0 if self is Convention.LITERAL else 1.0


@dataclass(frozen=True)
class CurvatureContext:
    algebra: LieAlgebraSpec
    structure: MetricStructure
    convention: Convention = Convention.STANDARD
    validation: ValidationReport = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "convention", Convention(self.convention))
        report = validate_spec(self.algebra, self.structure)
        if not report.ok:
            raise SpaceValidationError(report)
        object.__setattr__(self, "validation", report)

    @property
    def hypothesis_violated(self) -> bool:
        return self.validation.hypothesis_violated

    def with_convention(self, convention) -> "CurvatureContext":
        return CurvatureContext(self.algebra, self.structure, Convention(convention))


def _ops(ctx):
    return ctx.algebra.bracket, ctx.structure.psi_apply, ctx.structure.psi_inverse_apply


def b_plus(ctx: CurvatureContext, a, b) -> np.ndarray:
    """B+(a, b) = 1/2 ([a, psi b] + [b, psi a]); symmetric."""
    br, psi, _ = _ops(ctx)
    return 0.5 * (br(a, psi(b)) + br(b, psi(a)))


def b_minus(ctx: CurvatureContext, a, b) -> np.ndarray:
    """B-(a, b) = 1/2 ([psi a, b] + [a, psi b]); skew-symmetric."""
    br, psi, _ = _ops(ctx)
    return 0.5 * (br(psi(a), b) + br(a, psi(b)))


def _puttmann_literal(ctx, X, Y, Z, W) -> float:
    alg, ms = ctx.algebra, ctx.structure
    br, brm = alg.bracket, alg.bracket_m
    bi, ip = ms.bi_product, ms.inner
    pinv = ms.psi_inverse_apply
    first = 0.5 * (bi(b_minus(ctx, X, Y), br(Z, W)) + bi(br(X, Y), b_minus(ctx, Z, W)))
    second = 0.25 * (ip(br(X, W), brm(Y, Z)) - ip(br(X, Z), brm(Y, W))
                     - 2.0 * ip(br(X, Y), brm(Z, W)))
    third = (bi(b_plus(ctx, X, W), pinv(b_plus(ctx, Y, Z)))
             - bi(b_plus(ctx, X, Z), pinv(b_plus(ctx, Y, W))))
    return first + second + third


def puttmann_curvature(ctx: CurvatureContext, X, Y, Z, W) -> float:
    if ctx.convention is Convention.LITERAL:
        return _puttmann_literal(ctx, X, Y, Z, W)
    return _puttmann_literal(ctx, X, Y, W, Z)


def component_x_ruyy(ctx: CurvatureContext, X, U, Y) -> float:
    """<X, R(U,Y)Y> from the expanded Puettmann expression (X, U, Y in m)."""
    alg, ms = ctx.algebra, ctx.structure
    br, brm = alg.bracket, alg.bracket_m
    bi, ip = ms.bi_product, ms.inner
    psi, pinv = ms.psi_apply, ms.psi_inverse_apply
    pU, pY, pX = psi(U), psi(Y), psi(X)
    val = (0.25 * (bi(br(pU, Y) + br(U, pY), br(Y, X)) + bi(br(U, Y), br(pY, X) + br(Y, pX)))
           + 0.75 * ip(br(Y, U), brm(Y, X))
           + 0.5 * bi(br(U, pX) + br(X, pU), pinv(br(Y, pY)))
           - 0.25 * bi(br(U, pY) + br(Y, pU), pinv(br(Y, pX) + br(X, pY))))
    return val if ctx.convention is Convention.LITERAL else -val


def component_u_ruyy(ctx: CurvatureContext, U, Y) -> float:
    """<U, R(U,Y)Y> from the expanded Puettmann expression."""
    alg, ms = ctx.algebra, ctx.structure
    br, brm = alg.bracket, alg.bracket_m
    bi, ip = ms.bi_product, ms.inner
    psi, pinv = ms.psi_apply, ms.psi_inverse_apply
    pU, pY = psi(U), psi(Y)
    val = (0.5 * bi(br(pU, Y) + br(U, pY), br(Y, U))
           + 0.75 * ip(br(Y, U), brm(Y, U))
           + bi(br(U, pU), pinv(br(Y, pY)))
           - 0.25 * bi(br(U, pY) + br(Y, pU), pinv(br(Y, pU) + br(U, pY))))
    return val if ctx.convention is Convention.LITERAL else -val


def component_y_ruyy(ctx: CurvatureContext, U, Y) -> float:
    """<Y, R(U,Y)Y>: the X-component expression evaluated at X = Y (vanishes)."""
    return component_x_ruyy(ctx, Y, U, Y)


def curvature_vector(ctx: CurvatureContext, U, Y) -> np.ndarray:
    """R(U,Y)Y as a vector of m, recovered from <e_k, R(U,Y)Y> on the m basis."""
    alg, ms = ctx.algebra, ctx.structure
    m = list(alg.m_indices)
    rhs = np.array([puttmann_curvature(ctx, U, Y, Y, alg.basis(k)) for k in m])
    G = ms.gram[np.ix_(m, m)]
    coeffs = np.linalg.solve(0.5 * (G + G.T), rhs)
    out = np.zeros(alg.dim)
    out[m] = coeffs
    return out


def natred_curvature_ruyy(ctx: CurvatureContext, U, Y) -> np.ndarray:
    """R(U,Y)Y = 1/4 [Y, [U,Y]_m]_m + [Y, [U,Y]_h] on a naturally reductive space.

    The expression carries the standard sign; LITERAL contexts get it negated
    so that it can be compared with :func:`puttmann_curvature` in that mode.
    """
    alg = ctx.algebra
    uy = alg.bracket(U, Y)
    vec = 0.25 * alg.bracket_m(Y, alg.project_m(uy)) + alg.bracket(Y, alg.project_h(uy))
    return ctx.convention.sign * vec
