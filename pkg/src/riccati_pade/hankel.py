"""Hankel determinants of the series coefficients, with energy derivatives.

The quantization object is the D x D determinant with entries f_{i+j+d-1}
(i, j = 1..D). ``dim`` is the determinant dimension D, ``shift`` the
displacement d. Elimination uses partial pivoting ordered by |re| + |im|
(ordering is all the pivot search needs) and factors powers of two out of the
running product so the reported mantissa stays near unity even when the
coefficients span hundreds of orders of magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mpnum import Dual, PrecisionCtx, surrogate_mag
from .riccati import TaylorSeries


@dataclass(frozen=True)
class HankelSpec:
    dim: int
    shift: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("determinant dimension must be at least 2")
        if self.shift < 0:
            raise ValueError("displacement must be nonnegative")

    @property
    def required_order(self) -> int:
        """Series length needed to fill the matrix: 2*dim + shift - 1."""
        return 2 * self.dim + self.shift - 1


@dataclass(frozen=True)
class HankelValue:
    """Scaled determinant: true value (and derivative) = value * 2^log_scale."""

    spec: HankelSpec
    value: Dual
    log_scale: int
    singular: bool = False


def hankel_matrix(series: TaylorSeries, spec: HankelSpec) -> list:
    """Matrix M[i][j] = f_{i+j+shift-1} (0-based rows/cols here)."""
    if series.order < spec.required_order:
        raise ValueError(
            f"series order {series.order} < required {spec.required_order} "
            f"for dim={spec.dim}, shift={spec.shift}"
        )
    return [
        [series.coeff(i + j + spec.shift + 1) for j in range(spec.dim)]
        for i in range(spec.dim)
    ]


def hankel_det(series: TaylorSeries, spec: HankelSpec, ctx: PrecisionCtx) -> HankelValue:
    """Determinant via LU elimination, derivative carried through duals.

    An exactly zero pivot is not an error: a vanishing determinant is the
    quantization condition, so it is reported as value 0 with ``singular`` set.
    """
    m = hankel_matrix(series, spec)
    dim = spec.dim
    det = Dual.constant(ctx, 1)
    log_scale = 0
    negate = False

    for col in range(dim):
        piv_row = col
        piv_mag = surrogate_mag(m[col][col].val)
        for r in range(col + 1, dim):
            cand = surrogate_mag(m[r][col].val)
            if cand > piv_mag:
                piv_row, piv_mag = r, cand
        if piv_mag == 0:
            return HankelValue(spec, Dual.constant(ctx, 0), 0, singular=True)
        if piv_row != col:
            m[col], m[piv_row] = m[piv_row], m[col]
            negate = not negate

        pivot = m[col][col]
        det = det * pivot
        # keep the running product's mantissa near unity
        k = ctx.mag2(det.val)
        if k:
            det = det.ldexp(ctx, -k)
            log_scale += k

        for r in range(col + 1, dim):
            ratio = m[r][col] / pivot
            row_r, row_c = m[r], m[col]
            for c in range(col + 1, dim):
                row_r[c] = row_r[c] - ratio * row_c[c]

    if negate:
        det = -det
    return HankelValue(spec, det, log_scale)
