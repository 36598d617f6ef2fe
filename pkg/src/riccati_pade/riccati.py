"""Taylor coefficients of the regularized logarithmic derivative.

For the radial equation with potential strength ``lam`` the function
f(q) = 1/q - Phi'(q)/Phi(q) satisfies

    f'(q) + 2 f(q)/q - f(q)^2 + lam * exp(-q) - eps = 0,      f(0) = 0.

Matching powers of q after inserting f(q) = sum_{j>=1} f_j q^j gives the
recurrence

    f_{n+1} = (C_n - lam * (-1)^n / n! + eps * [n == 0]) / (n + 3),

where C_n = sum_{k=1}^{n-1} f_k f_{n-k} is the n-th coefficient of f^2.
The recurrence was derived by hand and is certified at runtime by
:func:`riccati_residual`, which evaluates the left side of the equation with
the truncated series and must decay like q^N.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mpnum import Dual, PrecisionCtx


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless potential strength and (dual) energy."""

    lam: object  # positive real at working precision
    eps: Dual

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("potential strength lam must be positive")


@dataclass(frozen=True)
class TaylorSeries:
    """Coefficients f_1..f_N; f_0 = 0 by construction and is not stored."""

    params: ModelParams
    coeffs: tuple  # of Dual

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def coeff(self, j: int) -> Dual:
        """f_j for 1 <= j <= order."""
        return self.coeffs[j - 1]


def taylor_coefficients(params: ModelParams, order: int, ctx: PrecisionCtx) -> TaylorSeries:
    """First ``order`` series coefficients, each carrying d/d(eps)."""
    if order < 1:
        raise ValueError("series order must be at least 1")
    lam = ctx.real(params.lam)
    eps = params.eps
    one = ctx.real(1)
    zero = Dual.constant(ctx, 0)

    f = [zero] * (order + 1)  # f[0] stays 0
    alt_inv_fact = one  # (-1)^n / n!, accumulated multiplicatively
    for n in range(order):
        conv = zero
        for k in range(1, n):
            conv = conv + f[k] * f[n - k]
        rhs = conv - Dual.constant(ctx, lam * alt_inv_fact)
        if n == 0:
            rhs = rhs + eps
        f[n + 1] = rhs.scale(one / (n + 3))
        alt_inv_fact = -alt_inv_fact / (n + 1)
    return TaylorSeries(params=params, coeffs=tuple(f[1:]))


def riccati_residual(series: TaylorSeries, q, ctx: PrecisionCtx):
    """Left side of the defining equation at ``q`` using the truncated series.

    The lowest surviving term is of order q^N, so the returned magnitude must
    scale like q^N when q is halved; q is restricted to (0, 1/4) so truncation
    dominates rounding.
    """
    q = ctx.real(q)
    if not (0 < q < ctx.real(1) / 4):
        raise ValueError("q must lie in (0, 1/4)")
    lam = ctx.real(series.params.lam)
    eps = series.params.eps.val

    # Horner evaluation of f and f' from the value parts.
    fval = ctx.cnum(0)
    fprime = ctx.cnum(0)
    for j in range(series.order, 0, -1):
        c = series.coeff(j).val
        fval = fval * q + c
        fprime = fprime * q + c * j
    fval = fval * q  # f(q) = q * sum_j f_j q^{j-1}

    return fprime + 2 * fval / q - fval * fval + lam * ctx.mp.exp(-q) - eps
