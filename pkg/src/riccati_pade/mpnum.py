"""Arbitrary-precision complex arithmetic and forward-mode dual numbers.

Every other module works through a :class:`PrecisionCtx`, which owns an
independent mpmath context pinned to a fixed binary precision.  Values created
through one context never change precision behind the caller's back, and
distinct contexts can be used from different threads without synchronization
(the context's precision is set once at construction and only read afterwards).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from mpmath.ctx_mp import MPContext

LOG10_2 = math.log10(2.0)

#: Extra decimal digits the mantissa must carry beyond what is displayed.
_DISPLAY_GUARD_DIGITS = 5


def default_mantissa_bits(max_dim: int) -> int:
    """Working precision for a run whose largest determinant dimension is ``max_dim``.

    Hankel determinants lose roughly a fixed number of bits per dimension to
    cancellation; 64 + 32*max_dim keeps 20 trustworthy decimal digits at
    max_dim = 20 (validated by the precision-doubling tests).
    """
    return 64 + 32 * max_dim


@dataclass(frozen=True)
class PrecisionCtx:
    """Fixed working precision plus the number of digits shown on output."""

    mantissa_bits: int
    display_digits: int = 20
    mp: MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.mantissa_bits < 128:
            raise ValueError("mantissa_bits must be at least 128")
        if self.display_digits < 1:
            raise ValueError("display_digits must be positive")
        max_digits = math.floor(self.mantissa_bits * LOG10_2) - _DISPLAY_GUARD_DIGITS
        if self.display_digits > max_digits:
            raise ValueError(
                f"display_digits={self.display_digits} claims more precision than "
                f"{self.mantissa_bits} mantissa bits carry (max {max_digits})"
            )
        ctx = MPContext()
        ctx.prec = self.mantissa_bits
        object.__setattr__(self, "mp", ctx)

    # -- constructors -------------------------------------------------------

    def real(self, x):
        """Real value at working precision (accepts int, float, str, mpf)."""
        return self.mp.mpf(x)

    def cnum(self, re, im=0):
        """Complex value at working precision."""
        return self.mp.mpc(self.mp.mpf(re), self.mp.mpf(im))

    def doubled(self) -> "PrecisionCtx":
        """Context with twice the mantissa width (for certification passes)."""
        return PrecisionCtx(2 * self.mantissa_bits, self.display_digits)

    # -- numeric helpers ----------------------------------------------------

    @property
    def eps(self):
        """One unit in the last place at working precision."""
        return self.mp.mpf(2) ** (-self.mantissa_bits)

    def ldexp(self, x, n: int):
        return self.mp.ldexp(x, n)

    def mag2(self, x) -> int:
        """Integer k with |x| < 2^k (mpmath's cheap magnitude bound)."""
        return int(self.mp.mag(x))

    # -- output -------------------------------------------------------------

    def format_real(self, x, digits: int | None = None) -> str:
        """Fixed-point string with exactly ``digits`` significant digits.

        Round-to-nearest; trailing zeros are kept so that every value occupies
        its full claimed precision (e.g. "4158.9533468460956580").
        """
        digits = self.display_digits if digits is None else digits
        x = self.mp.mpf(x)
        return mpmath.nstr(
            x, digits, strip_zeros=False, min_fixed=-mpmath.inf, max_fixed=mpmath.inf
        )

    def format_complex(self, z, digits: int | None = None) -> str:
        re = self.format_real(self.mp.mpc(z).real, digits)
        im = self.format_real(self.mp.mpc(z).imag, digits)
        sign = "-" if im.startswith("-") else "+"
        return f"{re} {sign} {im.lstrip('-')}i"


def surrogate_mag(z):
    """|re| + |im|, the cheap magnitude used for pivot ordering only."""
    return abs(z.real) + abs(z.imag)


class Dual:
    """Complex value carrying its first derivative with respect to one variable.

    Arithmetic follows the usual forward-mode rules exactly at working
    precision; which variable the derivative refers to is the caller's
    business (the energy in the determinant modules, the Bessel order in the
    oracle).  Instances are immutable by convention.
    """

    __slots__ = ("val", "der")

    def __init__(self, val, der):
        self.val = val
        self.der = der

    @classmethod
    def constant(cls, ctx: PrecisionCtx, x) -> "Dual":
        return cls(ctx.mp.mpc(x), ctx.cnum(0))

    @classmethod
    def variable(cls, ctx: PrecisionCtx, x) -> "Dual":
        return cls(ctx.mp.mpc(x), ctx.cnum(1))

    def __add__(self, other: "Dual") -> "Dual":
        return Dual(self.val + other.val, self.der + other.der)

    def __sub__(self, other: "Dual") -> "Dual":
        return Dual(self.val - other.val, self.der - other.der)

    def __mul__(self, other: "Dual") -> "Dual":
        return Dual(
            self.val * other.val, self.der * other.val + self.val * other.der
        )

    def __truediv__(self, other: "Dual") -> "Dual":
        if other.val == 0:
            raise ZeroDivisionError("dual division by a value that is exactly zero")
        q = self.val / other.val
        return Dual(q, (self.der - q * other.der) / other.val)

    def __neg__(self) -> "Dual":
        return Dual(-self.val, -self.der)

    def scale(self, c) -> "Dual":
        """Multiply by a derivative-free scalar."""
        return Dual(self.val * c, self.der * c)

    def ldexp(self, ctx: PrecisionCtx, n: int) -> "Dual":
        """Exact scaling by 2^n of both components."""
        two_n = ctx.mp.mpf(2) ** n
        return Dual(self.val * two_n, self.der * two_n)

    def __repr__(self):
        return f"Dual({self.val!r}, der={self.der!r})"
