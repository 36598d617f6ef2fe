"""Exact eigenvalues from zeros of the Bessel function in its complex order.

With z0 = 2*sqrt(-lam) the eigenvalue condition is J_nu(z0) = 0, eps = -nu^2/4.
Since J_nu(z0) = (z0/2)^nu / Gamma(nu+1) * S(nu) with

    S(nu) = sum_k c_k,   c_0 = 1,   c_k = c_{k-1} * lam / (k (nu + k)),

and the prefactor never vanishes away from nonpositive integer orders, the
zeros of S are exactly the zeros of the Bessel function there; no complex
gamma function is needed.  All zeros of S lie in the Re(nu) < 0 half-plane
(every term of S is positive for real nu > -1, and the zeros approach the
negative integers as lam -> 0), so that half-plane is the admissible one and
the root with the largest Re(eps) is the branch the determinant sequences
shadow.  Reported eigenvalues are normalized to Im(eps) >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mpnum import Dual, PrecisionCtx
from .rpm import NewtonConfig

_TRUNC_RUN = 3  # consecutive negligible terms required before truncating
_MAX_TERMS = 200_000


@dataclass(frozen=True)
class OracleRoot:
    nu: object  # mpc, zero of the order series (admissible: Re < 0)
    epsilon: object  # mpc, -nu^2/4, normalized to Im >= 0
    residual: object  # mpf, |S| relative to the largest summed term
    lam: object
    converged: bool = True
    admissible: bool = True


def _check_order_domain(nu_value) -> None:
    n = round(float(nu_value.real))
    if n <= 0 and abs(nu_value - n) < 1e-10:
        raise ValueError(
            "order is within 1e-10 of a nonpositive integer (pole of the term recurrence)"
        )


def _series_with_peak(nu: Dual, lam, ctx: PrecisionCtx):
    """(S(nu) as a dual in nu, magnitude of the largest term)."""
    _check_order_domain(nu.val)
    lam = ctx.real(lam)
    if not lam > 0:
        raise ValueError("lam must be positive")
    cutoff = ctx.ldexp(1, -ctx.mantissa_bits)

    term = Dual.constant(ctx, 1)
    total = term
    peak = ctx.real(1)
    run = 0
    k = 0
    while run < _TRUNC_RUN:
        k += 1
        if k > _MAX_TERMS:
            raise ArithmeticError("order series failed to truncate")
        denom = (nu + Dual.constant(ctx, k)).scale(ctx.real(k))
        term = term.scale(lam) / denom
        total = total + term
        mag = abs(term.val)
        if mag > peak:
            peak = mag
        run = run + 1 if mag <= abs(total.val) * cutoff + peak * cutoff * cutoff else 0
    return total, peak


def reduced_bessel(nu: Dual, lam, ctx: PrecisionCtx) -> Dual:
    """S(nu) and dS/dnu via dual arithmetic (the dual variable is the order)."""
    total, _ = _series_with_peak(nu, lam, ctx)
    return total


def exact_eigenvalue(lam, nu_seed, cfg: NewtonConfig, ctx: PrecisionCtx) -> OracleRoot:
    """Newton in the order on S; maps the zero to eps = -nu^2/4.

    Convergence into Re(nu) >= 0 is reported as inadmissible rather than
    raised; the caller may reseed.  Non-convergence is in-band as well.
    """
    lam = ctx.real(lam)
    nu = ctx.mp.mpc(nu_seed)
    if not nu.real < 0:
        raise ValueError("seed must lie in the admissible half-plane Re(nu) < 0")
    tol = cfg.resolve_tol(ctx)

    s, peak = _series_with_peak(Dual.variable(ctx, nu), lam, ctx)
    converged = False
    for _ in range(cfg.max_iter):
        if s.der == 0:
            break
        step = s.val / s.der
        scale = max(abs(nu), ctx.real(1))
        if abs(step) <= tol * scale:
            nu = nu - step
            s, peak = _series_with_peak(Dual.variable(ctx, nu), lam, ctx)
            converged = True
            break
        t = ctx.real(1)
        accepted = None
        for _ in range(30):
            cand = nu - t * step
            try:
                sc, pc = _series_with_peak(Dual.variable(ctx, cand), lam, ctx)
            except ValueError:  # stepped onto a recurrence pole; shrink
                t = t * ctx.real(cfg.damping)
                continue
            if abs(sc.val) < abs(s.val):
                accepted = (cand, sc, pc)
                break
            t = t * ctx.real(cfg.damping)
        if accepted is None:
            cand = nu - step
            sc, pc = _series_with_peak(Dual.variable(ctx, cand), lam, ctx)
            accepted = (cand, sc, pc)
        nu, s, peak = accepted

    eps = -nu * nu / 4
    if eps.imag < 0:
        nu = ctx.mp.conj(nu)
        eps = ctx.mp.conj(eps)
    return OracleRoot(
        nu=nu,
        epsilon=eps,
        residual=abs(s.val) / peak,
        lam=lam,
        converged=converged,
        admissible=bool(nu.real < 0),
    )


def is_effectively_real(root: OracleRoot, ctx: PrecisionCtx) -> bool:
    """True when the imaginary part is below the claimed output precision."""
    bound = ctx.real(10) ** (-ctx.display_digits + 2)
    return abs(root.epsilon.imag) <= bound * max(abs(root.epsilon), ctx.real(1))


# -- seed discovery ----------------------------------------------------------


def _series_f64(nu, lam, nterms):
    c = np.ones_like(nu)
    s = np.ones_like(nu)
    peak = np.ones(nu.shape, dtype=np.float64)
    for k in range(1, nterms):
        c = c * (lam / (k * (nu + k)))
        s = s + c
        np.maximum(peak, np.abs(c), out=peak)
    return s, peak


def discover_order_candidates(lam, grid_step: float = 1.0) -> list:
    """Multistart Newton in float64 over the admissible quadrant.

    Seeds cover Re in [-(2*sqrt(lam)+10), 0), Im in [0, 2*sqrt(lam)+10]
    (conjugate zeros mirror the quadrant).  Returns deduplicated candidate
    orders sorted by decreasing Re(eps); candidates are float-accurate only
    and must be polished at working precision.
    """
    lam = float(lam)
    if lam <= 0:
        raise ValueError("lam must be positive")
    span = 2.0 * np.sqrt(lam) + 10.0
    nterms = int(4.0 * np.sqrt(lam)) + 120
    re = -span + grid_step * (np.arange(int(span / grid_step)) + 0.5)
    im = grid_step * np.arange(int(span / grid_step) + 1) + 1e-3
    rr, ii = np.meshgrid(re, im)
    nu = (rr + 1j * ii).ravel()

    h = 1e-7
    with np.errstate(all="ignore"):
        last_step = np.zeros_like(nu)
        for _ in range(50):
            s0, _ = _series_f64(nu, lam, nterms)
            s1, _ = _series_f64(nu + h, lam, nterms)
            s2, _ = _series_f64(nu - h, lam, nterms)
            step = s0 / ((s1 - s2) / (2 * h))
            step = np.where(np.isfinite(step), step, 0.0)
            mag = np.abs(step)
            step = np.where(mag > 3.0, step * (3.0 / np.where(mag == 0, 1, mag)), step)
            nu = nu - step
            last_step = step
        val, peak = _series_f64(nu, lam, nterms)
        rel = np.abs(val) / np.maximum(peak, 1.0)

    # Stalled seeds pile up just outside the seeded box and can fake small
    # residuals through cancellation; a one-unit border strip plus a final
    # Newton-step check removes them (genuine zeros sit well inside the box).
    keep = (
        np.isfinite(rel)
        & (rel < 1e-8)
        & (np.abs(last_step) < 1e-8 * (1.0 + np.abs(nu)))
        & (nu.real < -1e-6)
        & (nu.real > -(span - 1.0))
        & (np.abs(nu.imag) < span - 1.0)
    )
    found = nu[keep]
    found = np.where(found.imag < 0, np.conj(found), found)

    uniq: list = []
    for z in found:
        z = complex(z)
        if not any(abs(z - u) < 1e-5 for u in uniq):
            uniq.append(z)
    uniq.sort(key=lambda z: (-(-z * z / 4).real, abs(z)))
    return uniq


# Above this strength the series cancellation (~0.2*sqrt(lam) digits) drowns
# float64, so discovery runs at a smaller strength and the zero is continued
# upward by a geometric ladder with sqrt(lam)-scaled seed prediction.
_DIRECT_LIMIT = 1024.0
_LADDER_FACTOR = 1.15


def _find_direct(lam, cfg: NewtonConfig, ctx: PrecisionCtx, grid_step: float) -> OracleRoot:
    residual_ok = ctx.real(10) ** (-ctx.display_digits + 2)
    last = None
    for seed in discover_order_candidates(lam, grid_step)[:80]:
        seed_mp = ctx.mp.mpc(seed)
        root = exact_eigenvalue(lam, seed_mp, cfg, ctx)
        last = root
        # float candidates carry ~1e-4 accuracy or better; moving further
        # than a quarter unit means Newton left the basin for another zero
        jumped = abs(root.nu - seed_mp) > ctx.real("0.25")
        if root.converged and root.admissible and root.residual <= residual_ok and not jumped:
            return root
    if last is not None:
        return last
    raise ArithmeticError(f"no admissible order zeros discovered for lam={lam}")


def find_eigenvalue(lam, cfg: NewtonConfig, ctx: PrecisionCtx, grid_step: float = 1.0) -> OracleRoot:
    """Locate the tracked zero with no prior seed.

    Multistart discovery finds all zeros in the admissible quadrant and the
    largest-Re(eps) verified candidate is the tracked branch (the zeros lie on
    an arc; the branch is its crown).  Beyond the float-safe strength the
    crown is continued up a geometric strength ladder instead.
    """
    lam_mp = ctx.real(lam)
    if float(lam_mp) <= _DIRECT_LIMIT:
        return _find_direct(lam_mp, cfg, ctx, grid_step)

    rungs = [lam_mp]
    while float(rungs[-1]) > _DIRECT_LIMIT:
        rungs.append(rungs[-1] / ctx.real(_LADDER_FACTOR))
    rungs.reverse()

    root = _find_direct(rungs[0], cfg, ctx, grid_step)
    for prev, nxt in zip(rungs, rungs[1:]):
        if not (root.converged and root.admissible):
            return root
        pred = root.nu * ctx.mp.sqrt(nxt / prev)
        root = exact_eigenvalue(nxt, pred, cfg, ctx)
    return root


def oracle_scan(
    lambda_grid,
    continuation: bool,
    ctx: PrecisionCtx,
    cfg: NewtonConfig | None = None,
    nu_seed=None,
) -> list:
    """One root branch across an ascending grid of potential strengths.

    Each converged root seeds the next grid point (when ``continuation``);
    losing the branch flags that point in-band and the scan carries on from
    the last good order.
    """
    grid = [ctx.real(x) for x in lambda_grid]
    if not grid:
        raise ValueError("lambda grid must contain at least one point")
    if any(grid[i] >= grid[i + 1] for i in range(len(grid) - 1)):
        raise ValueError("lambda grid must be sorted strictly ascending")
    cfg = cfg or NewtonConfig()

    out = []
    seed = ctx.mp.mpc(nu_seed) if nu_seed is not None else None
    for lam in grid:
        if seed is None or not continuation:
            root = find_eigenvalue(lam, cfg, ctx)
        else:
            root = exact_eigenvalue(lam, seed, cfg, ctx)
            if not (root.converged and root.admissible):
                root = find_eigenvalue(lam, cfg, ctx)
        out.append(root)
        if root.converged and root.admissible:
            seed = root.nu
    return out
