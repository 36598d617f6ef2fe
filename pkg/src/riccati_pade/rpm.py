"""Roots of the Hankel quantization condition and their dimension sequences.

For fixed potential strength the determinant is an analytic function of the
energy; roots are found by damped Newton iteration with the derivative carried
by dual numbers through the elimination.  A sequence run walks the determinant
dimension upward, each converged root seeding the next dimension.  Sequences
are started well below the first reported dimension ("warmup") because at
large dimensions spurious roots crowd the physical one and a cold Newton start
routinely lands on the wrong member of the cluster.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .hankel import HankelSpec, HankelValue, hankel_det
from .mpnum import Dual, PrecisionCtx
from .riccati import ModelParams, taylor_coefficients

_DAMP_TRIES = 30
_RESTART_LIMIT = 3


@dataclass(frozen=True)
class NewtonConfig:
    """Stopping rule: |step| <= tol * |root|.  ``tol=None`` picks a default
    of 2^(-2*bits/3) from the context; damping multiplies the step whenever
    the residual fails to decrease."""

    tol: object = None
    max_iter: int = 100
    damping: float = 0.5

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not (0 < self.damping <= 1):
            raise ValueError("damping must lie in (0, 1]")

    def resolve_tol(self, ctx: PrecisionCtx):
        bits = ctx.mantissa_bits
        tol = ctx.real(self.tol) if self.tol is not None else ctx.ldexp(1, -(2 * bits) // 3)
        if tol < ctx.ldexp(1, -bits + 8):
            raise ValueError("tol is below what the working precision can resolve")
        return tol


@dataclass(frozen=True)
class RootResult:
    spec: HankelSpec
    epsilon: object  # mpc
    residual: object  # mpf, |det| after power-of-two scaling
    residual_floor: object  # noise-floor estimate at the root
    iterations: int
    converged: bool
    log_scale: int = 0


@dataclass(frozen=True)
class SequenceReport:
    lam: object
    shift: int
    entries: tuple  # of RootResult, one per dimension
    deltas: tuple  # |eps_D - eps_{D-1}| between consecutive entries
    limit_estimate: object  # mpc of the last converged entry, or None
    convergent: bool


@dataclass(frozen=True)
class RootCluster:
    """A deduplicated root with the number of grid seeds that reached it."""

    root: RootResult
    count: int
    spread: object  # max distance of members from the representative


def _det_at(lam, spec: HankelSpec, eps_value, ctx: PrecisionCtx) -> HankelValue:
    params = ModelParams(lam=ctx.real(lam), eps=Dual.variable(ctx, eps_value))
    series = taylor_coefficients(params, spec.required_order, ctx)
    return hankel_det(series, spec, ctx)


def _res_smaller(a: HankelValue, b: HankelValue, ctx: PrecisionCtx) -> bool:
    """|a| < |b| comparing true magnitudes across different log scales."""
    return abs(a.value.val) < ctx.ldexp(abs(b.value.val), b.log_scale - a.log_scale)


def _noise_floor(h: HankelValue, eps, tol, ctx: PrecisionCtx):
    """Residual level indistinguishable from an exact root at this precision."""
    der = abs(h.value.der)
    rounding = ctx.ldexp(ctx.real(h.spec.dim) ** 3, -ctx.mantissa_bits + 8)
    return 64 * der * tol * abs(eps) + rounding * (1 + der * abs(eps))


def newton_root(lam, shift: int, dim: int, eps0, cfg: NewtonConfig, ctx: PrecisionCtx) -> RootResult:
    """Damped Newton from ``eps0`` on the (dim, shift) determinant.

    A vanishing derivative triggers up to three deterministic restarts from
    eps0 perturbed by 1% in a pseudo-random direction; running out of
    iterations or restarts yields ``converged=False``, never an exception.
    """
    spec = HankelSpec(dim, shift)
    tol = cfg.resolve_tol(ctx)
    eps0 = ctx.mp.mpc(eps0)
    rng = random.Random(f"newton:{dim}:{shift}")

    last = None
    for attempt in range(_RESTART_LIMIT + 1):
        if attempt == 0:
            eps = eps0
        else:
            angle = ctx.real(rng.uniform(0.0, 6.283185307179586))
            kick = ctx.real("0.01") * max(abs(eps0), ctx.real(1))
            eps = eps0 + kick * ctx.mp.mpc(ctx.mp.cos(angle), ctx.mp.sin(angle))
        result = _newton_from(lam, spec, eps, tol, cfg, ctx)
        if result is not None:
            return result
        last = eps
    h = _det_at(lam, spec, last, ctx)
    return RootResult(
        spec, last, abs(h.value.val), _noise_floor(h, last, tol, ctx),
        cfg.max_iter, False, h.log_scale,
    )


def _newton_from(lam, spec, eps, tol, cfg, ctx):
    """One Newton run; returns a RootResult or None when the derivative dies."""
    h = _det_at(lam, spec, eps, ctx)
    floor_one = ctx.real(1)
    for it in range(1, cfg.max_iter + 1):
        if h.singular:
            return RootResult(spec, eps, ctx.real(0), ctx.real(0), it, True, 0)
        if h.value.der == 0:
            return None
        step = h.value.val / h.value.der
        scale = max(abs(eps), floor_one * ctx.ldexp(1, -ctx.mantissa_bits // 2))
        if abs(step) <= tol * scale:
            eps = eps - step
            h = _det_at(lam, spec, eps, ctx)
            return RootResult(
                spec, eps, abs(h.value.val), _noise_floor(h, eps, tol, ctx),
                it, True, h.log_scale,
            )
        t = ctx.real(1)
        accepted = None
        for _ in range(_DAMP_TRIES):
            cand = eps - t * step
            hc = _det_at(lam, spec, cand, ctx)
            if hc.singular or _res_smaller(hc, h, ctx):
                accepted = (cand, hc)
                break
            t = t * ctx.real(cfg.damping)
        if accepted is None:
            # Residual can no longer decrease: at the evaluation noise floor.
            cand = eps - step
            accepted = (cand, _det_at(lam, spec, cand, ctx))
        eps, h = accepted
    return RootResult(
        spec, eps, abs(h.value.val), _noise_floor(h, eps, tol, ctx),
        cfg.max_iter, False, h.log_scale,
    )


def hankel_sequence(
    lam,
    shift: int,
    dim_min: int,
    dim_max: int,
    seed,
    cfg: NewtonConfig,
    ctx: PrecisionCtx,
    warmup_start: int = 2,
) -> SequenceReport:
    """Track the root branch from ``dim_min`` to ``dim_max``.

    The branch is located by continuation starting at ``warmup_start`` (low
    dimensions have few, well separated roots); only dimensions >= dim_min are
    reported.  Non-convergence at one dimension keeps the last good root as
    the next seed and is reported in-band.
    """
    if dim_min < 2:
        raise ValueError("dim_min must be at least 2")
    if dim_max < dim_min:
        raise ValueError("dim_max must be >= dim_min")
    start = max(2, min(warmup_start, dim_min))

    lam = ctx.real(lam)
    current = ctx.mp.mpc(seed)
    entries = []
    for dim in range(start, dim_max + 1):
        root = newton_root(lam, shift, dim, current, cfg, ctx)
        if root.converged:
            current = root.epsilon
        if dim >= dim_min:
            entries.append(root)

    deltas = tuple(
        abs(entries[i].epsilon - entries[i - 1].epsilon) for i in range(1, len(entries))
    )
    limit = None
    for root in reversed(entries):
        if root.converged:
            limit = root.epsilon
            break

    bad_run = 0
    three_failures = False
    for root in entries:
        bad_run = bad_run + 1 if not root.converged else 0
        if bad_run >= 3:
            three_failures = True
            break
    growing_tail = len(deltas) >= 5 and all(
        deltas[i] > deltas[i - 1] for i in range(len(deltas) - 4, len(deltas))
    )
    return SequenceReport(
        lam=lam,
        shift=shift,
        entries=tuple(entries),
        deltas=deltas,
        limit_estimate=limit,
        convergent=not (three_failures or growing_tail) and limit is not None,
    )


def cluster_roots(
    lam,
    shift: int,
    dim: int,
    box_center,
    box_radius,
    grid_n: int,
    cfg: NewtonConfig,
    ctx: PrecisionCtx,
) -> tuple:
    """Newton from a grid of seeds over a box; distinct converged roots with
    seed counts.  Roots closer than 10^3 * tol (relative) are identified."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    tol = cfg.resolve_tol(ctx)
    center = ctx.mp.mpc(box_center)
    radius = ctx.real(box_radius)

    lam = ctx.real(lam)
    roots = []
    for i in range(grid_n):
        u = ctx.real(-1) + ctx.real(2 * i) / (grid_n - 1)
        for j in range(grid_n):
            v = ctx.real(-1) + ctx.real(2 * j) / (grid_n - 1)
            seed = center + radius * ctx.mp.mpc(u, v)
            root = newton_root(lam, shift, dim, seed, cfg, ctx)
            if root.converged:
                roots.append(root)

    merge_dist = ctx.real(1000) * tol
    clusters = []  # [representative RootResult, members]
    for root in roots:
        placed = False
        for entry in clusters:
            rep = entry[0]
            if abs(root.epsilon - rep.epsilon) <= merge_dist * max(
                abs(rep.epsilon), ctx.real(1)
            ):
                entry[1].append(root)
                if root.residual < rep.residual:
                    entry[0] = root
                placed = True
                break
        if not placed:
            clusters.append([root, [root]])

    out = []
    for rep, members in clusters:
        spread = max(abs(m.epsilon - rep.epsilon) for m in members)
        out.append(RootCluster(root=rep, count=len(members), spread=spread))
    out.sort(key=lambda c: (-c.count, abs(c.root.epsilon)))
    return tuple(out)


def certify_root(lam, shift: int, dim: int, root: RootResult, cfg: NewtonConfig, ctx: PrecisionCtx):
    """Re-evaluate at doubled precision and take one Newton step.

    Returns (moved, passed): the step size and whether it stays within
    10 * tol * |root|, which bounds the rounding contamination of the reported
    root.
    """
    tol = cfg.resolve_tol(ctx)
    wide = ctx.doubled()
    eps = wide.mp.mpc(root.epsilon)
    h = _det_at(wide.real(lam), HankelSpec(dim, shift), eps, wide)
    if h.value.der == 0:
        return wide.real(0), True
    moved = abs(h.value.val / h.value.der)
    return moved, bool(moved < wide.real(10) * wide.real(tol) * abs(eps))
