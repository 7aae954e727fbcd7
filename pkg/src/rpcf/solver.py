"""ADMM solver for the pooling-constrained filter objective.

The primal step solves the normal equations in the Fourier domain with a
matrix-free Krylov method; the three operator terms (weighted data term,
constraint term, spatial-regularizer term) are applied via FFTs, spatial
masking and table lookups, never as dense matrices.  Multipliers then
ascend on the constraint violations and the penalty grows geometrically
up to a clamp.

The Krylov step is the conjugate-residual variant: one operator
application per iteration like plain CG, but the residual norm is
nonincreasing by construction, which the solver contract requires.
"""

from dataclasses import dataclass, field

import numpy as np

from . import constraints as con

_fft2 = np.fft.fft2
_ifft2 = np.fft.ifft2


class SolverError(RuntimeError):
    pass


@dataclass
class ProblemContext:
    """Everything the solver needs besides the training samples."""

    label_hat: np.ndarray
    mask: con.CropMask
    reg: con.SpatialRegularizer
    pairs: con.ConstraintPairSet
    lam: float
    gamma_init: np.ndarray  # per-channel initial penalty
    gamma_max: float = 1000.0
    alpha: float = 10.0
    g_sq: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.gamma_init = np.asarray(self.gamma_init, dtype=np.float64)
        if self.g_sq is None:
            self.g_sq = self.reg.g * self.reg.g

    @property
    def dims(self):
        return self.label_hat.shape

    @property
    def n_channels(self):
        return int(self.gamma_init.shape[0])


@dataclass
class SpectralFilter:
    w_hat: np.ndarray  # (D, H, W) complex
    context: ProblemContext

    def spatial(self):
        return _ifft2(self.w_hat, axes=(-2, -1)).real

    def masked_spectra(self):
        """Spectra of the mask-cropped filter, as used by the response."""
        return _mask_multiply(self.context.mask.p, self.w_hat)

    def constraint_residual(self):
        """(max absolute, max relative) within-kernel weight discrepancy."""
        w = self.spatial()
        worst = 0.0
        for d in range(w.shape[0]):
            v = con.apply_V(self.context.pairs, w[d])
            if v.size:
                worst = max(worst, float(np.max(np.abs(v))))
        scale = float(np.max(np.abs(w))) + 1e-12
        return worst, worst / scale


@dataclass
class AdmmState:
    xi: np.ndarray  # (D, K) multipliers
    gamma: np.ndarray  # (D,) penalties
    gamma_max: float
    alpha: float
    iteration: int = 0
    cg_direction: np.ndarray = field(default=None, repr=False)
    cg_rho: float = 0.0

    @classmethod
    def fresh(cls, ctx: ProblemContext):
        return cls(
            xi=np.zeros((ctx.n_channels, ctx.pairs.K)),
            gamma=ctx.gamma_init.copy(),
            gamma_max=ctx.gamma_max,
            alpha=ctx.alpha,
        )


def _mask_multiply(m, u_hat):
    # F(m . F^-1 u) applied across channels.
    return _fft2(m * _ifft2(u_hat, axes=(-2, -1)), axes=(-2, -1))


def apply_data_term(x_hats, mu, mask_p, u_hat):
    """Sample-weighted data term of the normal equations.

    x_hats: (T, D, H, W) sample spectra; mu: (T,) importance weights.
    Channel d of the result is P[sum_t mu_t conj(x_d^t) . s^t] with
    s^t = sum_j x_j^t . (P u_j), all mask products via spatial masking.
    """
    if x_hats.shape[0] == 0:
        raise SolverError("empty sample memory")
    q = _mask_multiply(mask_p, u_hat)
    s = np.einsum("tdhw,dhw->thw", x_hats, q)
    acc = np.einsum("t,tdhw,thw->dhw", mu, np.conj(x_hats), s)
    return _mask_multiply(mask_p, acc)


def apply_constraint_term(pairs, gamma, u_hat):
    """Per channel: F(gamma_d * V^T V F^-1(u_d)) via table lookups."""
    out = np.zeros_like(u_hat)
    if pairs.K == 0:
        return out
    w = _ifft2(u_hat, axes=(-2, -1)).real
    for d in range(u_hat.shape[0]):
        if gamma[d] == 0.0:
            continue
        out[d] = _fft2(gamma[d] * con.apply_VtV(pairs, w[d]))
    return out


def apply_reg_term(g_sq, lam, u_hat):
    """lambda * Ghat^H Ghat u = lambda * F(g^2 . F^-1 u)."""
    if lam == 0.0:
        return np.zeros_like(u_hat)
    return lam * _fft2(g_sq * _ifft2(u_hat, axes=(-2, -1)), axes=(-2, -1))


def build_rhs(x_hats, mu, ctx: ProblemContext, xi):
    """Right-hand side: weighted data correlation minus the multiplier term."""
    if x_hats.shape[0] == 0:
        raise SolverError("empty sample memory")
    acc = np.einsum("t,tdhw->dhw", mu, np.conj(x_hats)) * ctx.label_hat
    rhs = _mask_multiply(ctx.mask.p, acc)
    if ctx.pairs.K:
        for d in range(rhs.shape[0]):
            rhs[d] -= _fft2(con.apply_Vt(ctx.pairs, xi[d]))
    return rhs


def make_operator(x_hats, mu, ctx: ProblemContext, gamma):
    def op(u_hat):
        out = apply_data_term(x_hats, mu, ctx.mask.p, u_hat)
        out += apply_constraint_term(ctx.pairs, gamma, u_hat)
        out += apply_reg_term(ctx.g_sq, ctx.lam, u_hat)
        return out

    return op


def _inner(a, b):
    # Iterates stay Hermitian-symmetric (real in space), so the inner
    # product is real up to roundoff.
    return float(np.real(np.vdot(a, b)))


def cg_solve(op, rhs, x0=None, max_iters=50, tol=1e-6, warm_direction=None, warm_rho=0.0):
    """Matrix-free Krylov solve of op(x) = rhs (Hermitian PSD operator).

    Conjugate-residual iteration: the residual norm never increases.  An
    optional previous search direction seeds the first step.  Returns
    (x, info) where info carries the residual trace, the iteration count
    and the final direction for warm-starting the next solve.
    """
    x = np.zeros_like(rhs) if x0 is None else x0.copy()
    b_norm = float(np.linalg.norm(rhs))
    r = rhs - op(x) if x0 is not None else rhs.copy()
    residuals = [float(np.linalg.norm(r))]
    info = {"residuals": residuals, "iterations": 0, "direction": None, "rho": 0.0}
    if b_norm == 0.0 or residuals[-1] <= tol * max(b_norm, 1e-300):
        return x, info

    Ar = op(r)
    rho = _inner(r, Ar)
    p = r.copy()
    if warm_direction is not None and warm_rho > 0.0:
        p = r + (rho / warm_rho) * warm_direction
    Ap = op(p) if warm_direction is not None and warm_rho > 0.0 else Ar.copy()

    for it in range(max_iters):
        denom = _inner(Ap, Ap)
        if denom <= 0.0:
            break
        alpha = _inner(Ap, r) / denom
        x += alpha * p
        r -= alpha * Ap
        if not np.all(np.isfinite(r)):
            raise SolverError("non-finite residual in the linear solve")
        res = float(np.linalg.norm(r))
        residuals.append(res)
        info["iterations"] = it + 1
        if res <= tol * b_norm:
            break
        Ar = op(r)
        rho_new = _inner(r, Ar)
        if rho_new <= 0.0:
            break
        beta = rho_new / rho
        p = r + beta * p
        Ap = Ar + beta * Ap
        rho = rho_new
    info["direction"] = p
    info["rho"] = rho if rho > 0 else 0.0
    return x, info


def update_multipliers(state: AdmmState, pairs, filt: SpectralFilter):
    """xi_d += gamma_d * V(F^-1 w_d); returns the state (mutated)."""
    if pairs.K == 0:
        return state
    w = filt.spatial()
    for d in range(w.shape[0]):
        state.xi[d] += state.gamma[d] * con.apply_V(pairs, w[d])
    return state


def update_penalty(state: AdmmState):
    """gamma_d <- min(gamma_max, alpha * gamma_d); bumps the iteration count."""
    state.gamma = np.minimum(state.gamma_max, state.alpha * state.gamma)
    state.iteration += 1
    return state


def _split_budget(total, parts):
    # First part gets the big share (100/50/50 for 200 over 3, 3/3 for 6 over 2).
    if parts == 1:
        return [total]
    head = total // 2
    rest = total - head
    tail_each = max(1, rest // (parts - 1))
    out = [head] + [tail_each] * (parts - 1)
    out[-1] += total - sum(out)
    return [max(1, b) for b in out]


def admm_solve(
    mem,
    ctx: ProblemContext,
    outer_iters=3,
    cg_budget=200,
    cg_tol=1e-6,
    warm_filter=None,
    state=None,
    reset_xi=False,
    cg_schedule=None,
):
    """Alternate the Fourier-domain linear solve with multiplier/penalty
    updates.

    Multipliers persist across calls when a previous state is supplied
    (reset with reset_xi=True); the penalty restarts from its per-group
    initial value every call.  Returns (filter, state, trace).
    """
    x_hats, mu = mem.spectra() if hasattr(mem, "spectra") else mem
    if x_hats.shape[0] == 0:
        raise SolverError("empty sample memory")

    if state is None:
        state = AdmmState.fresh(ctx)
    else:
        state.gamma = ctx.gamma_init.copy()
        if reset_xi:
            state.xi = np.zeros_like(state.xi)

    w_hat = (
        np.zeros((ctx.n_channels,) + ctx.dims, dtype=np.complex128)
        if warm_filter is None
        else warm_filter.w_hat.copy()
    )
    filt = SpectralFilter(w_hat=w_hat, context=ctx)
    budgets = cg_schedule if cg_schedule is not None else _split_budget(cg_budget, outer_iters)

    trace = {"loss": [], "constraint_residual": [], "cg_iterations": []}
    prev_loss = None
    for i, budget in enumerate(budgets):
        rhs = build_rhs(x_hats, mu, ctx, state.xi)
        op = make_operator(x_hats, mu, ctx, state.gamma)
        w_hat, cg_info = cg_solve(
            op,
            rhs,
            x0=filt.w_hat if (warm_filter is not None or i > 0) else None,
            max_iters=budget,
            tol=cg_tol,
            warm_direction=state.cg_direction,
            warm_rho=state.cg_rho,
        )
        filt = SpectralFilter(w_hat=w_hat, context=ctx)
        state.cg_direction = cg_info["direction"]
        state.cg_rho = cg_info["rho"]
        update_multipliers(state, ctx.pairs, filt)
        update_penalty(state)

        loss = _weighted_loss(filt, x_hats, mu, ctx)
        if prev_loss is not None and loss > 10.0 * max(prev_loss, 1e-300):
            raise SolverError(
                f"objective diverged: {prev_loss:.3e} -> {loss:.3e} at outer iteration {i}"
            )
        prev_loss = loss
        trace["loss"].append(loss)
        trace["constraint_residual"].append(filt.constraint_residual()[0])
        trace["cg_iterations"].append(cg_info["iterations"])
    return filt, state, trace


def _weighted_loss(filt, x_hats, mu, ctx):
    # Fourier-domain evaluation of the memory-weighted objective.
    H, W = ctx.dims
    wm = filt.masked_spectra()
    resp = np.einsum("tdhw,dhw->thw", x_hats, wm)
    data = 0.5 * float(mu @ np.sum(np.abs(ctx.label_hat[None] - resp) ** 2, axis=(1, 2))) / (H * W)
    w = filt.spatial()
    reg = 0.5 * ctx.lam * float(np.sum((ctx.reg.g[None] * w) ** 2))
    return data + reg


def objective_eval(filt: SpectralFilter, x_hat, ctx: ProblemContext):
    """Spatial-domain loss and max-abs constraint violation for one sample.

    The Fourier-domain evaluation of the same quantity agrees to
    roundoff; both paths are exposed for the cross-check.
    """
    spatial = objective_eval_spatial(filt, x_hat, ctx)
    residual, _ = filt.constraint_residual()
    return spatial, residual


def objective_eval_spatial(filt, x_hat, ctx):
    y = _ifft2(ctx.label_hat).real
    w = filt.spatial()
    x = _ifft2(x_hat, axes=(-2, -1)).real
    resp = np.zeros_like(y)
    for d in range(w.shape[0]):
        masked = ctx.mask.p * w[d]
        resp += _ifft2(_fft2(masked) * _fft2(x[d])).real
    data = 0.5 * float(np.sum((y - resp) ** 2))
    reg = 0.5 * ctx.lam * float(np.sum((ctx.reg.g[None] * w) ** 2))
    return data + reg


def objective_eval_fourier(filt, x_hat, ctx):
    H, W = ctx.dims
    wm = filt.masked_spectra()
    resp = np.einsum("dhw,dhw->hw", x_hat, wm)
    data = 0.5 * float(np.sum(np.abs(ctx.label_hat - resp) ** 2)) / (H * W)
    gw_hat = _fft2(ctx.reg.g[None] * filt.spatial(), axes=(-2, -1))
    reg = 0.5 * ctx.lam * float(np.sum(np.abs(gw_hat) ** 2)) / (H * W)
    return data + reg
