"""One-dimensional slice samplers.

Four transition kernels share the log-space shrinkage loop:

* ``slice_bounded``   shrinkage on a fixed interval [st, ed).
* ``slice_unbounded`` shrinkage on p in (0, 1) with x = A * logit(p).
* ``slice_positive``  shrinkage on p in (0, 1) with x = p / (1 - p).
* ``stepping_out``    Neal's stepping-out followed by shrinkage (baseline).

The slice level is log f(x) + log u.  For the reparameterized kernels the
density over p is f(expand(p)) * dx/dp, so ``log_jacobian`` is added to both
the level and every candidate.
"""

import enum
import math
from dataclasses import dataclass, field

from .errors import ArgumentError, DomainError, SliceboxError, StateError
from .rng import RngStream
from .targets import Support
from .transforms import P_GUARD, Transform

_NEG_INF = -math.inf


class Method(enum.Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    POSITIVE = "positive"
    STEPPING_OUT = "stepout"


@dataclass(frozen=True)
class SamplerConfig:
    method: Method = Method.UNBOUNDED
    a_scale: float = 100.0
    bounds: tuple = None
    width: float = 1.0
    max_iter: int = 1000
    max_stepout: int = 10**6
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.method, str):
            object.__setattr__(self, "method", Method(self.method))
        if not (math.isfinite(self.a_scale) and self.a_scale > 0):
            raise ArgumentError(f"a_scale must be finite and > 0, got {self.a_scale}")
        if not (math.isfinite(self.width) and self.width > 0):
            raise ArgumentError(f"width must be finite and > 0, got {self.width}")
        if self.max_iter < 1 or self.max_stepout < 1:
            raise ArgumentError("max_iter and max_stepout must be positive")
        if self.method is Method.BOUNDED:
            if self.bounds is None:
                raise ArgumentError("bounded sampling needs bounds (st, ed)")
            st, ed = self.bounds
            if not (math.isfinite(st) and math.isfinite(ed) and st < ed):
                raise ArgumentError(f"bounds need finite st < ed, got {self.bounds}")

    @property
    def transform(self):
        if self.method is Method.POSITIVE:
            return Transform.positive_ratio()
        return Transform.scaled_sigmoid(self.a_scale)


@dataclass
class ChainState:
    """Current draw x, iteration t, and the stream that advances it.

    ``logf`` caches log f(x) so a draw does not re-evaluate its starting point.
    """

    x: float
    rng: RngStream
    t: int = 0
    logf: float = field(default=None, repr=False)


@dataclass(frozen=True)
class DrawRecord:
    x: float
    n_evals: int
    n_shrinks: int
    max_iter_hit: bool = False
    stepout_capped: bool = False


def _current_logf(state, d):
    if state.logf is None:
        state.logf = d.log_eval(state.x)
    lf = state.logf
    if lf == _NEG_INF:
        raise StateError(f"f(x)=0 at the current state x={state.x!r}; slice level undefined")
    if not lf < math.inf:
        raise StateError(f"log f(x) is not finite at x={state.x!r}")
    return lf


def _finish(state, x, lf, n_evals, n_shrinks, **flags):
    state.x = x
    state.logf = lf
    state.t += 1
    return DrawRecord(x, n_evals, n_shrinks, **flags)


def slice_bounded(state, d, cfg, trace=None):
    """One shrinkage update on the fixed interval ``cfg.bounds``."""
    st, ed = cfg.bounds
    x0 = state.x
    if not (st <= x0 <= ed):
        raise StateError(f"x={x0!r} lies outside bounds [{st}, {ed}]")
    before = d.eval_count
    level = _current_logf(state, d) + state.rng.log_uniform01()
    uniform = state.rng.uniform
    for it in range(1, cfg.max_iter + 1):
        x = uniform(st, ed)
        lf = d.log_eval(x)
        if lf > level:
            return _finish(state, x, lf, d.eval_count - before, it)
        if x < x0:
            st = x
        elif x > x0:
            ed = x
        else:
            return _finish(state, x0, state.logf, d.eval_count - before, it)
        if trace is not None:
            trace(st, ed, x0)
    return _finish(state, x0, state.logf, d.eval_count - before, cfg.max_iter, max_iter_hit=True)


def _slice_transformed(state, d, cfg, tf, trace):
    # The shipped MATLAB listing writes log(A*r*(r-1)), whose argument is
    # negative; log(A*r*(1-r)) is the intended correction. We add log(dx/dp)
    # = log A - log r - log(1-r) instead; it differs from the C listing's
    # -log(A*r*(1-r)) only by the constant 2 log A, which cancels.
    x0 = state.x
    try:
        r = tf.shrink(x0)
        jac0 = tf.log_jacobian(r)
    except DomainError as exc:
        raise StateError(
            f"x={x0!r} is outside the representable range of the map (scale {tf.scale}); "
            "rescale x or increase the scale"
        ) from exc
    before = d.eval_count
    level = _current_logf(state, d) + jac0 + state.rng.log_uniform01()
    st, ed = 0.0, 1.0
    lo, hi = P_GUARD, 1.0 - P_GUARD
    uniform = state.rng.uniform
    expand = tf.expand
    log_jacobian = tf.log_jacobian
    for it in range(1, cfg.max_iter + 1):
        rnew = uniform(st, ed)
        if lo < rnew < hi:
            xnew = expand(rnew)
            lf = d.log_eval(xnew) if d.in_support(xnew) else _NEG_INF
            if lf + log_jacobian(rnew) > level:
                return _finish(state, xnew, lf, d.eval_count - before, it)
        if rnew > r:
            ed = rnew
        elif rnew < r:
            st = rnew
        else:
            return _finish(state, x0, state.logf, d.eval_count - before, it)
        if trace is not None:
            trace(st, ed, r)
    return _finish(state, x0, state.logf, d.eval_count - before, cfg.max_iter, max_iter_hit=True)


def slice_unbounded(state, d, cfg, trace=None):
    """One update of x on the real line through p = sigmoid(x / A).

    ``trace(st, ed, r)`` is called after every shrink step.
    """
    if d.support is not Support.REAL_LINE:
        raise StateError("unbounded sampling needs a target supported on the real line")
    if not math.isfinite(state.x):
        raise StateError(f"non-finite state x={state.x!r}")
    return _slice_transformed(state, d, cfg, Transform.scaled_sigmoid(cfg.a_scale), trace)


def slice_positive(state, d, cfg, trace=None):
    """One update of x > 0 through p = x / (1 + x)."""
    if not (state.x > 0 and math.isfinite(state.x)):
        raise StateError(f"positive sampling needs x > 0, got {state.x!r}")
    return _slice_transformed(state, d, cfg, Transform.positive_ratio(), trace)


def stepping_out(state, d, cfg, trace=None):
    """Neal's stepping-out interval search, then shrinkage.

    Every evaluation, including interval-end checks, counts toward n_evals.
    """
    x0 = state.x
    if not math.isfinite(x0):
        raise StateError(f"non-finite state x={x0!r}")
    before = d.eval_count
    rng = state.rng
    w = cfg.width
    level = _current_logf(state, d) + rng.log_uniform01()
    left = x0 - w * rng.random()
    right = left + w
    capped = False

    def above(z):
        return d.in_support(z) and d.log_eval(z) > level

    k = 0
    while above(left):
        if k == cfg.max_stepout:
            capped = True
            break
        left -= w
        k += 1
    k = 0
    while above(right):
        if k == cfg.max_stepout:
            capped = True
            break
        right += w
        k += 1

    for it in range(1, cfg.max_iter + 1):
        x = rng.uniform(left, right)
        lf = d.log_eval(x) if d.in_support(x) else _NEG_INF
        if lf > level:
            return _finish(state, x, lf, d.eval_count - before, it, stepout_capped=capped)
        if x < x0:
            left = x
        elif x > x0:
            right = x
        else:
            return _finish(state, x0, state.logf, d.eval_count - before, it, stepout_capped=capped)
        if trace is not None:
            trace(left, right, x0)
    return _finish(
        state, x0, state.logf, d.eval_count - before, cfg.max_iter,
        max_iter_hit=True, stepout_capped=capped,
    )


_KERNELS = {
    Method.BOUNDED: slice_bounded,
    Method.UNBOUNDED: slice_unbounded,
    Method.POSITIVE: slice_positive,
    Method.STEPPING_OUT: stepping_out,
}


def draw(state, d, cfg, trace=None):
    return _KERNELS[cfg.method](state, d, cfg, trace)


def run_chain(d, cfg, x0, n, burn_in=0, thin=1, rng=None):
    """Run ``burn_in + n * thin`` updates and return the n kept records.

    Each kept record carries its own n_evals/n_shrinks; with thin > 1 the
    evaluations of the skipped updates are not attributed to any record.
    """
    if n <= 0:
        raise ArgumentError(f"n must be positive, got {n}")
    if burn_in < 0 or thin < 1:
        raise ArgumentError("burn_in must be >= 0 and thin >= 1")
    x0 = float(x0)
    if not d.in_support(x0):
        raise StateError(f"x0={x0!r} is outside the support of the target")
    state = ChainState(x0, rng if rng is not None else RngStream(cfg.seed))
    kernel = _KERNELS[cfg.method]
    records = []
    total = burn_in + n * thin
    for i in range(total):
        try:
            rec = kernel(state, d, cfg)
        except SliceboxError as exc:
            exc.iteration = i
            exc.args = (f"draw {i}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
            raise
        if i >= burn_in and (i - burn_in) % thin == thin - 1:
            records.append(rec)
    return records
