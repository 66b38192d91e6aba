"""Summaries of draw sequences: moments, histograms, ESS and KS distance."""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ArgumentError, IntegrationError
from .targets import BUILTINS

# asymptotic Kolmogorov critical values c(alpha); D_crit = c / sqrt(n)
KS_CRITICAL = {0.10: 1.224, 0.05: 1.358, 0.01: 1.628, 0.001: 1.949}


def ks_critical(n, alpha=0.01):
    c = KS_CRITICAL.get(alpha)
    if c is None:
        c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c / math.sqrt(n)


def ks_statistic(samples, cdf):
    """sup |F_n(x) - F(x)| for ascending ``samples``."""
    xs = np.asarray(samples, dtype=float)
    n = xs.size
    if n < 10:
        raise ArgumentError(f"KS needs at least 10 samples, got {n}")
    if np.any(np.diff(xs) < 0):
        raise ArgumentError("samples must be sorted ascending")
    f = np.asarray(cdf(xs), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_test(samples, cdf, alpha=0.01):
    """(statistic, passed) for unsorted samples."""
    xs = np.sort(np.asarray(samples, dtype=float))
    d = ks_statistic(xs, cdf)
    return d, d < ks_critical(xs.size, alpha)


def autocorrelation(xs):
    """Normalized autocorrelation at every lag, via FFT."""
    x = np.asarray(xs, dtype=float)
    n = x.size
    x = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    spec = np.fft.rfft(x, size)
    acov = np.fft.irfft(spec * np.conj(spec), size)[:n]
    if acov[0] <= 0:
        return np.zeros(n)
    return acov / acov[0]


def ess(samples):
    """(ess, act) with Geyer's initial positive sequence estimator.

    act = -1 + 2 * sum of paired autocorrelations rho(2k) + rho(2k+1), summed
    while the pairs stay positive.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 100:
        raise ArgumentError(f"ESS needs at least 100 samples, got {n}")
    if np.all(x == x[0]):
        return 1.0, float(n)
    rho = autocorrelation(x)
    m = (n - 1) // 2
    pairs = rho[0 : 2 * m : 2] + rho[1 : 2 * m : 2]
    nonpos = np.flatnonzero(pairs <= 0)
    k = nonpos[0] if nonpos.size else pairs.size
    act = -1.0 + 2.0 * float(np.sum(pairs[:k]))
    act = min(max(act, 1.0 / n), float(n))
    e = min(max(n / act, 1.0), float(n))
    return e, n / e


class ReferenceCDF:
    """Monotone CDF, either closed form or interpolated from quadrature."""

    def __init__(self, func, kind, grid=None):
        self._func = func
        self.kind = kind
        self.grid = grid

    def __call__(self, x):
        return self._func(x)


def reference_cdf(d, grid=None):
    """CDF of the normalized density ``d``.

    Builtins with a closed form use it. Otherwise the density is integrated
    by the cumulative trapezoid rule on ``grid = (lo, hi, step)``; for
    builtins without a closed form, the registered grid is used.
    """
    spec = BUILTINS.get(d.name) if getattr(d, "is_builtin", False) else None
    if spec is not None and spec.cdf is not None and grid is None:
        return ReferenceCDF(spec.cdf, "closed-form")
    if grid is None:
        if spec is None or spec.grid is None:
            raise ArgumentError("a quadrature grid (lo, hi, step) is required")
        grid = spec.grid
    lo, hi, step = grid
    if not (lo < hi and step > 0):
        raise ArgumentError(f"bad grid {grid}")
    xs = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    lf = np.array([d.log_eval(float(v)) if d.in_support(float(v)) else -np.inf for v in xs])
    if np.any(np.isnan(lf)) or np.any(lf == np.inf):
        raise IntegrationError("log density is not finite on the grid")
    top = np.max(lf)
    if top == -np.inf:
        raise IntegrationError("density vanishes on the whole grid")
    f = np.exp(lf - top)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(xs))])
    total = cum[-1]
    if not np.isfinite(total) or math.log(total) + top < math.log(1e-12):
        raise IntegrationError(f"quadrature mass too small on grid {grid}")
    cdf_vals = cum / total

    def func(x):
        return np.interp(x, xs, cdf_vals, left=0.0, right=1.0)

    return ReferenceCDF(func, "quadrature", grid=(lo, hi, step))


@dataclass
class ReportOptions:
    bins: int = 20
    threshold: float = None
    reference: object = None  # callable CDF
    ks_thin: int = 10
    alpha: float = 0.01


@dataclass
class RunReport:
    n: int
    mean: float
    variance: float
    min: float
    max: float
    mean_evals: float
    mean_shrinks: float
    max_iter_hits: int
    first_evals: int
    histogram: list = field(default_factory=list)
    ess: float = None
    act: float = None
    ks_stat: float = None
    ks_pass: bool = None
    ks_thin: int = None
    mode_occupancy: float = None
    threshold: float = None

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    def to_text(self, title=None):
        rows = []
        if title:
            rows.append(("sampler", title))
        for name in (
            "n", "mean", "variance", "min", "max", "mean_evals", "mean_shrinks",
            "max_iter_hits", "first_evals", "ess", "act", "ks_stat", "ks_pass",
            "mode_occupancy",
        ):
            v = getattr(self, name)
            if v is None:
                continue
            if name == "mode_occupancy":
                name = f"occupancy(x>{self.threshold:g})"
            elif name == "ks_stat":
                name = f"ks_stat(thin={self.ks_thin})"
            rows.append((name, _fmt(v)))
        width = max(len(k) for k, _ in rows)
        lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
        if self.histogram:
            lines.append("histogram:")
            for lo, hi, c in self.histogram:
                lines.append(f"  [{lo:12.6g}, {hi:12.6g})  {c}")
        return "\n".join(lines)


def _fmt(v):
    if isinstance(v, bool) or isinstance(v, int):
        return str(v).lower() if isinstance(v, bool) else str(v)
    return f"{v:.6g}"


def histogram(xs, bins):
    lo, hi = float(np.min(xs)), float(np.max(xs))
    if lo == hi:
        return [(lo, hi, int(len(xs)))]
    counts, edges = np.histogram(xs, bins=bins, range=(lo, hi))
    return [(float(a), float(b), int(c)) for a, b, c in zip(edges[:-1], edges[1:], counts)]


def summarize(records, opts=None):
    """RunReport for a non-empty sequence of DrawRecords."""
    opts = opts or ReportOptions()
    if not records:
        raise ArgumentError("cannot summarize an empty run")
    xs = np.array([r.x for r in records], dtype=float)
    evals = np.array([r.n_evals for r in records], dtype=float)
    shrinks = np.array([r.n_shrinks for r in records], dtype=float)
    n = xs.size
    mean = float(np.mean(xs))
    var = float(np.var(xs, ddof=1)) if n > 1 else 0.0
    rep = RunReport(
        n=n, mean=mean, variance=var, min=float(xs.min()), max=float(xs.max()),
        mean_evals=float(np.mean(evals)), mean_shrinks=float(np.mean(shrinks)),
        max_iter_hits=sum(1 for r in records if getattr(r, "max_iter_hit", False)),
        first_evals=int(records[0].n_evals),
        histogram=histogram(xs, opts.bins),
    )
    if n >= 100:
        rep.ess, rep.act = ess(xs)
    if opts.threshold is not None:
        rep.threshold = float(opts.threshold)
        rep.mode_occupancy = float(np.mean(xs > opts.threshold))
    if opts.reference is not None:
        thinned = xs[opts.ks_thin - 1 :: opts.ks_thin]
        if thinned.size >= 10:
            rep.ks_stat, rep.ks_pass = ks_test(thinned, opts.reference, opts.alpha)
            rep.ks_pass = bool(rep.ks_pass)
            rep.ks_thin = opts.ks_thin
    return rep
