"""Unnormalized log-densities: builtin experiment targets and parsed expressions."""

import enum
import math

import numpy as np
from scipy import stats

from . import expr
from .errors import DomainError, EvaluationError, LookupFailure


class Support(enum.Enum):
    REAL_LINE = "real"
    POSITIVE_REALS = "positive"


class LogDensity:
    """log f(x) for an unnormalized f, counting every evaluation.

    The counter is not thread-safe; give each chain its own instance
    (see :meth:`fresh`).
    """

    def __init__(self, logf, support=Support.REAL_LINE, name="", ast=None):
        self._logf = logf
        self.support = support
        self.name = name
        self.ast = ast
        self.eval_count = 0

    @classmethod
    def from_expression(cls, text, support=Support.REAL_LINE):
        ast = expr.parse(text)
        folded = expr.fold(ast)
        return cls(lambda x: expr.log_value(folded, x), support, name=text, ast=ast)

    @property
    def is_builtin(self):
        return self.name in BUILTINS and self.ast is None

    def fresh(self):
        """Same density, independent counter."""
        return LogDensity(self._logf, self.support, self.name, self.ast)

    def reset_count(self):
        self.eval_count = 0

    def in_support(self, x):
        if self.support is Support.POSITIVE_REALS:
            return 0.0 < x < math.inf
        return math.isfinite(x)

    def log_eval(self, x):
        if not self.in_support(x):
            raise DomainError(f"x={x!r} outside the support of {self.name or 'density'}")
        self.eval_count += 1
        v = self._logf(x)
        if v != v:
            raise EvaluationError(f"log density {self.name!r} is NaN at x={x!r}")
        return v

    __call__ = log_eval

    def __repr__(self):
        return f"LogDensity({self.name!r}, support={self.support.value})"


def log_eval(d, x):
    return d.log_eval(x)


# -- builtin targets ----------------------------------------------------------

_LOG_NORM = -0.5 * math.log(2.0 * math.pi)
_LOG_W1 = math.log(0.8)
_LOG_W2 = math.log(0.2)


def _quartic(x):
    return -x * (x - 1.0) * (x - 2.0) * (x - 3.5)


def _gauss500(x):
    d = x - 500.0
    return -d * d / 10.0


def _gauss1000(x):
    d = x - 1000.0
    return -d * d / 100.0


def _gamma51(x):
    return 4.0 * math.log(x) - x


def _gmm(x):
    a = _LOG_W1 - 0.5 * x * x
    d = x - 10.0
    b = _LOG_W2 - 0.5 * d * d
    if a < b:
        a, b = b, a
    return _LOG_NORM + a + math.log1p(math.exp(b - a))


class _Builtin:
    def __init__(self, logf, support, text, cdf=None, sampler=None, grid=None):
        self.logf = logf
        self.support = support
        self.text = text
        # closed-form CDF (vectorized) or None when only quadrature is available
        self.cdf = cdf
        # exact iid sampler: (numpy Generator, n) -> ndarray
        self.sampler = sampler
        # quadrature grid (lo, hi, step) for reference_cdf
        self.grid = grid


def _gmm_cdf(x):
    return 0.8 * stats.norm.cdf(x) + 0.2 * stats.norm.cdf(x, loc=10.0)


def _gmm_sample(gen, n):
    second = gen.random(n) < 0.2
    return gen.standard_normal(n) + np.where(second, 10.0, 0.0)


def _quartic_sample(gen, n):
    # rejection from Uniform[-3, 7]; log f peaks at 3.008 near x = 2.968
    out = []
    bound = 3.01
    while sum(len(o) for o in out) < n:
        xs = gen.uniform(-3.0, 7.0, 4 * n)
        lu = np.log(gen.random(4 * n))
        lf = -xs * (xs - 1.0) * (xs - 2.0) * (xs - 3.5)
        if np.any(lf > bound):
            raise AssertionError("rejection envelope too low")
        out.append(xs[lu < lf - bound])
    return np.concatenate(out)[:n]


BUILTINS = {
    "quartic": _Builtin(
        _quartic, Support.REAL_LINE, "exp(-x*(x-1)*(x-2)*(x-3.5))",
        sampler=_quartic_sample, grid=(-3.0, 7.0, 1e-3),
    ),
    "gauss500": _Builtin(
        _gauss500, Support.REAL_LINE, "exp(-(x-500)^2/10)",
        cdf=stats.norm(500.0, math.sqrt(5.0)).cdf,
        sampler=lambda g, n: g.normal(500.0, math.sqrt(5.0), n),
        grid=(470.0, 530.0, 1e-3),
    ),
    "gauss1000": _Builtin(
        _gauss1000, Support.REAL_LINE, "exp(-(x-1000)^2/100)",
        cdf=stats.norm(1000.0, math.sqrt(50.0)).cdf,
        sampler=lambda g, n: g.normal(1000.0, math.sqrt(50.0), n),
        grid=(900.0, 1100.0, 1e-3),
    ),
    "gamma51": _Builtin(
        _gamma51, Support.POSITIVE_REALS, "x^4*exp(-x)",
        cdf=stats.gamma(5.0).cdf,
        sampler=lambda g, n: g.gamma(5.0, 1.0, n),
        grid=(1e-9, 60.0, 1e-3),
    ),
    "gmm": _Builtin(
        _gmm, Support.REAL_LINE,
        "mixture(0.8, gaussian_logpdf(x, 0, 1), 0.2, gaussian_logpdf(x, 10, 1))",
        cdf=_gmm_cdf, sampler=_gmm_sample, grid=(-10.0, 20.0, 1e-3),
    ),
}


def builtin(name):
    """Fresh LogDensity for a registered target."""
    try:
        b = BUILTINS[name]
    except KeyError:
        raise LookupFailure(
            f"unknown target {name!r}; available: {', '.join(sorted(BUILTINS))}"
        ) from None
    return LogDensity(b.logf, b.support, name=name)


def resolve(spec, support=None):
    """Builtin name, or ``expr:TEXT`` for a parsed expression."""
    if spec.startswith("expr:"):
        return LogDensity.from_expression(spec[5:], support or Support.REAL_LINE)
    return builtin(spec)
