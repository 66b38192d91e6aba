"""Bijections between the unit interval and the sampler's variable space.

``ScaledSigmoid`` maps the real line onto (0, 1) via p = 1 / (1 + exp(-x/A));
``PositiveRatio`` maps (0, inf) onto (0, 1) via p = x / (1 + x). The
log-Jacobian ``log(dx/dp)`` is what turns a density over x into the
equivalent density over p.
"""

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

# expand/log_jacobian refuse p this close to an endpoint
P_GUARD = 1e-15


class Kind(enum.Enum):
    SCALED_SIGMOID = "scaled_sigmoid"
    POSITIVE_RATIO = "positive_ratio"


@dataclass(frozen=True)
class Transform:
    kind: Kind = Kind.SCALED_SIGMOID
    scale: float = 100.0

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise DomainError(f"transform scale must be finite and > 0, got {self.scale}")
        if self.kind is Kind.POSITIVE_RATIO and self.scale != 1.0:
            raise DomainError("PositiveRatio has no scale; rescale x instead")

    @classmethod
    def scaled_sigmoid(cls, scale=100.0):
        return cls(Kind.SCALED_SIGMOID, float(scale))

    @classmethod
    def positive_ratio(cls):
        return cls(Kind.POSITIVE_RATIO, 1.0)

    def shrink(self, x):
        return shrink(x, self)

    def expand(self, p):
        return expand(p, self)

    def log_jacobian(self, p):
        return log_jacobian(p, self)


def _check_p(p):
    if not (P_GUARD < p < 1.0 - P_GUARD):
        raise DomainError(f"p={p!r} is not strictly inside (0, 1)")


def shrink(x, t):
    """Variable space -> (0, 1). Saturates to 0 or 1 for huge |x|."""
    if not math.isfinite(x):
        raise DomainError(f"cannot shrink non-finite x={x!r}")
    if t.kind is Kind.POSITIVE_RATIO:
        if x <= 0:
            raise DomainError(f"PositiveRatio needs x > 0, got {x!r}")
        return x / (1.0 + x)
    z = x / t.scale
    # branch keeps exp() from overflowing
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def expand(p, t):
    """(0, 1) -> variable space; inverse of shrink."""
    _check_p(p)
    if t.kind is Kind.POSITIVE_RATIO:
        return p / (1.0 - p)
    return t.scale * (math.log(p) - math.log1p(-p))


def log_jacobian(p, t):
    """log(dx/dp) evaluated in log space.

    ScaledSigmoid: log A - log p - log(1 - p).  PositiveRatio: -2 log(1 - p).
    """
    _check_p(p)
    if t.kind is Kind.POSITIVE_RATIO:
        return -2.0 * math.log1p(-p)
    return math.log(t.scale) - math.log(p) - math.log1p(-p)
