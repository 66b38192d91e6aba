"""Density expressions: a small recursive-descent parser, printer and evaluator.

An expression denotes an unnormalized density f(x) in the free variable
``x``.  Grammar, lowest precedence first::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?          # right-associative
    primary := NUMBER | 'x' | NAME '(' args ')' | '(' expr ')'

Functions: ``exp(a)``, ``log(a)``, ``abs(a)``, ``gaussian_logpdf(a, mu, sigma)``
(the log of a normal density) and ``mixture(w1, g1, w2, g2, ...)``, whose
value is sum_i w_i * exp(g_i) with each g_i a log-density.  Exponents must be
constant.

``log_value`` evaluates log f(x) without ever forming f(x) for products,
quotients, powers, sums, exponentials and mixtures, so ``exp(-(x-1000)^2/100)``
stays finite at x = 0.
"""

import math
import re
from dataclasses import dataclass

from .errors import ArgumentError, ArityError, EvaluationError, ParseError, UnknownIdentifierError

__all__ = [
    "Num", "Var", "Neg", "BinOp", "Pow", "Call",
    "parse", "to_text", "fold", "value", "log_value", "is_constant",
]

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


# name -> (min args, max args)
_FUNCTIONS = {
    "exp": (1, 1),
    "log": (1, 1),
    "abs": (1, 1),
    "gaussian_logpdf": (3, 3),
    "mixture": (2, None),
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if tok == "**":
                tok = "^"
            tokens.append((kind, tok, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op, what):
        kind, tok, pos = self.peek()
        if tok != op or kind != "op":
            found = "end of input" if kind == "end" else repr(tok)
            raise ParseError(f"expected {what}, found {found}", pos, self.text)
        self.advance()

    def parse(self):
        node = self.expr()
        kind, tok, pos = self.peek()
        if kind != "end":
            raise ParseError(f"expected operator or end of input, found {tok!r}", pos, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, tok, _ = self.peek()
        if kind == "op" and tok == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        kind, tok, pos = self.peek()
        if kind == "op" and tok == "^":
            self.advance()
            exponent = self.unary()
            if not is_constant(exponent):
                raise ParseError("exponent must be constant", pos + 1, self.text)
            return Pow(base, exponent)
        return base

    def primary(self):
        kind, tok, pos = self.advance()
        if kind == "num":
            return Num(float(tok))
        if kind == "name":
            if tok == "x":
                return Var()
            if tok not in _FUNCTIONS:
                raise UnknownIdentifierError(f"unknown identifier {tok!r}", pos, self.text)
            self.expect("(", f"'(' after {tok}")
            args = [self.expr()]
            while self.peek()[1] == "," and self.peek()[0] == "op":
                self.advance()
                args.append(self.expr())
            self.expect(")", "',' or ')'")
            _check_arity(tok, len(args), pos, self.text)
            return Call(tok, tuple(args))
        if kind == "op" and tok == "(":
            node = self.expr()
            self.expect(")", "')'")
            return node
        found = "end of input" if kind == "end" else repr(tok)
        raise ParseError(f"expected number, 'x', function or '(', found {found}", pos, self.text)


def _check_arity(name, n, pos, text):
    lo, hi = _FUNCTIONS[name]
    if n < lo or (hi is not None and n > hi):
        want = str(lo) if lo == hi else f"at least {lo}"
        raise ArityError(f"{name} takes {want} argument(s), got {n}", pos, text)
    if name == "mixture" and n % 2:
        raise ArityError("mixture takes (weight, log-density) pairs", pos, text)


def parse(text):
    """Parse ``text`` into an expression tree."""
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression", 0, text or "")
    if not text.isascii():
        bad = next(i for i, c in enumerate(text) if not c.isascii())
        raise ParseError("non-ASCII character", bad, text)
    return _Parser(text).parse()


def is_constant(node):
    if isinstance(node, Var):
        return False
    if isinstance(node, Num):
        return True
    if isinstance(node, Neg):
        return is_constant(node.operand)
    if isinstance(node, BinOp):
        return is_constant(node.left) and is_constant(node.right)
    if isinstance(node, Pow):
        return is_constant(node.base)
    return all(is_constant(a) for a in node.args)


# -- printing ---------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC_ADD if node.op in "+-" else _PREC_MUL
    if isinstance(node, Neg) or (isinstance(node, Num) and _is_negative(node.value)):
        return _PREC_UNARY
    if isinstance(node, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _is_negative(v):
    return math.copysign(1.0, v) < 0


def _num_text(v):
    if not math.isfinite(v):
        raise ArgumentError(f"cannot print non-finite constant {v!r}")
    a = abs(v)
    if a.is_integer() and a < 1e15:
        return str(int(a))
    return repr(a)


def to_text(node):
    """Render a tree as text that parses back to the same tree."""
    if isinstance(node, Num):
        s = _num_text(node.value)
        return "-" + s if _is_negative(node.value) else s
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _PREC_UNARY)
    if isinstance(node, BinOp):
        p = _prec(node)
        left = _wrap(node.left, p)
        right = _wrap(node.right, p + 1)
        return f"{left} {node.op} {right}"
    if isinstance(node, Pow):
        return f"{_wrap(node.base, _PREC_ATOM)}^{_wrap(node.exponent, _PREC_UNARY)}"
    return f"{node.name}({', '.join(to_text(a) for a in node.args)})"


def _wrap(node, min_prec):
    s = to_text(node)
    return f"({s})" if _prec(node) < min_prec else s


# -- evaluation -------------------------------------------------------------


def _fail(node, what):
    raise EvaluationError(f"{what} in subexpression '{to_text(node)}'")


def value(node, x):
    """Plain floating-point value of the expression at x."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -value(node.operand, x)
    if isinstance(node, BinOp):
        a = value(node.left, x)
        b = value(node.right, x)
        op = node.op
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif b == 0.0:
            if a == 0.0 or math.isnan(a):
                _fail(node, "0/0")
            r = math.copysign(math.inf, a) * math.copysign(1.0, b)
        else:
            r = a / b
        if math.isnan(r):
            _fail(node, "NaN")
        return r
    if isinstance(node, Pow):
        a = value(node.base, x)
        c = value(node.exponent, x)
        try:
            r = math.pow(a, c)
        except OverflowError:
            r = math.inf
        except ValueError:
            _fail(node, f"undefined power {a!r}^{c!r}")
        return r
    name, args = node.name, node.args
    if name == "exp":
        a = value(args[0], x)
        return math.exp(a) if a < 709.0 else math.inf
    if name == "log":
        a = value(args[0], x)
        if a < 0 or math.isnan(a):
            _fail(node, f"log of {a!r}")
        return math.log(a) if a > 0 else -math.inf
    if name == "abs":
        return abs(value(args[0], x))
    if name == "gaussian_logpdf":
        return _gauss_logpdf(node, *(value(a, x) for a in args))
    lv = log_value(node, x)
    return math.exp(lv) if lv < 709.0 else math.inf


def _gauss_logpdf(node, a, mu, sigma):
    if not sigma > 0:
        _fail(node, f"non-positive sigma {sigma!r}")
    z = (a - mu) / sigma
    r = -0.5 * z * z - math.log(sigma) - _HALF_LOG_2PI
    if math.isnan(r):
        _fail(node, "NaN")
    return r


_NEG_INF = -math.inf


def _signed_add(s1, l1, s2, l2):
    """(sign, log|.|) of s1*e^l1 + s2*e^l2."""
    if s1 == 0:
        return s2, l2
    if s2 == 0:
        return s1, l1
    if l1 < l2:
        s1, l1, s2, l2 = s2, l2, s1, l1
    if l1 == math.inf:
        if l2 == math.inf and s1 != s2:
            return None
        return s1, l1
    d = math.exp(l2 - l1)
    if s1 == s2:
        return s1, l1 + math.log1p(d)
    if d == 1.0:
        return 0, _NEG_INF
    return s1, l1 + math.log1p(-d)


def _from_value(v):
    if v > 0:
        return 1, math.log(v)
    if v < 0:
        return -1, math.log(-v)
    if v == 0:
        return 0, _NEG_INF
    return None


def _slog(node, x):
    """(sign, log|value|) of node at x; sign 0 means the value is zero."""
    if isinstance(node, Num):
        return _from_value(node.value)
    if isinstance(node, Var):
        return _from_value(x)
    if isinstance(node, Neg):
        s, lg = _slog(node.operand, x)
        return -s, lg
    if isinstance(node, BinOp):
        s1, l1 = _slog(node.left, x)
        s2, l2 = _slog(node.right, x)
        op = node.op
        if op in "+-":
            if op == "-":
                s2 = -s2
            out = _signed_add(s1, l1, s2, l2)
            if out is None:
                _fail(node, "inf - inf")
            return out
        if op == "*":
            if (s1 == 0 and l2 == math.inf) or (s2 == 0 and l1 == math.inf):
                _fail(node, "0 * inf")
            if s1 == 0 or s2 == 0:
                return 0, _NEG_INF
            return s1 * s2, l1 + l2
        if s2 == 0:
            if s1 == 0:
                _fail(node, "0/0")
            return s1, math.inf
        if l1 == math.inf and l2 == math.inf:
            _fail(node, "inf/inf")
        if s1 == 0:
            return 0, _NEG_INF
        return s1 * s2, l1 - l2
    if isinstance(node, Pow):
        c = value(node.exponent, x)
        s, lg = _slog(node.base, x)
        if c == 0:
            return 1, 0.0
        if s == 0:
            return (0, _NEG_INF) if c > 0 else (1, math.inf)
        if s < 0:
            if c != int(c):
                _fail(node, f"negative base to non-integer power {c!r}")
            s = -1 if int(c) % 2 else 1
        return s, c * lg
    name, args = node.name, node.args
    if name == "exp":
        return 1, value(args[0], x)
    if name == "abs":
        s, lg = _slog(args[0], x)
        return abs(s), lg
    if name == "log":
        s, lg = _slog(args[0], x)
        if s < 0:
            _fail(node, "log of a negative value")
        if s == 0:
            return -1, math.inf
        return _from_value(lg)
    if name == "mixture":
        terms = []
        for w_node, g_node in zip(args[::2], args[1::2]):
            w = value(w_node, x)
            if not w >= 0:
                _fail(node, f"negative mixture weight {w!r}")
            if w > 0:
                terms.append(math.log(w) + value(g_node, x))
        if not terms:
            return 0, _NEG_INF
        m = max(terms)
        if m == _NEG_INF:
            return 0, _NEG_INF
        if m == math.inf:
            return 1, math.inf
        return 1, m + math.log(math.fsum(math.exp(t - m) for t in terms))
    out = _from_value(value(node, x))
    if out is None:
        _fail(node, "NaN")
    return out


def log_value(node, x):
    """log f(x) for the density denoted by ``node``; -inf where f(x) = 0."""
    s, lg = _slog(node, x)
    if s < 0:
        _fail(node, "negative density")
    if s == 0:
        return _NEG_INF
    if math.isnan(lg):
        _fail(node, "NaN")
    return lg


def fold(node):
    """Replace every x-free subtree by its constant value."""
    if isinstance(node, (Num, Var)):
        return node
    if is_constant(node):
        v = value(node, 0.0)
        if not math.isfinite(v):
            return node
        return Num(v)
    if isinstance(node, Neg):
        return Neg(fold(node.operand))
    if isinstance(node, BinOp):
        return BinOp(node.op, fold(node.left), fold(node.right))
    if isinstance(node, Pow):
        return Pow(fold(node.base), fold(node.exponent))
    return Call(node.name, tuple(fold(a) for a in node.args))

