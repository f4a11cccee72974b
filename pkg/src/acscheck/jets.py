"""Forward-mode jets: scalars carrying exact first and second partials.

Arithmetic on jets propagates derivatives through the chain rule, so any
quantity composed from the supported operations comes out with
machine-precision partials at the evaluation point.  Order 1 carries a
gradient, order 2 adds a symmetric Hessian; storage is dense, sized for the
small chart dimensions this package works with.

The order-1 and order-2 code paths use textually identical value/gradient
formulas, so truncating an order-2 result reproduces the order-1 result
bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Jet",
    "Jet1",
    "Jet2",
    "JetDomainError",
    "constant",
    "seed_variable",
    "jet_apply",
    "power",
    "sin",
    "cos",
    "exp",
    "log",
    "sqrt",
    "tanh",
]


class JetDomainError(ValueError):
    """An operation left its real domain (division by zero, log(-1), ...)."""


@dataclass(frozen=True, eq=False)
class Jet1:
    """Value plus gradient with respect to the chart coordinates."""

    value: float
    partials: np.ndarray

    @property
    def n(self) -> int:
        return self.partials.shape[0]

    def truncate(self) -> "Jet1":
        return self

    def __neg__(self) -> "Jet1":
        return Jet1(-self.value, -self.partials)

    def __add__(self, other) -> "Jet1":
        o = _lift(other, self)
        return Jet1(self.value + o.value, self.partials + o.partials)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet1":
        o = _lift(other, self)
        return Jet1(self.value - o.value, self.partials - o.partials)

    def __rsub__(self, other) -> "Jet1":
        return _lift(other, self).__sub__(self)

    def __mul__(self, other) -> "Jet1":
        o = _lift(other, self)
        return Jet1(
            self.value * o.value,
            self.value * o.partials + o.value * self.partials,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet1":
        return self * _recip(_lift(other, self))

    def __rtruediv__(self, other) -> "Jet1":
        return _lift(other, self) * _recip(self)

    def __pow__(self, other) -> "Jet1":
        return power(self, other)


@dataclass(frozen=True, eq=False)
class Jet2:
    """Value, gradient and symmetric Hessian."""

    value: float
    partials: np.ndarray
    hessian: np.ndarray

    @property
    def n(self) -> int:
        return self.partials.shape[0]

    def truncate(self) -> Jet1:
        return Jet1(self.value, self.partials)

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.partials, -self.hessian)

    def __add__(self, other) -> "Jet2":
        o = _lift(other, self)
        return Jet2(
            self.value + o.value,
            self.partials + o.partials,
            self.hessian + o.hessian,
        )

    __radd__ = __add__

    def __sub__(self, other) -> "Jet2":
        o = _lift(other, self)
        return Jet2(
            self.value - o.value,
            self.partials - o.partials,
            self.hessian - o.hessian,
        )

    def __rsub__(self, other) -> "Jet2":
        return _lift(other, self).__sub__(self)

    def __mul__(self, other) -> "Jet2":
        o = _lift(other, self)
        # outer(p, q) + outer(q, p) keeps the Hessian exactly symmetric
        return Jet2(
            self.value * o.value,
            self.value * o.partials + o.value * self.partials,
            self.value * o.hessian
            + o.value * self.hessian
            + np.outer(self.partials, o.partials)
            + np.outer(o.partials, self.partials),
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet2":
        return self * _recip(_lift(other, self))

    def __rtruediv__(self, other) -> "Jet2":
        return _lift(other, self) * _recip(self)

    def __pow__(self, other) -> "Jet2":
        return power(self, other)


Jet = Union[Jet1, Jet2]


def constant(value: float, n: int, order: int = 1) -> Jet:
    """Jet of a constant: zero gradient (and zero Hessian at order 2)."""
    if order == 1:
        return Jet1(float(value), np.zeros(n))
    if order == 2:
        return Jet2(float(value), np.zeros(n), np.zeros((n, n)))
    raise ValueError("order must be 1 or 2")


def seed_variable(index: int, value: float, n: int, order: int = 1) -> Jet:
    """Jet of the coordinate variable `index` at the given value."""
    if not 0 <= index < n:
        raise ValueError(f"coordinate index {index} out of range for dimension {n}")
    p = np.zeros(n)
    p[index] = 1.0
    if order == 1:
        return Jet1(float(value), p)
    if order == 2:
        return Jet2(float(value), p, np.zeros((n, n)))
    raise ValueError("order must be 1 or 2")


def _lift(x, like: Jet) -> Jet:
    if isinstance(x, (Jet1, Jet2)):
        if type(x) is not type(like):
            raise TypeError("cannot mix jets of different orders")
        return x
    if isinstance(x, (int, float)):
        if isinstance(like, Jet2):
            return constant(float(x), like.n, order=2)
        return constant(float(x), like.n, order=1)
    raise TypeError(f"cannot use {type(x).__name__} as a jet operand")


def _chain(u: Jet, f: float, df: float, d2f: float) -> Jet:
    """Jet of a smooth unary function applied to `u`."""
    if isinstance(u, Jet2):
        return Jet2(
            f,
            df * u.partials,
            df * u.hessian + d2f * np.outer(u.partials, u.partials),
        )
    return Jet1(f, df * u.partials)


def _recip(u: Jet) -> Jet:
    v = u.value
    if v == 0.0:
        raise JetDomainError("division by zero")
    return _chain(u, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))


def _is_derivative_free(u: Jet) -> bool:
    if isinstance(u, Jet2):
        return bool(np.all(u.partials == 0.0) and np.all(u.hessian == 0.0))
    return bool(np.all(u.partials == 0.0))


def power(base: Jet, exponent) -> Jet:
    """base ** exponent.

    Integer exponents work on any base; non-integer exponents require a
    strictly positive base.  A jet exponent with nonzero derivatives goes
    through exp(exponent * log(base)) and therefore also needs base > 0.
    """
    if isinstance(exponent, (Jet1, Jet2)):
        if _is_derivative_free(exponent):
            return _const_power(base, exponent.value)
        if base.value <= 0.0:
            raise JetDomainError("variable exponent requires positive base")
        return exp(exponent * log(base))
    return _const_power(base, float(exponent))


def _const_power(u: Jet, k: float) -> Jet:
    v = u.value
    if k == round(k):
        ki = int(round(k))
        if ki == 0:
            return _chain(u, 1.0, 0.0, 0.0)
        if ki == 1:
            return _chain(u, v, 1.0, 0.0)
        if v == 0.0 and ki < 0:
            raise JetDomainError("zero base with negative exponent")
        if v == 0.0:
            # ki >= 2: value and first derivative vanish; second survives at ki == 2
            return _chain(u, 0.0, 0.0, 2.0 if ki == 2 else 0.0)
        return _chain(u, v**ki, ki * v ** (ki - 1), ki * (ki - 1) * v ** (ki - 2))
    if v <= 0.0:
        raise JetDomainError("non-integer exponent requires positive base")
    return _chain(u, v**k, k * v ** (k - 1.0), k * (k - 1.0) * v ** (k - 2.0))


def sin(u: Jet) -> Jet:
    s, c = math.sin(u.value), math.cos(u.value)
    return _chain(u, s, c, -s)


def cos(u: Jet) -> Jet:
    s, c = math.sin(u.value), math.cos(u.value)
    return _chain(u, c, -s, -c)


def exp(u: Jet) -> Jet:
    f = math.exp(u.value)
    if not math.isfinite(f):
        raise JetDomainError("exp overflow")
    return _chain(u, f, f, f)


def log(u: Jet) -> Jet:
    v = u.value
    if v <= 0.0:
        raise JetDomainError("log of non-positive value")
    return _chain(u, math.log(v), 1.0 / v, -1.0 / (v * v))


def sqrt(u: Jet) -> Jet:
    v = u.value
    if v <= 0.0:
        raise JetDomainError("sqrt of non-positive value")
    s = math.sqrt(v)
    return _chain(u, s, 0.5 / s, -0.25 / (s * v))


def tanh(u: Jet) -> Jet:
    t = math.tanh(u.value)
    sech2 = 1.0 - t * t
    return _chain(u, t, sech2, -2.0 * t * sech2)


_UNARY = {
    "neg": lambda u: -u,
    "sin": sin,
    "cos": cos,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "tanh": tanh,
}

_BINARY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "pow": power,
}


def jet_apply(op: str, args: Sequence[Jet]) -> Jet:
    """Apply a named operation to jets, checking arity."""
    if op in _UNARY:
        if len(args) != 1:
            raise ValueError(f"{op} expects 1 argument, got {len(args)}")
        return _UNARY[op](args[0])
    if op in _BINARY:
        if len(args) != 2:
            raise ValueError(f"{op} expects 2 arguments, got {len(args)}")
        return _BINARY[op](args[0], args[1])
    raise ValueError(f"unknown jet operation {op!r}")
