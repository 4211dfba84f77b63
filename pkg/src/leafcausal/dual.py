"""Forward-mode dual numbers with vector tangents.

A ``Dual`` carries a value and a gradient over all seed directions at once,
so one evaluation of a coefficient function yields every first derivative.
Nesting a Dual inside another yields exact second derivatives (the outer
gradient of the inner gradient is the Hessian row).

Coefficient functions stay engine-agnostic by using the math wrappers at the
bottom of this module (``sin``, ``cosh``, ...): they dispatch on the argument
type, so the same closed-form code runs on floats, numpy arrays (batched
evaluation) and Duals (differentiation).
"""

from __future__ import annotations

import math

import numpy as np


class Dual:
    __slots__ = ("val", "grad")

    def __init__(self, val, grad):
        self.val = val
        # float ndarray at the innermost level, object ndarray of Duals when nested
        self.grad = grad

    def __repr__(self):
        return f"Dual({self.val!r}, {self.grad!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.grad + other.grad)
        return Dual(self.val + other, self.grad)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.grad)

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.grad - other.grad)
        return Dual(self.val - other, self.grad)

    def __rsub__(self, other):
        return Dual(other - self.val, -self.grad)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val,
                        self.grad * other.val + other.grad * self.val)
        return Dual(self.val * other, self.grad * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.val
            return Dual(self.val * inv,
                        (self.grad - other.grad * (self.val * inv)) * inv)
        return Dual(self.val / other, self.grad / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        v = other * inv
        return Dual(v, self.grad * (-v * inv))

    def __pow__(self, n):
        if isinstance(n, int):
            if n == 0:
                return Dual(1.0, self.grad * 0.0)
            return Dual(self.val ** n, self.grad * (n * self.val ** (n - 1)))
        return exp(log(self) * n)

    # comparisons act on the primal value (used only for domain checks)
    def __lt__(self, other):
        return self.val < (other.val if isinstance(other, Dual) else other)

    def __gt__(self, other):
        return self.val > (other.val if isinstance(other, Dual) else other)

    def __float__(self):
        raise TypeError("implicit Dual -> float conversion would drop derivatives")


def value(x):
    """Strip all derivative information, returning the primal float."""
    while isinstance(x, Dual):
        x = x.val
    return x


def seed_gradient(x):
    """Lift point coordinates so a function evaluation returns value + gradient."""
    n = len(x)
    return [Dual(float(x[i]), _unit(n, i)) for i in range(n)]


def seed_hessian(x):
    """Doubly lifted coordinates: evaluation returns value, gradient and Hessian."""
    n = len(x)
    out = []
    for i in range(n):
        inner = Dual(float(x[i]), _unit(n, i))
        outer_grad = np.empty(n, dtype=object)
        for j in range(n):
            outer_grad[j] = 1.0 if i == j else 0.0
        out.append(Dual(inner, outer_grad))
    return out


def _unit(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def gradient_parts(y, n):
    """Split a gradient-seeded result into (value, gradient[n])."""
    if not isinstance(y, Dual):
        return float(y), np.zeros(n)
    return float(y.val), np.asarray(y.grad, dtype=float)


def hessian_parts(y, n):
    """Split a Hessian-seeded result into (value, gradient[n], hessian[n, n])."""
    if not isinstance(y, Dual):
        return float(y), np.zeros(n), np.zeros((n, n))
    val, grad = gradient_parts(y.val, n)
    hess = np.zeros((n, n))
    for i in range(n):
        gi = y.grad[i]
        if isinstance(gi, Dual):
            hess[i] = np.asarray(gi.grad, dtype=float)
    return val, grad, 0.5 * (hess + hess.T)


def _wrap(fn_math, fn_np, deriv):
    def wrapped(x):
        if isinstance(x, Dual):
            return Dual(wrapped(x.val), x.grad * deriv(x.val))
        if isinstance(x, np.ndarray):
            return fn_np(x)
        return fn_math(x)
    return wrapped


sin = _wrap(math.sin, np.sin, lambda v: cos(v))
cos = _wrap(math.cos, np.cos, lambda v: -sin(v))
tan = _wrap(math.tan, np.tan, lambda v: 1.0 + tan(v) ** 2)
sinh = _wrap(math.sinh, np.sinh, lambda v: cosh(v))
cosh = _wrap(math.cosh, np.cosh, lambda v: sinh(v))
tanh = _wrap(math.tanh, np.tanh, lambda v: 1.0 - tanh(v) ** 2)
exp = _wrap(math.exp, np.exp, lambda v: exp(v))
log = _wrap(math.log, np.log, lambda v: 1.0 / v)
sqrt = _wrap(math.sqrt, np.sqrt, lambda v: 0.5 / sqrt(v))
