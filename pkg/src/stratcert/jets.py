"""Forward-mode jets over floats and numpy arrays.

A :class:`Jet` carries a value together with one directional derivative.
Components may themselves be Jets, so nesting two levels propagates exact
second derivatives, three levels third derivatives, and so on.  Every field
in this package is written against the small generic surface defined here
(arithmetic operators plus ``jexp``/``jlog``/``jsqrt``/``jwhere``), which
lets a single closure evaluate on plain floats, on whole numpy batches, and
on arbitrarily nested jets without modification.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Jet",
    "primal",
    "jexp",
    "jlog",
    "jsqrt",
    "jwhere",
    "directional",
]


class Jet:
    """Value plus directional derivative, closed under arithmetic.

    ``__array_ufunc__ = None`` makes numpy return ``NotImplemented`` for
    mixed ``ndarray <op> Jet`` expressions so Python falls back to the
    reflected operators below; without it numpy would try to build object
    arrays element by element.
    """

    __slots__ = ("val", "dot")
    __array_ufunc__ = None

    def __init__(self, val, dot):
        self.val = val
        self.dot = dot

    def __repr__(self):
        return f"Jet({self.val!r}, {self.dot!r})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.dot + other.dot)
        return Jet(self.val + other, self.dot)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val - other.val, self.dot - other.dot)
        return Jet(self.val - other, self.dot)

    def __rsub__(self, other):
        return Jet(other - self.val, -self.dot)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val * other.val,
                       self.dot * other.val + self.val * other.dot)
        return Jet(self.val * other, self.dot * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            inv = 1.0 / other.val
            return Jet(self.val * inv,
                       (self.dot - self.val * inv * other.dot) * inv)
        return Jet(self.val / other, self.dot / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        return Jet(other * inv, -other * inv * inv * self.dot)

    def __neg__(self):
        return Jet(-self.val, -self.dot)

    def __pos__(self):
        return self

    def __pow__(self, q):
        if isinstance(q, Jet):
            raise TypeError("jet-valued exponents are not supported")
        if q == 0:
            return Jet(self.val ** 0, self.dot * 0.0)
        if q == 1:
            return self
        return Jet(self.val ** q, (q * self.val ** (q - 1)) * self.dot)

    def __abs__(self):
        # sign() of the primal is locally constant, hence a plain factor
        return Jet(abs(self.val), np.sign(primal(self.val)) * self.dot)

    # -- comparisons act on primal values ---------------------------------

    def __lt__(self, other):
        return primal(self) < primal(other)

    def __le__(self, other):
        return primal(self) <= primal(other)

    def __gt__(self, other):
        return primal(self) > primal(other)

    def __ge__(self, other):
        return primal(self) >= primal(other)

    # -- transcendental helpers (used via the module-level functions) -----

    def exp(self):
        e = jexp(self.val)
        return Jet(e, e * self.dot)

    def log(self):
        return Jet(jlog(self.val), self.dot / self.val)

    def sqrt(self):
        s = jsqrt(self.val)
        return Jet(s, self.dot / (2.0 * s))


def primal(x):
    """Strip all jet layers and return the underlying float or array."""
    while isinstance(x, Jet):
        x = x.val
    return x


def jexp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def jlog(x):
    return x.log() if isinstance(x, Jet) else np.log(x)


def jsqrt(x):
    return x.sqrt() if isinstance(x, Jet) else np.sqrt(x)


def jwhere(cond, a, b):
    """Elementwise select that descends into jets.

    ``cond`` must be a plain boolean (array); it normally comes from
    comparing primal values.  The untaken branch contributes neither value
    nor derivative, so masked-off garbage (inf/nan from guarded regions)
    never leaks through.
    """
    if isinstance(a, Jet) or isinstance(b, Jet):
        av, ad = (a.val, a.dot) if isinstance(a, Jet) else (a, 0.0)
        bv, bd = (b.val, b.dot) if isinstance(b, Jet) else (b, 0.0)
        return Jet(jwhere(cond, av, bv), jwhere(cond, ad, bd))
    return np.where(cond, a, b)


def directional(f, coords, direction):
    """Directional derivative of ``f`` at ``coords`` along ``direction``.

    ``coords`` and ``direction`` are sequences of scalar-likes at the same
    nesting level; seeding one extra jet level gives the derivative in a
    single evaluation.  A constant ``f`` legitimately returns a plain
    number, in which case the derivative is zero.
    """
    seeded = [Jet(c, d) for c, d in zip(coords, direction)]
    out = f(seeded)
    if isinstance(out, Jet):
        return out.dot
    return 0.0
