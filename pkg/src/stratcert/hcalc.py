"""Horizontal derivatives of scalar fields via nested forward jets.

Every operation takes coordinates either as a Point / flat sequence of
floats (pointwise API, returns a float) or as a list of equally shaped numpy
columns (batch API, returns an array).  Fields must be written generically:
arithmetic plus the helpers from :mod:`stratcert.jets`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (ConfigError, NonFiniteEvaluation, NonSmoothPoint,
                     SmoothnessViolation)
from .groups import Point, StratifiedGroup
from .jets import directional, jexp, jwhere, primal

__all__ = [
    "ScalarField",
    "HorizontalVectorField",
    "apply_field",
    "second_field",
    "horizontal_gradient",
    "horizontal_divergence",
    "sub_laplacian",
    "anisotropic_p_sublaplacian",
    "bump_field",
    "gauss_field",
    "power_field",
    "poly_field",
    "constant_field",
    "field_from_spec",
    "EPS_SMOOTH",
]

EPS_SMOOTH = 1e-10


@dataclass
class ScalarField:
    """A pure map from group coordinates to a scalar, generic over jets.

    ``smoothness`` ("C1" or "C2") and ``sign`` ("nonnegative", "positive",
    "unrestricted") are declarations trusted by callers; sign declarations
    are spot-checked at sample points by the verifiers that rely on them.
    """

    fn: Callable
    name: str = "field"
    smoothness: str = "C2"
    sign: str = "unrestricted"
    compact_support: bool = False

    def __call__(self, x):
        return self.fn(x)


@dataclass
class HorizontalVectorField:
    """A first-stratum vector field given by one scalar component per X_k."""

    components: tuple

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]


def _fn(f):
    return f.fn if isinstance(f, ScalarField) else f


def _cols(G: StratifiedGroup, x) -> list:
    """Normalize a pointwise argument to a list of float64 scalars."""
    if isinstance(x, Point):
        if x.group.topological_dim != G.topological_dim:
            raise ValueError("point does not match the group dimension")
        x = x.coords
    if len(x) != G.topological_dim:
        raise ValueError(f"expected {G.topological_dim} coordinates, "
                         f"got {len(x)}")
    return [np.float64(c) for c in x]


def _as_float(value, what: str) -> float:
    out = float(primal(value))
    if not np.isfinite(out):
        raise NonFiniteEvaluation(f"{what} evaluated to {out}")
    return out


def apply_cols(G: StratifiedGroup, k: int, f, cols: Sequence):
    """Batch X_k f on coordinate columns (no finiteness check)."""
    fn = _fn(f)
    return directional(fn, cols, G.coeff_vector(k, cols))


def second_cols(G: StratifiedGroup, k: int, f, cols: Sequence):
    """Batch X_k(X_k f) via one nested jet level."""
    fn = _fn(f)

    def xk(y):
        return directional(fn, y, G.coeff_vector(k, y))

    return directional(xk, cols, G.coeff_vector(k, cols))


def apply_field(G: StratifiedGroup, k: int, f, x) -> float:
    """(X_k f)(x): derivative of f along the k-th first-stratum field."""
    return _as_float(apply_cols(G, k, f, _cols(G, x)), f"X_{k} f")


def second_field(G: StratifiedGroup, k: int, f, x) -> float:
    """(X_k^2 f)(x); requires f declared C2."""
    if isinstance(f, ScalarField) and f.smoothness == "C1":
        raise SmoothnessViolation(
            f"field {f.name!r} is declared C1; X_k^2 needs C2")
    return _as_float(second_cols(G, k, f, _cols(G, x)), f"X_{k}^2 f")


def horizontal_gradient(G: StratifiedGroup, f, x) -> np.ndarray:
    cols = _cols(G, x)
    return np.array([_as_float(apply_cols(G, k, f, cols), f"X_{k} f")
                     for k in range(G.first_stratum_dim)])


def horizontal_divergence(G: StratifiedGroup, V: HorizontalVectorField, x) -> float:
    if len(V) != G.first_stratum_dim:
        raise ValueError(f"vector field has {len(V)} components, first "
                         f"stratum has dimension {G.first_stratum_dim}")
    cols = _cols(G, x)
    return sum(_as_float(apply_cols(G, k, V[k], cols), f"X_{k} V_{k}")
               for k in range(G.first_stratum_dim))


def sub_laplacian(G: StratifiedGroup, f, x) -> float:
    """Sum of X_k^2 f over the first stratum."""
    if isinstance(f, ScalarField) and f.smoothness == "C1":
        raise SmoothnessViolation(
            f"field {f.name!r} is declared C1; the sub-Laplacian needs C2")
    cols = _cols(G, x)
    return sum(_as_float(second_cols(G, k, f, cols), f"X_{k}^2 f")
               for k in range(G.first_stratum_dim))


def grad_squared_cols(G: StratifiedGroup, f, cols: Sequence):
    """Batch |horizontal gradient|^2, the workhorse integrand."""
    total = 0.0
    for k in range(G.first_stratum_dim):
        g = apply_cols(G, k, f, cols)
        total = total + g * g
    return total


def sub_laplacian_cols(G: StratifiedGroup, f, cols: Sequence):
    total = 0.0
    for k in range(G.first_stratum_dim):
        total = total + second_cols(G, k, f, cols)
    return total


def anisotropic_p_sublaplacian(G: StratifiedGroup, p, f, x, *,
                               eps_s: float = EPS_SMOOTH) -> float:
    """Sum of X_i(|X_i f|^{p_i - 2} X_i f), computed through nested jets.

    At points where X_i f vanishes the absolute-value power is singular for
    p_i < 2 (NonSmoothPoint); for p_i > 2 the term extends continuously by
    zero, which is what the guard returns.
    """
    if isinstance(f, ScalarField) and f.smoothness == "C1":
        raise SmoothnessViolation(
            f"field {f.name!r} is declared C1; this operator needs C2")
    pvec = [float(pi) for pi in p]
    if len(pvec) != G.first_stratum_dim:
        raise ValueError("exponent count must match the first stratum")
    cols = _cols(G, x)
    fn = _fn(f)
    total = 0.0
    for i, pi in enumerate(pvec):
        s_here = _as_float(apply_cols(G, i, fn, cols), f"X_{i} f")
        if abs(s_here) < eps_s:
            if pi == 2.0:
                total += _as_float(second_cols(G, i, fn, cols), f"X_{i}^2 f")
                continue
            if pi > 2.0:
                continue
            raise NonSmoothPoint(
                f"|X_{i} f| = {abs(s_here):.2e} < {eps_s:.0e} with "
                f"p_{i} = {pi} < 2")

        def h(y, _i=i, _pi=pi):
            s = directional(fn, y, G.coeff_vector(_i, y))
            return abs(s) ** (_pi - 2.0) * s

        total += _as_float(
            directional(h, cols, G.coeff_vector(i, cols)), "p-sublaplacian term")
    return total


# ---------------------------------------------------------------------------
# built-in field catalog
# ---------------------------------------------------------------------------


def bump_field(center, radius, name: str | None = None) -> ScalarField:
    """Smooth bump exp(1 - 1/(1 - s)) with s = |x-c|^2/r^2, zero outside."""
    c = [float(v) for v in center]
    r = float(radius)
    if r <= 0:
        raise ValueError("bump radius must be positive")

    def fn(x):
        s = 0.0
        for m in range(len(c)):
            t = (x[m] - c[m]) / r
            s = s + t * t
        inside = primal(s) < 1.0
        s_safe = jwhere(inside, s, 0.0)
        val = jexp(1.0 - 1.0 / (1.0 - s_safe))
        return jwhere(inside, val, 0.0)

    return ScalarField(fn, name or f"bump(r={r:g})", smoothness="C2",
                       sign="nonnegative", compact_support=True)


def gauss_field(center, width=1.0, name: str | None = None) -> ScalarField:
    c = [float(v) for v in center]
    w = float(width)

    def fn(x):
        s = 0.0
        for m in range(len(c)):
            t = (x[m] - c[m]) / w
            s = s + t * t
        return jexp(-s)

    return ScalarField(fn, name or "gauss", smoothness="C2", sign="positive")


def power_field(alphas, name: str | None = None) -> ScalarField:
    """Product of |x'_j|^{alpha_j} over the first stratum, via (x^2)^(a/2)."""
    al = [float(a) for a in alphas]

    def fn(x):
        out = 1.0
        for j, a in enumerate(al):
            out = out * (x[j] * x[j]) ** (a / 2.0)
        return out

    return ScalarField(fn, name or "power", smoothness="C2",
                       sign="nonnegative")


def constant_field(value: float) -> ScalarField:
    v = float(value)
    return ScalarField(lambda x: v + 0.0 * x[0], name=f"const({v:g})",
                       sign="nonnegative" if v >= 0 else "unrestricted")


def poly_field(spec: str, name: str | None = None) -> ScalarField:
    """Polynomial from a spec like "2*x0^2*x1 + x2 + -3"."""
    text = spec.replace(" ", "").replace("-", "+-")
    terms = []
    for chunk in filter(None, text.split("+")):
        coef = 1.0
        factors = []
        for factor in chunk.split("*"):
            if not factor:
                raise ConfigError(f"empty factor in polynomial term {chunk!r}")
            if factor[0] == "-" and "x" in factor:
                coef = -coef
                factor = factor[1:]
            if factor.startswith("x"):
                if "^" in factor:
                    var, exp = factor[1:].split("^")
                else:
                    var, exp = factor[1:], "1"
                try:
                    factors.append((int(var), int(exp)))
                except ValueError as e:
                    raise ConfigError(f"bad polynomial factor {factor!r}") from e
            else:
                try:
                    coef *= float(factor)
                except ValueError as e:
                    raise ConfigError(f"bad polynomial factor {factor!r}") from e
        terms.append((coef, factors))
    if not terms:
        raise ConfigError(f"empty polynomial spec {spec!r}")

    def fn(x):
        out = 0.0
        for coef, factors in terms:
            term = coef
            for var, exp in factors:
                term = term * x[var] ** exp
            out = out + term
        return out

    return ScalarField(fn, name or f"poly:{spec}")


def field_from_spec(spec: str, G: StratifiedGroup) -> ScalarField:
    """Catalog lookup: "bump[:c1,..,cd;r]", "power:a1,..,aN", "gauss[:...]",
    "poly:<terms>"."""
    d = G.topological_dim
    N = G.first_stratum_dim
    kind, _, rest = spec.partition(":")
    if kind == "bump":
        if rest:
            c_str, _, r_str = rest.partition(";")
            center = [float(v) for v in c_str.split(",")]
            radius = float(r_str) if r_str else 1.0
        else:
            center, radius = [0.0] * d, 1.0
        if len(center) != d:
            raise ConfigError(f"bump center needs {d} coordinates")
        return bump_field(center, radius)
    if kind == "gauss":
        if rest:
            c_str, _, w_str = rest.partition(";")
            center = [float(v) for v in c_str.split(",")]
            width = float(w_str) if w_str else 1.0
        else:
            center, width = [0.0] * d, 1.0
        if len(center) != d:
            raise ConfigError(f"gauss center needs {d} coordinates")
        return gauss_field(center, width)
    if kind == "power":
        alphas = [float(v) for v in rest.split(",")] if rest else [1.0] * N
        if len(alphas) != N:
            raise ConfigError(f"power field needs {N} exponents")
        return power_field(alphas)
    if kind == "poly":
        if not rest:
            raise ConfigError("poly spec is empty")
        return poly_field(rest)
    raise ConfigError(f"unknown field spec {spec!r}")
