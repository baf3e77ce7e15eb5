"""Stratified group catalog: Euclidean spaces, Heisenberg groups, products.

Points live in global (exponential) coordinates ordered stratum by stratum,
so Lebesgue measure is the Haar measure and the first ``N`` coordinates are
always the first stratum.  Group laws, dilations and field coefficients are
written with plain arithmetic only, so they evaluate on floats, numpy
batches and jets alike.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .jets import directional, jexp

__all__ = [
    "StratifiedGroup",
    "Point",
    "make_euclidean",
    "make_heisenberg",
    "make_product_group",
    "group_inverse",
    "group_from_spec",
    "group_self_test",
]


@dataclass(frozen=True)
class StratifiedGroup:
    """Immutable description of a stratified group in Jacobian coordinates."""

    name: str
    strata_sizes: tuple[int, ...]
    coeff_fn: Callable = field(repr=False)      # (k, coords) -> list of d entries
    compose_fn: Callable = field(repr=False)    # (a, b) -> list
    invert_fn: Callable = field(repr=False)     # a -> list

    @property
    def topological_dim(self) -> int:
        return sum(self.strata_sizes)

    @property
    def first_stratum_dim(self) -> int:
        return self.strata_sizes[0]

    @property
    def step(self) -> int:
        return len(self.strata_sizes)

    @property
    def homogeneous_dim(self) -> int:
        return sum((l + 1) * nl for l, nl in enumerate(self.strata_sizes))

    # -- laws on raw coordinate sequences (generic over scalar type) ------

    def coeff_vector(self, k: int, coords: Sequence) -> list:
        """Coefficient vector of the k-th first-stratum field at ``coords``."""
        if not 0 <= k < self.first_stratum_dim:
            raise IndexError(f"field index {k} outside first stratum "
                             f"of dimension {self.first_stratum_dim}")
        return self.coeff_fn(k, coords)

    def field_coeffs(self, k: int) -> Callable:
        """The coefficient map x -> vector for the k-th field."""
        return lambda coords: self.coeff_vector(k, coords)

    def compose(self, a: Sequence, b: Sequence) -> list:
        self._check_dim(a)
        self._check_dim(b)
        return self.compose_fn(a, b)

    def invert(self, a: Sequence) -> list:
        self._check_dim(a)
        return self.invert_fn(a)

    def dilate(self, lam: float, a: Sequence) -> list:
        """Anisotropic dilation: stratum-l coordinates scale by lam**l."""
        self._check_dim(a)
        out = []
        pos = 0
        for l, nl in enumerate(self.strata_sizes, start=1):
            scale = lam ** l
            out.extend(a[pos + m] * scale for m in range(nl))
            pos += nl
        return out

    def _check_dim(self, a: Sequence) -> None:
        if len(a) != self.topological_dim:
            raise ValueError(f"expected {self.topological_dim} coordinates, "
                             f"got {len(a)}")

    # -- Point-level conveniences ------------------------------------------

    def point(self, coords: Sequence) -> "Point":
        return Point(self, tuple(float(c) for c in coords))

    def identity(self) -> "Point":
        return self.point([0.0] * self.topological_dim)

    def product(self, a: "Point | Sequence", b: "Point | Sequence"):
        pa, pb = isinstance(a, Point), isinstance(b, Point)
        out = self.compose(a.coords if pa else a, b.coords if pb else b)
        return self.point(out) if (pa or pb) else out

    def inverse(self, a: "Point | Sequence"):
        if isinstance(a, Point):
            return self.point(self.invert(a.coords))
        return self.invert(a)

    def first_stratum_slice(self, coords: Sequence) -> list:
        return list(coords[: self.first_stratum_dim])


@dataclass(frozen=True)
class Point:
    """A group element as a coordinate vector partitioned by strata."""

    group: StratifiedGroup
    coords: tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) != self.group.topological_dim:
            raise ValueError(
                f"point has {len(self.coords)} coordinates, group "
                f"{self.group.name} needs {self.group.topological_dim}")

    @property
    def first_stratum(self) -> np.ndarray:
        return np.asarray(self.coords[: self.group.first_stratum_dim], float)

    @property
    def higher_strata(self) -> np.ndarray:
        return np.asarray(self.coords[self.group.first_stratum_dim:], float)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def make_euclidean(N: int) -> StratifiedGroup:
    """Abelian group R^N: one stratum, coordinate addition, unit fields."""
    if N < 1:
        raise ValueError("euclidean dimension must be at least 1")

    def coeff(k, coords):
        return [1.0 if m == k else 0.0 for m in range(N)]

    def compose(a, b):
        return [a[m] + b[m] for m in range(N)]

    def invert(a):
        return [-a[m] for m in range(N)]

    return StratifiedGroup(f"euclidean:{N}", (N,), coeff, compose, invert)


def make_heisenberg(n: int) -> StratifiedGroup:
    """Heisenberg group H^n with the symmetric (polarized) group law.

    Coordinates (x_1..x_n, y_1..y_n, t); the symmetric law makes inversion
    plain negation and keeps every field coefficient polynomial.
    """
    if n < 1:
        raise ValueError("heisenberg index must be at least 1")
    d = 2 * n + 1

    def coeff(k, coords):
        out = [0.0] * d
        out[k] = 1.0
        if k < n:
            out[2 * n] = -0.5 * coords[n + k]
        else:
            out[2 * n] = 0.5 * coords[k - n]
        return out

    def compose(a, b):
        out = [a[m] + b[m] for m in range(2 * n)]
        twist = 0.0
        for i in range(n):
            twist = twist + a[i] * b[n + i] - a[n + i] * b[i]
        out.append(a[2 * n] + b[2 * n] + 0.5 * twist)
        return out

    def invert(a):
        return [-a[m] for m in range(d)]

    return StratifiedGroup(f"heisenberg:{n}", (2 * n, 1), coeff, compose, invert)


def make_product_group(G: StratifiedGroup, n: int) -> StratifiedGroup:
    """n-fold direct product with strata concatenated level by level.

    Component i of stratum l occupies a contiguous block inside the
    product's stratum-l segment, so the product's first stratum is exactly
    the concatenation of the factors' first strata and field (i, k) is the
    k-th field of factor i.
    """
    if n < 1:
        raise ValueError("product multiplicity must be at least 1")

    inner = G.strata_sizes
    strata = tuple(n * nl for nl in inner)
    inner_off = np.cumsum((0,) + inner)[:-1]
    prod_off = np.cumsum((0,) + strata)[:-1]
    d_in = sum(inner)
    d_out = n * d_in
    N_in = inner[0]

    def slots(i):
        # product-coordinate indices of component i, in inner layout order
        idx = []
        for l, nl in enumerate(inner):
            base = prod_off[l] + i * nl
            idx.extend(range(base, base + nl))
        return idx

    slot_table = [slots(i) for i in range(n)]

    def gather(i, coords):
        return [coords[j] for j in slot_table[i]]

    def coeff(k, coords):
        i, kk = divmod(k, N_in)
        c_in = G.coeff_vector(kk, gather(i, coords))
        out = [0.0] * d_out
        for m, j in enumerate(slot_table[i]):
            out[j] = c_in[m]
        return out

    def compose(a, b):
        out = [None] * d_out
        for i in range(n):
            part = G.compose_fn(gather(i, a), gather(i, b))
            for m, j in enumerate(slot_table[i]):
                out[j] = part[m]
        return out

    def invert(a):
        out = [None] * d_out
        for i in range(n):
            part = G.invert_fn(gather(i, a))
            for m, j in enumerate(slot_table[i]):
                out[j] = part[m]
        return out

    return StratifiedGroup(f"product:{G.name}:{n}", strata, coeff, compose, invert)


def group_inverse(G: StratifiedGroup, a):
    """Inverse element; composing with it recovers the identity."""
    return G.inverse(a)


def group_from_spec(spec: str) -> StratifiedGroup:
    """Build a catalog group from "euclidean:N" / "heisenberg:n" /
    "product:<inner>:n"."""
    spec = spec.strip()
    if spec.startswith("euclidean:"):
        return make_euclidean(int(spec.split(":", 1)[1]))
    if spec.startswith("heisenberg:"):
        return make_heisenberg(int(spec.split(":", 1)[1]))
    if spec.startswith("product:"):
        inner_spec, n = spec[len("product:"):].rsplit(":", 1)
        return make_product_group(group_from_spec(inner_spec), int(n))
    raise ValueError(f"unknown group spec {spec!r}")


def _random_smooth_field(d: int, rng: np.random.Generator):
    """Polynomial times Gaussian closure for invariance checks."""
    lin = rng.uniform(-1.0, 1.0, size=d)
    quad = rng.uniform(-0.5, 0.5, size=(d, d))
    center = rng.uniform(-0.5, 0.5, size=d)
    width = rng.uniform(1.5, 3.0)

    def f(x):
        poly = 1.0
        s = 0.0
        for m in range(d):
            poly = poly + lin[m] * x[m]
            s = s + ((x[m] - center[m]) / width) ** 2
            for mm in range(d):
                poly = poly + quad[m, mm] * x[m] * x[mm]
        return poly * jexp(-s)

    return f


def group_self_test(G: StratifiedGroup, n_points: int = 1000,
                    seed: int = 0) -> dict:
    """Max residuals of the defining group identities on random samples.

    Covers associativity, identity/inverse, dilation homomorphism,
    the first-stratum difference rule (x a^-1)' = x' - a', and
    left invariance of every first-stratum field.
    """
    rng = np.random.default_rng(seed)
    d = G.topological_dim
    N = G.first_stratum_dim
    pts = rng.uniform(-1.5, 1.5, size=(3, n_points, d))
    a = [pts[0, :, m] for m in range(d)]
    b = [pts[1, :, m] for m in range(d)]
    c = [pts[2, :, m] for m in range(d)]

    def max_abs(cols):
        return max(float(np.max(np.abs(col))) for col in cols)

    ab = G.compose(a, b)
    res = {}
    res["associativity"] = max_abs(
        [x - y for x, y in zip(G.compose(ab, c), G.compose(a, G.compose(b, c)))])
    res["identity"] = max_abs(
        [x - y for x, y in zip(G.compose(a, [0.0] * d), a)])
    res["inverse"] = max_abs(G.compose(a, G.invert(a)))
    res["dilation"] = max(
        max_abs([x - y for x, y in zip(G.dilate(lam, ab),
                                       G.compose(G.dilate(lam, a),
                                                 G.dilate(lam, b)))])
        for lam in (0.5, 2.0, 3.0))
    diff = G.compose(a, G.invert(b))
    res["first_stratum_difference"] = max_abs(
        [diff[m] - (a[m] - b[m]) for m in range(N)])

    f = _random_smooth_field(d, rng)
    worst = 0.0
    for k in range(N):
        def f_shifted(x, _k=k):
            return f(G.compose(a, x))
        lhs = directional(f_shifted, b, G.coeff_vector(k, b))
        rhs = directional(f, ab, G.coeff_vector(k, ab))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    res["left_invariance"] = worst
    return res
