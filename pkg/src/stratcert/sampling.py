"""Seeded sample generation: Halton point sets and test-function suites."""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateDomain
from .groups import StratifiedGroup
from .hcalc import ScalarField, bump_field
from .jets import jexp
from .quad import Domain

__all__ = [
    "halton_points",
    "random_poly_gauss_field",
    "random_nonneg_pair",
    "concave_positive_field",
    "seeded_bump",
    "bump_suite",
]


def halton_points(dom: Domain, n: int, seed: int = 0) -> np.ndarray:
    """n low-discrepancy points inside the domain (excisions respected)."""
    lo = np.asarray(dom.lo)
    hi = np.asarray(dom.hi)
    engine = qmc.Halton(d=dom.dim, scramble=True, seed=seed)
    out = []
    got = 0
    for _ in range(64):
        pts = lo + engine.random(max(n, 256)) * (hi - lo)
        pts = pts[dom.accept_mask(pts)]
        out.append(pts)
        got += pts.shape[0]
        if got >= n:
            break
    if got < n:
        raise DegenerateDomain(
            f"could not place {n} sample points inside "
            f"{dom.label or dom.group.name}")
    return np.concatenate(out)[:n]


def random_poly_gauss_field(lo, hi, rng: np.random.Generator,
                            name: str = "poly*gauss") -> ScalarField:
    """Random quadratic polynomial times a wide Gaussian, O(1) magnitudes."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    d = lo.size
    const = rng.uniform(-1.0, 1.0)
    lin = rng.uniform(-1.0, 1.0, size=d)
    quad = rng.uniform(-0.5, 0.5, size=(d, d))
    center = rng.uniform(lo, hi)
    width = float(np.max(hi - lo)) * rng.uniform(1.0, 2.0)

    def fn(x):
        poly = const
        s = 0.0
        for m in range(d):
            poly = poly + lin[m] * x[m]
            t = (x[m] - center[m]) / width
            s = s + t * t
            for mm in range(m, d):
                poly = poly + quad[m, mm] * x[m] * x[mm]
        return poly * jexp(-s)

    return ScalarField(fn, name=name)


def random_nonneg_pair(G: StratifiedGroup, lo, hi, seed: int):
    """A seeded (u, v) pair with u >= 0 and v >= const > 0 everywhere."""
    rng = np.random.default_rng(seed)
    g1 = random_poly_gauss_field(lo, hi, rng)
    g2 = random_poly_gauss_field(lo, hi, rng)
    floor = rng.uniform(0.5, 1.5)

    u = ScalarField(lambda x: g1.fn(x) ** 2, name=f"u[{seed}]",
                    sign="nonnegative")
    v = ScalarField(lambda x: floor + g2.fn(x) ** 2, name=f"v[{seed}]",
                    sign="positive")
    return u, v


def concave_positive_field(G: StratifiedGroup, lo, hi, seed: int) -> ScalarField:
    """v = a - q |x'|^2 with X_k^2 v = -2q < 0 and v > 0 on the whole box."""
    rng = np.random.default_rng(seed)
    N = G.first_stratum_dim
    q = rng.uniform(0.1, 0.3)
    max_sq = sum(max(lo[j] ** 2, hi[j] ** 2) for j in range(N))
    a = q * max_sq + rng.uniform(0.5, 1.5)

    def fn(x):
        s = 0.0
        for j in range(N):
            s = s + x[j] * x[j]
        return a - q * s

    return ScalarField(fn, name=f"concave[{seed}]", sign="positive")


def seeded_bump(dom: Domain, rng: np.random.Generator, *,
                min_radius_frac: float = 0.1,
                max_radius_frac: float = 0.45) -> ScalarField:
    """A bump whose support stays inside the box and off every excised set."""
    lo = np.asarray(dom.lo)
    hi = np.asarray(dom.hi)
    ext = hi - lo
    min_r = min_radius_frac * float(np.min(ext)) / 2.0
    max_r = max_radius_frac * float(np.min(ext))
    for _ in range(300):
        center = rng.uniform(lo + 0.1 * ext, hi - 0.1 * ext)
        wall = float(np.min(np.minimum(center - lo, hi - center)))
        r = 0.9 * min(wall, dom.excision_margin(center))
        if r >= min_r:
            return bump_field(center, min(r, max_r))
    raise DegenerateDomain(
        f"no room for a bump of radius >= {min_r:g} in "
        f"{dom.label or dom.group.name}")


def bump_suite(dom: Domain, count: int, seed: int) -> list[ScalarField]:
    """``count`` seeded bump variations for the property suites."""
    rng = np.random.default_rng(seed)
    return [seeded_bump(dom, rng) for _ in range(count)]
