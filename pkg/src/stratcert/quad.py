"""Quadrature over boxes with singular-set excision.

Two engines share one Domain type: seeded Monte Carlo with rejection of
excised points, and tensor Gauss-Legendre for axis-representable excisions.
``integrate_functionals`` evaluates several integrands on the *same* nodes
and returns their joint covariance, which is what lets the verifiers carry
honest error bars through nonlinear combinations of integrals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateDomain, UnsupportedExcision
from .groups import StratifiedGroup

__all__ = [
    "HyperplaneExcision",
    "PointExcision",
    "PairExcision",
    "Domain",
    "QuadratureResult",
    "QuadConfig",
    "integrate_mc",
    "integrate_gl",
    "integrate_functionals",
    "FunctionalEstimate",
    "default_epsilon",
]

_CHUNK = 1 << 18


@dataclass(frozen=True)
class HyperplaneExcision:
    """Keep only |x_col| >= eps (col is a first-stratum coordinate index)."""
    col: int
    eps: float

    def mask(self, pts: np.ndarray) -> np.ndarray:
        return np.abs(pts[:, self.col]) >= self.eps

    def margin(self, center: Sequence[float]) -> float:
        return abs(center[self.col]) - self.eps

    def to_dict(self) -> dict:
        return {"type": "hyperplane", "index": self.col, "epsilon": self.eps}


@dataclass(frozen=True)
class PointExcision:
    """Keep only |x' - center| >= eps over the first-stratum columns."""
    center: tuple
    eps: float

    def mask(self, pts: np.ndarray) -> np.ndarray:
        c = np.asarray(self.center, float)
        d2 = np.sum((pts[:, : c.size] - c) ** 2, axis=1)
        return d2 >= self.eps ** 2

    def margin(self, center: Sequence[float]) -> float:
        c = np.asarray(self.center, float)
        return float(np.linalg.norm(np.asarray(center[: c.size]) - c)) - self.eps

    def to_dict(self) -> dict:
        return {"type": "point", "center": list(self.center),
                "epsilon": self.eps}


@dataclass(frozen=True)
class PairExcision:
    """Keep only |x_A - x_B| >= eps for two equal-size column blocks.

    Used on product groups to excise the diagonal between two particles'
    first-stratum blocks.
    """
    cols_a: tuple
    cols_b: tuple
    eps: float

    def mask(self, pts: np.ndarray) -> np.ndarray:
        diff = pts[:, list(self.cols_a)] - pts[:, list(self.cols_b)]
        return np.sum(diff ** 2, axis=1) >= self.eps ** 2

    def margin(self, center: Sequence[float]) -> float:
        c = np.asarray(center, float)
        dist = float(np.linalg.norm(c[list(self.cols_a)] - c[list(self.cols_b)]))
        return (dist - self.eps) / np.sqrt(2.0)

    def to_dict(self) -> dict:
        return {"type": "pair", "block_a": list(self.cols_a),
                "block_b": list(self.cols_b), "epsilon": self.eps}


def default_epsilon(lo: float, hi: float) -> float:
    """Default excision radius: 5% of the box half-width."""
    return 0.05 * (hi - lo) / 2.0


@dataclass(frozen=True)
class Domain:
    """A box with singular-set excisions, tied to a group for bookkeeping."""

    group: StratifiedGroup
    lo: tuple
    hi: tuple
    excisions: tuple = ()
    label: str = ""

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "excisions", tuple(self.excisions))
        if len(lo) != self.group.topological_dim or len(hi) != len(lo):
            raise ValueError("box bounds must cover every group coordinate")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("box bounds require lo_j < hi_j")
        if any(e.eps <= 0 for e in self.excisions):
            raise ValueError("excision epsilon must be positive")
        if self.excisions:
            rng = np.random.default_rng(0)
            pts = self._sample_box(4096, rng)
            if not np.any(self.accept_mask(pts)):
                raise DegenerateDomain(
                    f"domain {self.label or self.group.name!r} has no "
                    f"admissible volume left after excision")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def box_volume(self) -> float:
        return float(np.prod(np.asarray(self.hi) - np.asarray(self.lo)))

    def _sample_box(self, n: int, rng: np.random.Generator) -> np.ndarray:
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return rng.uniform(lo, hi, size=(n, self.dim))

    def accept_mask(self, pts: np.ndarray) -> np.ndarray:
        mask = np.ones(pts.shape[0], dtype=bool)
        for e in self.excisions:
            mask &= e.mask(pts)
        return mask

    def clears_hyperplane(self, i: int) -> bool:
        """True if {x'_i = 0} cannot meet the domain."""
        if self.lo[i] > 0.0 or self.hi[i] < 0.0:
            return True
        return any(isinstance(e, HyperplaneExcision) and e.col == i
                   for e in self.excisions)

    def excision_margin(self, center: Sequence[float]) -> float:
        """Distance from ``center`` to the nearest excised set (inf if none)."""
        if not self.excisions:
            return np.inf
        return min(e.margin(center) for e in self.excisions)

    def to_dict(self) -> dict:
        return {
            "group": self.group.name,
            "box": [[a, b] for a, b in zip(self.lo, self.hi)],
            "excisions": [e.to_dict() for e in self.excisions],
            "label": self.label,
        }


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    stderr: float
    n_evals: int
    method: str

    def __post_init__(self):
        if not np.isfinite(self.stderr):
            raise ValueError("quadrature error estimate must be finite")
        if self.n_evals <= 0:
            raise ValueError("quadrature must evaluate at least one node")

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr,
                "n_evals": self.n_evals, "method": self.method}


@dataclass(frozen=True)
class QuadConfig:
    """How the verifiers should integrate: engine, effort, seed."""
    method: str = "mc"
    n: int = 200_000
    nodes: int = 12
    seed: int = 0

    @staticmethod
    def from_dict(data: dict | None) -> "QuadConfig":
        data = dict(data or {})
        return QuadConfig(method=data.get("method", "mc"),
                          n=int(data.get("n", 200_000)),
                          nodes=int(data.get("nodes", 12)),
                          seed=int(data.get("seed", 0)))

    def to_dict(self) -> dict:
        out = {"method": self.method, "seed": self.seed}
        if self.method == "mc":
            out["n"] = self.n
        else:
            out["nodes"] = self.nodes
        return out


@dataclass
class FunctionalEstimate:
    """Joint estimate of several integrals over one shared node set."""

    values: np.ndarray
    cov: np.ndarray
    n_evals: int
    method: str

    def qr(self, i: int) -> QuadratureResult:
        return QuadratureResult(float(self.values[i]),
                                float(np.sqrt(max(self.cov[i, i], 0.0))),
                                self.n_evals, self.method)

    def delta(self, value_fn: Callable, grad_fn: Callable) -> tuple[float, float]:
        """Value and first-order (delta method) stderr of a smooth
        combination of the estimated integrals."""
        v = float(value_fn(self.values))
        g = np.asarray(grad_fn(self.values), float)
        var = float(g @ self.cov @ g)
        return v, float(np.sqrt(max(var, 0.0)))


def _eval_on(f, cols, n: int) -> np.ndarray:
    with np.errstate(all="ignore"):
        out = f(cols)
    out = np.asarray(out, float)
    if out.ndim == 0:
        out = np.full(n, float(out))
    return out


def integrate_functionals(fs: Sequence[Callable], dom: Domain,
                          cfg: QuadConfig) -> FunctionalEstimate:
    if cfg.method == "mc":
        return _mc_functionals(fs, dom, cfg.n, cfg.seed)
    if cfg.method == "gl":
        return _gl_functionals(fs, dom, cfg.nodes)
    raise ValueError(f"unknown quadrature method {cfg.method!r}")


def _mc_functionals(fs, dom, n, seed) -> FunctionalEstimate:
    if n < 100:
        raise ValueError("Monte Carlo needs at least 100 samples")
    rng = np.random.default_rng(seed)
    pts = dom._sample_box(n, rng)
    mask = dom.accept_mask(pts)
    n_acc = int(mask.sum())
    if n_acc < max(1, n // 100):
        raise DegenerateDomain(
            f"acceptance rate {n_acc / n:.2%} below 1% on "
            f"{dom.label or dom.group.name}")
    acc = pts[mask]
    cols = [acc[:, j] for j in range(dom.dim)]
    vals = np.stack([_eval_on(f, cols, n_acc) for f in fs])
    est_vol = dom.box_volume * n_acc / n
    means = vals.mean(axis=1)
    centered = vals - means[:, None]
    # conditional-on-acceptance covariance of the estimators
    cov = (centered @ centered.T) / (n_acc - 1) / n_acc * est_vol ** 2
    return FunctionalEstimate(est_vol * means, cov, n_acc, "mc")


def _axis_pieces(dom: Domain) -> list[list[tuple[float, float]]]:
    pieces = [[(a, b)] for a, b in zip(dom.lo, dom.hi)]
    for e in dom.excisions:
        if not isinstance(e, HyperplaneExcision):
            raise UnsupportedExcision(
                f"{type(e).__name__} is not axis-representable; "
                f"use Monte Carlo")
        new = []
        for a, b in pieces[e.col]:
            if a < -e.eps:
                new.append((a, min(b, -e.eps)))
            if b > e.eps:
                new.append((max(a, e.eps), b))
        if not new:
            raise DegenerateDomain(
                f"hyperplane excision empties axis {e.col}")
        pieces[e.col] = new
    return pieces


def _gl_box_value(fs, los, his, nodes: int, d: int) -> np.ndarray:
    t, w = np.polynomial.legendre.leggauss(nodes)
    xs, ws = [], []
    for j in range(d):
        half = 0.5 * (his[j] - los[j])
        xs.append(los[j] + half * (t + 1.0))
        ws.append(w * half)
    total = nodes ** d
    acc = np.zeros(len(fs))
    radix = [nodes ** (d - 1 - j) for j in range(d)]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        cols, weight = [], 1.0
        for j in range(d):
            digit = (idx // radix[j]) % nodes
            cols.append(xs[j][digit])
            weight = weight * ws[j][digit]
        for i, f in enumerate(fs):
            acc[i] += float(np.sum(_eval_on(f, cols, idx.size) * weight))
    return acc


def _gl_functionals(fs, dom, nodes) -> FunctionalEstimate:
    d = dom.dim
    if d > 6:
        raise ValueError("tensor Gauss-Legendre is limited to dimension 6")
    if nodes < 2:
        raise ValueError("need at least 2 nodes per axis")
    pieces = _axis_pieces(dom)
    coarse = max(2, nodes // 2)
    fine_vals = np.zeros(len(fs))
    coarse_vals = np.zeros(len(fs))
    n_evals = 0
    for combo in itertools.product(*pieces):
        los = [c[0] for c in combo]
        his = [c[1] for c in combo]
        fine_vals += _gl_box_value(fs, los, his, nodes, d)
        coarse_vals += _gl_box_value(fs, los, his, coarse, d)
        n_evals += nodes ** d
    err = np.abs(fine_vals - coarse_vals)
    return FunctionalEstimate(fine_vals, np.diag(err ** 2), n_evals, "gl")


def integrate_mc(f: Callable, dom: Domain, n: int = 200_000,
                 seed: int = 0) -> QuadratureResult:
    """Seeded Monte Carlo estimate of the integral of f over the domain."""
    return _mc_functionals([f], dom, n, seed).qr(0)


def integrate_gl(f: Callable, dom: Domain, nodes_per_axis: int = 12) -> QuadratureResult:
    """Tensor Gauss-Legendre integral; stderr compares against a coarser
    grid with half the nodes per axis."""
    return _gl_functionals([f], dom, nodes_per_axis).qr(0)
