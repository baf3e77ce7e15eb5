"""First- and second-order Picone expressions and their sampled checks.

The first-order pair (L, R) agrees identically and is nonnegative; the
second-order pair (L1, R1) does the same under the extra hypothesis that
every X_k^2 v is strictly negative.  Evaluation is vectorized over sample
batches; pointwise wrappers raise typed guard errors instead of excluding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (DomainViolation, EmptySample, NonSmoothPoint,
                     SignViolation)
from .groups import Point, StratifiedGroup
from .hcalc import EPS_SMOOTH, ScalarField, apply_cols, second_cols

__all__ = [
    "ExponentVector",
    "PiconePair",
    "IdentityReport",
    "picone_R",
    "picone_L",
    "picone_R1",
    "picone_L1",
    "picone_L_terms",
    "check_picone",
]


@dataclass(frozen=True)
class ExponentVector:
    """Anisotropy exponents p_i > 1 with conjugates q_i = p_i/(p_i-1)."""

    p: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        object.__setattr__(self, "p", p)
        for i, pi in enumerate(p):
            if not pi > 1.0:
                raise ValueError(f"p_i must exceed 1 (p_{i} = {pi})")

    @property
    def q(self) -> tuple:
        return tuple(pi / (pi - 1.0) for pi in self.p)

    def __len__(self):
        return len(self.p)

    def __iter__(self):
        return iter(self.p)

    def __getitem__(self, i):
        return self.p[i]


@dataclass
class PiconePair:
    """A numerator/denominator pair: u nonnegative, v strictly positive."""

    u: ScalarField
    v: ScalarField


@dataclass
class IdentityReport:
    """Sampled-identity outcome with guard-exclusion accounting."""

    max_abs_residual: float
    min_L: float | None
    excluded_count: int
    sample_size: int
    seed: int | None
    verdict: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "max_abs_residual": self.max_abs_residual,
            "min_L": self.min_L,
            "excluded_count": self.excluded_count,
            "sample_size": self.sample_size,
            "seed": self.seed,
            "verdict": self.verdict,
        }
        if self.details:
            out["details"] = self.details
        return out


def _sample_cols(G: StratifiedGroup, sample) -> list:
    if isinstance(sample, np.ndarray):
        pts = np.atleast_2d(np.asarray(sample, float))
    else:
        pts = np.atleast_2d(np.asarray(
            [p.coords if isinstance(p, Point) else p for p in sample], float))
    if pts.shape[1] != G.topological_dim:
        raise ValueError(f"sample has {pts.shape[1]} coordinates per point, "
                         f"group needs {G.topological_dim}")
    return [pts[:, j] for j in range(pts.shape[1])]


def _point_repr(cols, idx: int) -> str:
    return "(" + ", ".join(f"{float(c[idx]):.6g}" for c in cols) + ")"


def _assert_pair(pair: PiconePair, cols) -> tuple[np.ndarray, np.ndarray]:
    with np.errstate(all="ignore"):
        u = np.asarray(pair.u(cols), float)
        v = np.asarray(pair.v(cols), float)
    u = np.broadcast_to(u, cols[0].shape).astype(float)
    v = np.broadcast_to(v, cols[0].shape).astype(float)
    if np.any(v <= 0.0):
        i = int(np.argmax(v <= 0.0))
        raise DomainViolation(
            f"v must be positive: v = {v[i]:.6g} at {_point_repr(cols, i)}")
    if np.any(u < -1e-12):
        i = int(np.argmax(u < -1e-12))
        raise DomainViolation(
            f"u must be nonnegative: u = {u[i]:.6g} at {_point_repr(cols, i)}")
    return np.maximum(u, 0.0), v


def _first_order(G: StratifiedGroup, p: ExponentVector, pair: PiconePair,
                 cols, eps: float):
    N = G.first_stratum_dim
    if len(p) != N:
        raise ValueError("exponent count must match the first stratum")
    u, v = _assert_pair(pair, cols)
    ratio = u / v
    n = cols[0].shape[0]
    L = np.zeros(n)
    R = np.zeros(n)
    L_terms = []
    excluded = np.zeros(n, dtype=bool)
    with np.errstate(all="ignore"):
        for i, pi in enumerate(p):
            Xu = np.asarray(apply_cols(G, i, pair.u, cols), float)
            Xv = np.asarray(apply_cols(G, i, pair.v, cols), float)
            aXv = np.abs(Xv)
            bad = (aXv < eps) & (pi < 2.0)
            excluded |= bad
            aXv = np.where(bad, 1.0, aXv)

            def w(y, _pi=pi):
                return pair.u(y) ** _pi / pair.v(y) ** (_pi - 1.0)

            Xw = np.asarray(apply_cols(G, i, w, cols), float)
            grad_term = np.abs(Xu) ** pi
            Li = (grad_term
                  - pi * ratio ** (pi - 1.0) * aXv ** (pi - 2.0) * Xv * Xu
                  + (pi - 1.0) * ratio ** pi * aXv ** pi)
            Ri = grad_term - Xw * aXv ** (pi - 2.0) * Xv
            L += Li
            R += Ri
            L_terms.append(Li)
    return {"L": L, "R": R, "L_terms": L_terms, "excluded": excluded}


def _second_order(G: StratifiedGroup, p: ExponentVector, pair: PiconePair,
                  cols, eps: float):
    N = G.first_stratum_dim
    if len(p) != N:
        raise ValueError("exponent count must match the first stratum")
    u, v = _assert_pair(pair, cols)
    ratio = u / v
    n = cols[0].shape[0]
    L1 = np.zeros(n)
    R1 = np.zeros(n)
    excluded = np.zeros(n, dtype=bool)
    sign_bad_any = np.zeros(n, dtype=bool)
    u_bad_any = np.zeros(n, dtype=bool)
    smooth_bad_any = np.zeros(n, dtype=bool)
    with np.errstate(all="ignore"):
        for i, pi in enumerate(p):
            Xu = np.asarray(apply_cols(G, i, pair.u, cols), float)
            Xv = np.asarray(apply_cols(G, i, pair.v, cols), float)
            X2u = np.asarray(second_cols(G, i, pair.u, cols), float)
            X2v = np.asarray(second_cols(G, i, pair.v, cols), float)

            sign_bad = X2v >= 0.0
            smooth_bad = (np.abs(X2v) < eps) & (pi < 2.0)
            u_bad = (u < eps) & (pi < 2.0)
            bad = sign_bad | smooth_bad | u_bad
            excluded |= bad
            sign_bad_any |= sign_bad
            u_bad_any |= u_bad
            smooth_bad_any |= smooth_bad

            X2v_s = np.where(bad, -1.0, X2v)
            aX2v = np.abs(X2v_s)
            u_s = np.where(u_bad, 1.0, u)

            def w(y, _pi=pi):
                return pair.u(y) ** _pi / pair.v(y) ** (_pi - 1.0)

            X2w = np.asarray(second_cols(G, i, w, cols), float)
            curv_term = np.abs(X2u) ** pi
            deficit = (pi * (pi - 1.0) * u_s ** (pi - 2.0) / v ** (pi - 1.0)
                       * aX2v ** (pi - 2.0) * X2v_s
                       * (Xu - ratio * Xv) ** 2)
            L1 += (curv_term
                   - pi * ratio ** (pi - 1.0) * X2u * X2v_s * aX2v ** (pi - 2.0)
                   + (pi - 1.0) * ratio ** pi * aX2v ** pi
                   - deficit)
            R1 += curv_term - X2w * aX2v ** (pi - 2.0) * X2v_s
    return {"L": L1, "R": R1, "excluded": excluded,
            "sign_bad": sign_bad_any, "u_bad": u_bad_any,
            "smooth_bad": smooth_bad_any}


def _pointwise(G, p, pair, x, order: int, eps: float) -> dict:
    cols = _sample_cols(G, [x])
    if order == 1:
        out = _first_order(G, p, pair, cols, eps)
        if out["excluded"][0]:
            raise NonSmoothPoint(
                f"|X_i v| below {eps:.0e} with p_i < 2 at {_point_repr(cols, 0)}")
        return out
    out = _second_order(G, p, pair, cols, eps)
    if out["sign_bad"][0]:
        raise SignViolation(
            f"X_i^2 v >= 0 at {_point_repr(cols, 0)}; the second-order "
            f"identity needs X_i^2 v < 0")
    if out["u_bad"][0]:
        raise DomainViolation(
            f"u^(p_i-2) diverges: u < {eps:.0e} with p_i < 2 at "
            f"{_point_repr(cols, 0)}")
    if out["smooth_bad"][0]:
        raise NonSmoothPoint(
            f"|X_i^2 v| below {eps:.0e} with p_i < 2 at {_point_repr(cols, 0)}")
    return out


def picone_R(G, p: ExponentVector, pair: PiconePair, x, *,
             eps: float = EPS_SMOOTH) -> float:
    """Divergence-form side of the first-order Picone decomposition."""
    return float(_pointwise(G, p, pair, x, 1, eps)["R"][0])


def picone_L(G, p: ExponentVector, pair: PiconePair, x, *,
             eps: float = EPS_SMOOTH) -> float:
    """Expanded, manifestly sign-analyzable side; equals picone_R."""
    return float(_pointwise(G, p, pair, x, 1, eps)["L"][0])


def picone_L_terms(G, p: ExponentVector, pair: PiconePair, x, *,
                   eps: float = EPS_SMOOTH) -> np.ndarray:
    """The N summands of picone_L (each is p_i-homogeneous in (u, v))."""
    out = _pointwise(G, p, pair, x, 1, eps)
    return np.array([float(t[0]) for t in out["L_terms"]])


def picone_R1(G, p: ExponentVector, pair: PiconePair, x, *,
              eps: float = EPS_SMOOTH) -> float:
    """Second-order analogue of picone_R, built from X_i^2 derivatives."""
    return float(_pointwise(G, p, pair, x, 2, eps)["R"][0])


def picone_L1(G, p: ExponentVector, pair: PiconePair, x, *,
              eps: float = EPS_SMOOTH) -> float:
    """Second-order analogue of picone_L; needs X_i^2 v < 0."""
    return float(_pointwise(G, p, pair, x, 2, eps)["L"][0])


def check_picone(G, p: ExponentVector, pair: PiconePair, sample, tol: float,
                 *, order: int = 1, eps: float = EPS_SMOOTH,
                 seed: int | None = None) -> IdentityReport:
    """Sampled identity + nonnegativity check, with exclusion accounting.

    Passes iff max |L - R| <= tol and min L >= -tol over the points that
    survive the guards; excluded points are counted, never silently dropped.
    """
    cols = _sample_cols(G, sample)
    n = cols[0].shape[0]
    if n == 0:
        raise EmptySample("empty Picone sample")
    if order == 1:
        out = _first_order(G, p, pair, cols, eps)
    elif order == 2:
        out = _second_order(G, p, pair, cols, eps)
    else:
        raise ValueError("order must be 1 or 2")
    keep = ~out["excluded"]
    if not np.any(keep):
        raise EmptySample("all sample points were excluded by the guards")
    residual = np.abs(out["L"] - out["R"])[keep]
    min_L = float(np.min(out["L"][keep]))
    max_res = float(np.max(residual))
    verdict = "pass" if (max_res <= tol and min_L >= -tol) else "fail"
    details = {"order": order, "tol": tol}
    if order == 2:
        details["sign_violations"] = int(np.sum(out["sign_bad"]))
    return IdentityReport(max_abs_residual=max_res, min_L=min_L,
                          excluded_count=int(np.sum(~keep)),
                          sample_size=int(n), seed=seed, verdict=verdict,
                          details=details)
