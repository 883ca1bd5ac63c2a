"""Closed-world log-concave families and the sup-convolution operator.

Three tags are supported: indicators of rational polytopes (times a rational
height), diagonal Gaussians, and ``exp`` of a concave piecewise-linear exponent
on a polyhedral support. Restricting any member to a coordinate flat gives a
member of the same family, which is what every integral below relies on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate as spi
from scipy.optimize import linprog, minimize
from scipy.special import gamma

from .covers import IndexSet, as_index_set
from .errors import DimensionMismatch, DominationViolated, LogConcavityViolated, UnsupportedDim
from .polytope import (
    RationalPolytope,
    _float_polytope_volume,
    conv_of_blocks,
    section,
    CoordinateFlat,
)
from .rational import format_fraction, parse_vector, to_fraction

LAM_FLOOR = 1e-9
RESTARTS = 8
_TINY = 1e-12


@dataclass(frozen=True)
class Integral:
    value: float | Fraction
    error: float
    exact: bool
    method: str


class LogConcaveFn:
    """Common interface. Subclasses implement the family-specific pieces."""

    family = "abstract"
    dim: int

    def values(self, X) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        return float(self.values(np.atleast_2d(np.asarray(x, dtype=float)).reshape(1, self.dim))[0])

    def sup_norm(self):
        raise NotImplementedError

    def sample_box(self) -> tuple[np.ndarray, np.ndarray]:
        """A box carrying essentially all of the mass, used by samplers."""
        raise NotImplementedError

    def restrict(self, fixed: Sequence[int], anchor: Sequence) -> "LogConcaveFn":
        """Fix 0-based coordinates ``fixed`` to ``anchor``; result lives on the rest."""
        raise NotImplementedError

    def integral(self, rtol: float = 1e-6, seed=0) -> Integral:
        raise NotImplementedError

    def level_volume(self, t: float) -> float:
        """Volume of the superlevel set ``{f >= t}`` for ``t > 0``."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


class ZeroFn(LogConcaveFn):
    """The zero function, produced by restricting to a flat that misses the support."""

    family = "zero"

    def __init__(self, dim: int):
        self.dim = dim

    def values(self, X):
        return np.zeros(len(np.atleast_2d(X)))

    def sup_norm(self):
        return 0.0

    def sample_box(self):
        return np.zeros(self.dim), np.zeros(self.dim)

    def restrict(self, fixed, anchor):
        return ZeroFn(self.dim - len(fixed))

    def integral(self, rtol=1e-6, seed=0):
        return Integral(Fraction(0), 0.0, True, "empty")

    def level_volume(self, t):
        return 0.0

    def to_json(self):
        return {"family": "zero", "dim": self.dim}


class Indicator(LogConcaveFn):
    family = "indicator"

    def __init__(self, body: RationalPolytope, height=1):
        self.body = body
        self.height = to_fraction(height)
        if self.height <= 0:
            raise ValueError("height must be positive")
        self.dim = body.dim

    def values(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.dim == 0:
            return np.full(len(X), float(self.height))
        if not self.body.full_dimensional:
            return np.array([float(self.value_exact(x)) for x in X])
        A, b = self.body.halfspaces_float
        inside = np.all(X @ A.T <= b + 1e-12 * (1 + np.abs(b)), axis=1)
        return np.where(inside, float(self.height), 0.0)

    def value_exact(self, x) -> Fraction:
        return self.height if self.body.contains(x) else Fraction(0)

    def sup_norm(self):
        return self.height

    def mode(self):
        return self.body.centroid()

    def sample_box(self):
        lo, hi = self.body.bounding_box()
        return np.array([float(c) for c in lo]), np.array([float(c) for c in hi])

    def restrict(self, fixed, anchor):
        if not fixed:
            return self
        fixed_set = IndexSet.of(self.dim, [c + 1 for c in fixed])
        order = sorted(range(len(fixed)), key=lambda i: fixed[i])
        anchor = parse_vector(anchor)
        flat = CoordinateFlat(fixed_set, tuple(anchor[i] for i in order))
        if len(fixed) == self.dim:
            pt = [Fraction(0)] * self.dim
            for c, a in zip(fixed, anchor):
                pt[c] = a
            if self.body.contains(pt):
                return Indicator(RationalPolytope(0, [()]), self.height)
            return ZeroFn(0)
        S = section(self.body, flat)
        if S.is_empty:
            return ZeroFn(self.dim - len(fixed))
        return Indicator(S, self.height)

    def integral(self, rtol=1e-6, seed=0):
        return Integral(self.height * self.body.volume, 0.0, True, "exact")

    def level_volume(self, t):
        return float(self.body.volume) if t <= self.height else 0.0

    def gauge(self, z: Sequence) -> Fraction | float:
        """Minkowski gauge of the body at ``z`` (needs 0 in the body)."""
        z = parse_vector(z)
        g = Fraction(0)
        for n, off in self.body.facets:
            v = sum(a * b for a, b in zip(n, z))
            if off > 0:
                g = max(g, v / off)
            elif v > 0:
                return math.inf
        return g

    def to_json(self):
        return {"family": "indicator", "body": self.body.to_json(), "height": format_fraction(self.height)}


class Gaussian(LogConcaveFn):
    """``height * exp(-1/2 * sum_i q_i (x_i - c_i)^2)`` with diagonal ``q > 0``."""

    family = "gaussian"

    def __init__(self, center: Sequence[float], invcov: Sequence[float], height: float = 1.0):
        self.center = np.asarray(center, dtype=float)
        self.invcov = np.asarray(invcov, dtype=float)
        self.height = float(height)
        if self.center.shape != self.invcov.shape:
            raise DimensionMismatch("center and invcov lengths differ")
        if np.any(self.invcov <= 0) or self.height <= 0:
            raise ValueError("invcov entries and height must be positive")
        self.dim = len(self.center)

    def log_values(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return math.log(self.height) - 0.5 * ((X - self.center) ** 2 @ self.invcov)

    def values(self, X):
        return np.exp(self.log_values(X))

    def sup_norm(self):
        return self.height

    def mode(self):
        return self.center.copy()

    def sample_box(self):
        r = 7.0 / np.sqrt(self.invcov)
        return self.center - r, self.center + r

    def restrict(self, fixed, anchor):
        if not fixed:
            return self
        fixed = list(fixed)
        a = np.asarray([float(x) for x in anchor])
        q, c = self.invcov[fixed], self.center[fixed]
        h = self.height * math.exp(-0.5 * float(np.sum(q * (a - c) ** 2)))
        free = [i for i in range(self.dim) if i not in fixed]
        if h == 0.0:
            return ZeroFn(len(free))
        if not free:
            return _PointMass(h)
        return Gaussian(self.center[free], self.invcov[free], h)

    def integral(self, rtol=1e-6, seed=0):
        v = self.height * float(np.prod(np.sqrt(2 * math.pi / self.invcov)))
        return Integral(v, abs(v) * 1e-15, False, "closed-form")

    def level_volume(self, t):
        if t >= self.height:
            return 0.0
        r2 = 2 * math.log(self.height / t)
        d = self.dim
        ball = math.pi ** (d / 2) / gamma(d / 2 + 1)
        return ball * r2 ** (d / 2) / float(np.prod(np.sqrt(self.invcov)))

    def to_json(self):
        return {"family": "gaussian", "center": self.center.tolist(), "invcov": self.invcov.tolist(),
                "height": self.height}


class _PointMass(LogConcaveFn):
    """A constant on R^0 (what remains after fixing every coordinate)."""

    family = "point"

    def __init__(self, value: float):
        self.dim = 0
        self.value = value

    def values(self, X):
        return np.full(len(np.atleast_2d(X)), self.value)

    def sup_norm(self):
        return self.value

    def integral(self, rtol=1e-6, seed=0):
        return Integral(self.value, 0.0, False, "point")

    def to_json(self):
        return {"family": "point", "value": self.value}


class ExpConcavePL(LogConcaveFn):
    """``exp(min_k (C_k . x + d_k))`` on the polyhedron ``A x <= b``.

    The support may be unbounded as long as the exponent makes ``f``
    integrable. With no affine pieces the exponent is 0.
    """

    family = "exp_concave_pl"

    def __init__(self, dim: int, A, b, C=None, d=None):
        self.dim = dim
        self.A = np.asarray(A, dtype=float).reshape(-1, dim)
        self.b = np.asarray(b, dtype=float).reshape(-1)
        self.C = np.zeros((0, dim)) if C is None else np.asarray(C, dtype=float).reshape(-1, dim)
        self.d = np.zeros(0) if d is None else np.asarray(d, dtype=float).reshape(-1)
        if len(self.A) != len(self.b) or len(self.C) != len(self.d):
            raise DimensionMismatch("halfspace or piece arrays have inconsistent lengths")

    @classmethod
    def on_polytope(cls, P: RationalPolytope, C=None, d=None) -> "ExpConcavePL":
        A, b = P.halfspaces_float
        return cls(P.dim, A, b, C, d)

    def exponent(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if len(self.C) == 0:
            return np.zeros(len(X))
        return np.min(X @ self.C.T + self.d, axis=1)

    def in_support(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if len(self.A) == 0:
            return np.ones(len(X), dtype=bool)
        return np.all(X @ self.A.T <= self.b + 1e-12 * (1 + np.abs(self.b)), axis=1)

    def log_values(self, X):
        return np.where(self.in_support(X), self.exponent(X), -np.inf)

    def values(self, X):
        return np.exp(self.log_values(X))

    def _lp_max_exponent(self):
        n = self.dim
        if len(self.C) == 0:
            res = linprog(np.zeros(n), A_ub=self.A if len(self.A) else None,
                          b_ub=self.b if len(self.A) else None, bounds=[(None, None)] * n, method="highs")
            return (0.0, res.x) if res.status == 0 else (-math.inf, None)
        A_ub = [np.r_[-row, 1.0] for row in self.C] + [np.r_[row, 0.0] for row in self.A]
        b_ub = list(self.d) + list(self.b)
        res = linprog(np.r_[np.zeros(n), -1.0], A_ub=np.array(A_ub), b_ub=np.array(b_ub),
                      bounds=[(None, None)] * (n + 1), method="highs")
        if res.status == 3:
            raise ValueError("exponent is unbounded above on the support")
        if res.status != 0:
            return -math.inf, None
        return -res.fun, res.x[:n]

    def sup_norm(self):
        return math.exp(self._lp_max_exponent()[0])

    def mode(self):
        return self._lp_max_exponent()[1]

    def _coord_range(self, i: int, extra_A=None, extra_b=None):
        A, b = self.A, self.b
        if extra_A is not None:
            A, b = np.vstack([A, extra_A]), np.r_[b, extra_b]
        out = []
        for sgn in (1.0, -1.0):
            c = np.zeros(self.dim)
            c[i] = sgn
            res = linprog(c, A_ub=A if len(A) else None, b_ub=b if len(A) else None,
                          bounds=[(None, None)] * self.dim, method="highs")
            if res.status == 3:
                out.append(-math.inf * sgn)
            elif res.status != 0:
                return None
            else:
                out.append(sgn * res.fun)
        return out[0], out[1]

    def sample_box(self):
        top, _ = self._lp_max_exponent()
        # superlevel set carrying all but ~e^-30 of the mass
        extra_A = -self.C if len(self.C) else None
        extra_b = self.d - (top - 30.0) if len(self.C) else None
        lo, hi = [], []
        for i in range(self.dim):
            r = self._coord_range(i, extra_A, extra_b)
            if r is None or not all(map(math.isfinite, r)):
                raise ValueError("support is unbounded in a direction where f does not decay")
            lo.append(r[0])
            hi.append(r[1])
        return np.array(lo), np.array(hi)

    def restrict(self, fixed, anchor):
        if not fixed:
            return self
        fixed = list(fixed)
        a = np.asarray([float(x) for x in anchor])
        free = [i for i in range(self.dim) if i not in fixed]
        A_f, b_f = self.A[:, free], self.b - self.A[:, fixed] @ a
        keep = np.any(np.abs(A_f) > 0, axis=1)
        if np.any(b_f[~keep] < -1e-12 * (1 + np.abs(b_f[~keep]))):
            return ZeroFn(len(free))
        C_f, d_f = self.C[:, free], self.d + self.C[:, fixed] @ a
        if not free:
            top = float(np.min(d_f)) if len(d_f) else 0.0
            return _PointMass(math.exp(top))
        return ExpConcavePL(len(free), A_f[keep], b_f[keep], C_f, d_f)

    def _integral_1d(self) -> float:
        lo, hi = -math.inf, math.inf
        for a, bb in zip(self.A[:, 0], self.b):
            if a > 0:
                hi = min(hi, bb / a)
            elif a < 0:
                lo = max(lo, bb / a)
        if lo > hi:
            return 0.0
        if len(self.C) == 0:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("f is not integrable")
            return hi - lo
        c, d = self.C[:, 0], self.d
        cuts = {lo, hi}
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                if c[i] != c[j]:
                    x = (d[j] - d[i]) / (c[i] - c[j])
                    if lo < x < hi:
                        cuts.add(x)
        pts = sorted(cuts)
        total = 0.0
        for u, w in zip(pts, pts[1:]):
            if w <= u:
                continue
            if math.isfinite(u) and math.isfinite(w):
                probe = 0.5 * (u + w)
            elif math.isfinite(u):
                probe = u + 1.0
            elif math.isfinite(w):
                probe = w - 1.0
            else:
                probe = 0.0
            k = int(np.argmin(c * probe + d))
            total += _exp_affine_integral(c[k], d[k], u, w)
        return total

    def _integral_nd(self, rtol: float) -> tuple[float, float]:
        r = self._coord_range(0)
        if r is None:
            return 0.0, 0.0
        lo, hi = r

        def inner(x0):
            g = self.restrict([0], [x0])
            if isinstance(g, ZeroFn):
                return 0.0
            if g.dim == 1:
                return g._integral_1d()
            return g._integral_nd(rtol)[0]

        val, err = spi.quad(inner, lo, hi, epsrel=rtol, epsabs=0.0, limit=200)
        return val, err

    def integral(self, rtol=1e-6, seed=0, mc_samples: int = 400_000):
        if self.dim == 1:
            return Integral(self._integral_1d(), 0.0, False, "closed-form")
        if self.dim <= 3:
            v, e = self._integral_nd(rtol)
            return Integral(v, e, False, "quadrature")
        try:
            lo, hi = self.sample_box()
        except ValueError:
            raise UnsupportedDim(f"no quadrature above 3 dimensions and the support is unbounded (dim {self.dim})")
        rng = np.random.default_rng(seed)
        X = lo + (hi - lo) * rng.random((mc_samples, self.dim))
        vals = self.values(X) * float(np.prod(hi - lo))
        return Integral(float(vals.mean()), float(vals.std() / math.sqrt(mc_samples)), False, "monte-carlo")

    def level_volume(self, t):
        if t <= 0:
            raise ValueError("level must be positive")
        A = np.vstack([self.A, -self.C]) if len(self.C) else self.A
        b = np.r_[self.b, self.d - math.log(t)] if len(self.C) else self.b
        if len(self.C) == 0 and t > 1:
            return 0.0
        return _float_polytope_volume(A, b)

    def to_json(self):
        return {"family": "exp_concave_pl", "dim": self.dim, "A": self.A.tolist(), "b": self.b.tolist(),
                "C": self.C.tolist(), "d": self.d.tolist()}


def _exp_affine_integral(c: float, d: float, u: float, w: float) -> float:
    """Integral of ``exp(c x + d)`` over ``[u, w]`` (ends may be infinite)."""
    if c == 0:
        if not (math.isfinite(u) and math.isfinite(w)):
            raise ValueError("f is not integrable")
        return math.exp(d) * (w - u)

    def prim(x):
        if math.isinf(x):
            if (x > 0) == (c > 0):
                raise ValueError("f is not integrable")
            return 0.0
        return math.exp(c * x + d) / c

    return prim(w) - prim(u)


def from_json(obj: dict) -> LogConcaveFn:
    fam = obj.get("family")
    if fam == "indicator":
        return Indicator(RationalPolytope.from_json(obj["body"]), obj.get("height", "1"))
    if fam == "gaussian":
        return Gaussian(obj["center"], obj["invcov"], obj.get("height", 1.0))
    if fam == "exp_concave_pl":
        return ExpConcavePL(int(obj["dim"]), obj["A"], obj["b"], obj.get("C"), obj.get("d"))
    raise ValueError(f"unknown family {fam!r}")


# ---------------------------------------------------------------------------
# integrals, restrictions, marginals


def integrate_detail(f: LogConcaveFn, sigma=None, rtol: float = 1e-6, seed=0) -> Integral:
    """Integral of ``f`` over R^n, or of its restriction to ``H_sigma`` if given."""
    if sigma is not None:
        sigma = as_index_set(sigma, f.dim)
        off = sigma.complement().zero_based()
        g = f.restrict(off, [0] * len(off))
        return g.integral(rtol=rtol, seed=seed)
    return f.integral(rtol=rtol, seed=seed)


def integrate(f: LogConcaveFn, sigma=None, rtol: float = 1e-6, seed=0):
    return integrate_detail(f, sigma, rtol, seed).value


def fiber(f: LogConcaveFn, sigma, x: Sequence) -> LogConcaveFn:
    """Restriction of ``f`` to ``x + H_sigma^perp`` (``x`` given on sigma)."""
    sigma = as_index_set(sigma, f.dim)
    return f.restrict(sigma.zero_based(), list(x))


def marginal_detail(f: LogConcaveFn, sigma, x: Sequence, rtol: float = 1e-6) -> Integral:
    sigma = as_index_set(sigma, f.dim)
    if len(x) != len(sigma):
        raise DimensionMismatch("x needs one value per coordinate of sigma")
    return fiber(f, sigma, x).integral(rtol=rtol)


def marginal(f: LogConcaveFn, sigma, x: Sequence, rtol: float = 1e-6):
    return marginal_detail(f, sigma, x, rtol).value


class MarginalFn(LogConcaveFn):
    """``x -> integral of f over x + H_sigma^perp`` as a function on H_sigma."""

    family = "marginal"

    def __init__(self, f: LogConcaveFn, sigma, rtol: float = 1e-8):
        self.f = f
        self.sigma = as_index_set(sigma, f.dim)
        self.dim = len(self.sigma)
        self.rtol = rtol

    def values(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([float(marginal(self.f, self.sigma, x, self.rtol)) for x in X])

    def sample_box(self):
        lo, hi = self.f.sample_box()
        idx = self.sigma.zero_based()
        return lo[idx], hi[idx]


def max_marginal(f: LogConcaveFn, sigma, effort: int = 1) -> tuple[tuple, float | Fraction, bool]:
    """Maximize the marginal over H_sigma. Returns (anchor, value, exact)."""
    from .polytope import max_parallel_section

    sigma = as_index_set(sigma, f.dim)
    if isinstance(f, Indicator):
        ms = max_parallel_section(f.body, sigma, effort=effort)
        return ms.anchor, f.height * ms.value, ms.exact
    if isinstance(f, Gaussian):
        c = f.center[sigma.zero_based()]
        return tuple(c), float(marginal(f, sigma, c)), False
    lo, hi = f.sample_box()
    idx = sigma.zero_based()
    x0 = f.mode()[idx]

    def neg_log(x):
        v = float(marginal(f, sigma, x))
        return -math.log(v) if v > 0 else 1e300

    best = minimize(neg_log, x0, method="Nelder-Mead",
                    options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 400 * len(idx) * effort})
    return tuple(best.x), float(marginal(f, sigma, best.x)), False


# ---------------------------------------------------------------------------
# sup-convolution


@dataclass
class SupConvolution:
    value: float | Fraction
    exact: bool
    lambdas: tuple = ()
    method: str = ""


def _is_polyhedral(f) -> bool:
    return isinstance(f, (Indicator, ExpConcavePL))


def _halfspaces(f) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(f, Indicator):
        return f.body.halfspaces_float
    return f.A, f.b


def sup_convolution_detail(factors: Sequence[LogConcaveFn], z: Sequence, seed=0) -> SupConvolution:
    if len(factors) < 2:
        raise ValueError("sup-convolution needs at least two factors")
    n = factors[0].dim
    if any(f.dim != n for f in factors) or len(z) != n:
        raise DimensionMismatch("factors and z must share one dimension")
    if all(isinstance(f, EmbeddedFactor) for f in factors):
        return embedded_sup_convolution(factors, z)
    if all(isinstance(f, Indicator) for f in factors):
        heights = {f.height for f in factors}
        if len(heights) == 1:
            pts = [v for f in factors for v in f.body.vertices]
            Q = RationalPolytope(n, pts)
            h = heights.pop()
            return SupConvolution(h if Q.contains(parse_vector(z)) else Fraction(0), True, (), "hull")
    if all(_is_polyhedral(f) for f in factors):
        return _sup_conv_lp(factors, np.asarray([float(c) for c in z]))
    return _sup_conv_nlp(factors, np.asarray([float(c) for c in z]), seed)


def sup_convolution(factors: Sequence[LogConcaveFn], z: Sequence, seed=0):
    return sup_convolution_detail(factors, z, seed).value


def _layout(factors, n):
    """Column offsets of (y_j, lambda_j, t_j) blocks in the decision vector."""
    cols = []
    pos = 0
    for _ in factors:
        cols.append((pos, pos + n, pos + n + 1))
        pos += n + 2
    return cols, pos


def _linear_constraints(factors, n, cols, nvar):
    rows, rhs = [], []
    for f, (y0, lam, t) in zip(factors, cols):
        if _is_polyhedral(f):
            A, b = _halfspaces(f)
            for a, bb in zip(A, b):
                r = np.zeros(nvar)
                r[y0:y0 + n] = a
                r[lam] = -bb
                rows.append(r)
                rhs.append(0.0)
        if isinstance(f, ExpConcavePL):
            for cc, dd in zip(f.C, f.d):
                r = np.zeros(nvar)
                r[t] = 1.0
                r[y0:y0 + n] = -cc
                r[lam] = -dd
                rows.append(r)
                rhs.append(0.0)
    return rows, rhs


def _equalities(factors, n, cols, nvar, z):
    eq, eq_rhs = [], []
    for i in range(n):
        r = np.zeros(nvar)
        for y0, _, _ in cols:
            r[y0 + i] = 1.0
        eq.append(r)
        eq_rhs.append(z[i])
    r = np.zeros(nvar)
    for _, lam, _ in cols:
        r[lam] = 1.0
    eq.append(r)
    eq_rhs.append(1.0)
    return np.array(eq), np.array(eq_rhs)


def _t_bounds(f):
    if isinstance(f, ExpConcavePL) and len(f.C):
        return (None, None)
    return (0.0, 0.0)


def _sup_conv_lp(factors, z) -> SupConvolution:
    n = len(z)
    cols, nvar = _layout(factors, n)
    rows, rhs = _linear_constraints(factors, n, cols, nvar)
    A_eq, b_eq = _equalities(factors, n, cols, nvar, z)
    c = np.zeros(nvar)
    bounds = []
    for f, (y0, lam, t) in zip(factors, cols):
        c[t] = -1.0
        if isinstance(f, Indicator):
            c[lam] = -math.log(float(f.height))
        bounds += [(None, None)] * n + [(0.0, 1.0), _t_bounds(f)]
    res = linprog(c, A_ub=np.array(rows) if rows else None, b_ub=np.array(rhs) if rows else None,
                  A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status == 2:
        return SupConvolution(0.0, False, (), "lp")
    if res.status != 0:
        raise RuntimeError(f"sup-convolution LP failed: {res.message}")
    lams = tuple(float(res.x[lam]) for _, lam, _ in cols)
    return SupConvolution(math.exp(-res.fun), False, lams, "lp")


def _sup_conv_nlp(factors, z, seed) -> SupConvolution:
    n = len(z)
    cols, nvar = _layout(factors, n)
    rows, rhs = _linear_constraints(factors, n, cols, nvar)
    A_eq, b_eq = _equalities(factors, n, cols, nvar, z)
    A_ub = np.array(rows) if rows else np.zeros((0, nvar))
    b_ub = np.array(rhs) if rows else np.zeros(0)

    def objective(v):
        total = 0.0
        grad = np.zeros(nvar)
        for f, (y0, lam, t) in zip(factors, cols):
            lv = max(v[lam], LAM_FLOOR)
            y = v[y0:y0 + n]
            if isinstance(f, Gaussian):
                diff = y - lv * f.center
                q = f.invcov
                total += lv * math.log(f.height) - 0.5 * float(np.sum(q * diff**2)) / lv
                grad[y0:y0 + n] = -q * diff / lv
                grad[lam] = (math.log(f.height) + float(np.sum(q * diff * f.center)) / lv
                             + 0.5 * float(np.sum(q * diff**2)) / lv**2)
            elif isinstance(f, Indicator):
                total += lv * math.log(float(f.height))
                grad[lam] = math.log(float(f.height))
            else:
                total += v[t]
                grad[t] = 1.0
        return -total, -grad

    cons = [{"type": "eq", "fun": lambda v: A_eq @ v - b_eq, "jac": lambda v: A_eq}]
    if len(A_ub):
        cons.append({"type": "ineq", "fun": lambda v: b_ub - A_ub @ v, "jac": lambda v: -A_ub})
    bounds = []
    for f in factors:
        bounds += [(None, None)] * n + [(LAM_FLOOR, 1.0), _t_bounds(f)]
    bounds = [(lo if lo is not None else None, hi) for lo, hi in bounds]

    rng = np.random.default_rng(seed)
    best_val, best_lams = -math.inf, ()
    m = len(factors)
    for r in range(RESTARTS):
        lams = np.full(m, 1.0 / m) if r == 0 else rng.dirichlet(np.ones(m))
        v0 = np.zeros(nvar)
        for (y0, lam, t), lv, f in zip(cols, lams, factors):
            v0[lam] = lv
            v0[y0:y0 + n] = lv * z
            if isinstance(f, ExpConcavePL) and len(f.C):
                v0[t] = float(np.min(f.C @ (lv * z) + f.d * lv))
        with warnings.catch_warnings():
            # SLSQP clips trial steps to the bounds and says so; harmless here
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(objective, v0, jac=True, method="SLSQP", bounds=bounds, constraints=cons,
                           options={"maxiter": 500, "ftol": 1e-14})
        v = res.x
        feas = np.all(np.abs(A_eq @ v - b_eq) < 1e-7) and (not len(A_ub) or np.all(A_ub @ v - b_ub < 1e-7))
        if feas and -res.fun > best_val:
            best_val = -res.fun
            best_lams = tuple(float(v[lam]) for _, lam, _ in cols)
    # all weight on one factor is a valid decomposition, but the lambda floor
    # keeps the optimizer from reaching it exactly
    for j, f in enumerate(factors):
        if all(g.sup_norm() > 0 for i, g in enumerate(factors) if i != j):
            fz = f(z)
            if fz > 0 and math.log(fz) > best_val:
                best_val = math.log(fz)
                best_lams = tuple(1.0 if i == j else 0.0 for i in range(m))
    if best_val == -math.inf:
        return SupConvolution(0.0, False, (), "slsqp")
    return SupConvolution(math.exp(best_val), False, best_lams, "slsqp")


def check_domination(factors: Sequence[LogConcaveFn], f: LogConcaveFn, samples: int = 200, seed=0,
                     tol: float = 1e-6) -> dict:
    """Sample points and assert the sup-convolution never exceeds a dominating ``f``."""
    rng = np.random.default_rng(seed)
    lo, hi = f.sample_box()
    span = np.where(hi > lo, hi - lo, 1.0)
    exact = isinstance(f, Indicator) and all(isinstance(g, Indicator) for g in factors) \
        and len({g.height for g in factors}) == 1
    Z = lo - 0.1 * span + 1.2 * span * rng.random((samples, f.dim))
    if exact:
        Z = np.round(Z * 64) / 64
    fz = f.values(Z)
    for g in factors:
        if np.any(g.values(Z) > fz * (1 + 1e-12) + 1e-300):
            raise ValueError("a factor is not dominated by f on the sample set")
    worst = 0.0
    for z, fv in zip(Z, fz):
        if exact:
            zq = [Fraction(float(c)) for c in z]
            s = sup_convolution(factors, zq)
            rhs = f.value_exact(zq)
            if s > rhs:
                raise DominationViolated(tuple(z), s, rhs)
            continue
        s = float(sup_convolution(factors, z, seed=seed))
        if s > fv * (1 + tol) + tol * 1e-12:
            raise DominationViolated(tuple(z), s, fv)
        if fv > 0:
            worst = max(worst, s / fv - 1)
    return {"samples": samples, "exact": exact, "max_relative_excess": worst, "passed": True}


def check_log_concavity(f: LogConcaveFn, triples: int = 500, seed=0, rtol: float = 1e-9) -> dict:
    rng = np.random.default_rng(seed)
    lo, hi = f.sample_box()
    span = np.where(hi > lo, hi - lo, 1.0)
    X = lo + span * rng.random((triples, f.dim))
    Y = lo + span * rng.random((triples, f.dim))
    L = rng.random(triples)
    M = (1 - L)[:, None] * X + L[:, None] * Y
    fx, fy, fm = f.values(X), f.values(Y), f.values(M)
    checked = 0
    for i in range(triples):
        if fx[i] <= 0 or fy[i] <= 0:
            continue
        checked += 1
        bound = fx[i] ** (1 - L[i]) * fy[i] ** L[i]
        if fm[i] < bound * (1 - rtol):
            raise LogConcavityViolated(tuple(X[i]), tuple(Y[i]), float(L[i]))
    return {"triples": triples, "checked": checked, "passed": True}


# ---------------------------------------------------------------------------
# block embeddings


class EmbeddedFactor(LogConcaveFn):
    """``F_j(x_1, ..., x_m) = f_j(x_j)`` when every other block vanishes, else 0."""

    family = "embedded"

    def __init__(self, block_dims: Sequence[int], j: int, f: LogConcaveFn):
        self.block_dims = tuple(block_dims)
        self.j = j
        self.f = f
        if f.dim != self.block_dims[j]:
            raise DimensionMismatch("factor dimension does not match its block")
        self.dim = sum(self.block_dims)
        self.offsets = np.cumsum((0,) + self.block_dims)

    def block(self, X, i):
        return np.atleast_2d(X)[:, self.offsets[i]:self.offsets[i + 1]]

    def values(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = self.f.values(self.block(X, self.j))
        for i in range(len(self.block_dims)):
            if i != self.j:
                out = np.where(np.all(self.block(X, i) == 0, axis=1), out, 0.0)
        return out

    def sup_norm(self):
        return self.f.sup_norm()


def embed_factors(fs: Sequence[LogConcaveFn]) -> list[EmbeddedFactor]:
    if len(fs) < 2:
        raise ValueError("need at least two factors")
    dims = [f.dim for f in fs]
    return [EmbeddedFactor(dims, j, f) for j, f in enumerate(fs)]


def _lambda_window(f: LogConcaveFn, zj: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row interval of lambda with ``z_j / lambda`` in supp f (polyhedral families)."""
    k = len(zj)
    lo, hi = np.zeros(k), np.ones(k)
    if not _is_polyhedral(f):
        return lo, hi
    A, b = _halfspaces(f)
    V = zj @ A.T
    for col in range(A.shape[0]):
        bb, v = b[col], V[:, col]
        if bb > 1e-15:
            lo = np.maximum(lo, v / bb)
        elif bb < -1e-15:
            hi = np.minimum(hi, v / bb)
        else:
            hi = np.where(v > 1e-12, -1.0, hi)
    return lo, hi


def _persp_log(f: LogConcaveFn, zj: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """``lambda * log f(z_j / lambda)`` assuming lambda is feasible for the support."""
    lam_safe = np.maximum(lam, 1e-300)
    if isinstance(f, Indicator):
        return lam * math.log(float(f.height))
    if isinstance(f, Gaussian):
        diff = zj - lam[:, None] * f.center
        return lam * math.log(f.height) - 0.5 * (diff**2 @ f.invcov) / lam_safe
    if isinstance(f, ExpConcavePL):
        if len(f.C) == 0:
            return np.zeros(len(lam))
        return np.min(zj @ f.C.T + lam[:, None] * f.d, axis=1)
    raise TypeError(f"unsupported family {f.family}")


def _embedded_two(fs, Z) -> np.ndarray:
    """Vectorized ``log`` of the sup-convolution of two embedded factors."""
    f1, f2 = fs
    i1 = f1.dim
    z1, z2 = Z[:, :i1], Z[:, i1:]
    lo1, hi1 = _lambda_window(f1, z1)
    lo2, hi2 = _lambda_window(f2, z2)
    lo = np.maximum(lo1, 1 - hi2)
    hi = np.minimum(hi1, 1 - lo2)
    feasible = lo <= hi + 1e-12
    lo, hi = np.clip(lo, 0, 1), np.clip(np.maximum(hi, lo), 0, 1)

    def phi(lam):
        lam = np.clip(lam, lo, hi)
        return _persp_log(f1, z1, lam) + _persp_log(f2, z2, 1 - lam)

    a, b = lo.copy(), hi.copy()
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = phi(c), phi(d)
    for _ in range(90):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        d_new = np.where(left, c, a + g * (b - a))
        c_new = np.where(left, b - g * (b - a), d)
        fd_new = np.where(left, fc, phi(d_new))
        fc_new = np.where(left, phi(c_new), fd)
        c, d, fc, fd = c_new, d_new, fc_new, fd_new
    best = np.maximum.reduce([phi(0.5 * (a + b)), phi(lo), phi(hi)])
    return np.where(feasible, best, -np.inf)


def embedded_sup_convolution(efs: Sequence[EmbeddedFactor], z: Sequence) -> SupConvolution:
    """Sup-convolution of embedded factors at ``z``; reduces to a search over lambda alone."""
    fs = [e.f for e in efs]
    dims = [f.dim for f in fs]
    offs = np.cumsum([0] + dims)
    if all(isinstance(f, Indicator) for f in fs) and all(f.body.contains([0] * f.dim) for f in fs):
        zq = parse_vector(z)
        g = [f.gauge(zq[offs[j]:offs[j + 1]]) for j, f in enumerate(fs)]
        total = sum(g)
        if total > 1:
            return SupConvolution(Fraction(0), True, (), "gauge")
        heights = [f.height for f in fs]
        top = max(heights)
        if len(set(heights)) == 1:
            return SupConvolution(top, True, tuple(g), "gauge")
        val = float(top) ** float(1 - total) * math.prod(float(h) ** float(gj) for h, gj in zip(heights, g))
        return SupConvolution(val, False, tuple(g), "gauge")
    zf = np.asarray([float(c) for c in z])
    if len(fs) == 2:
        lv = float(_embedded_two(fs, zf[None, :])[0])
        return SupConvolution(math.exp(lv) if lv > -math.inf else 0.0, False, (), "golden")
    return _embedded_general(fs, zf, offs)


def _embedded_general(fs, zf, offs) -> SupConvolution:
    m = len(fs)
    blocks = [zf[offs[j]:offs[j + 1]][None, :] for j in range(m)]
    windows = [_lambda_window(f, zb) for f, zb in zip(fs, blocks)]
    if sum(w[0][0] for w in windows) > 1 + 1e-12 or any(w[0][0] > w[1][0] for w in windows):
        return SupConvolution(0.0, False, (), "slsqp")

    def neg(lam):
        return -sum(float(_persp_log(f, zb, np.array([l]))[0]) for f, zb, l in zip(fs, blocks, lam))

    bounds = [(max(float(w[0][0]), LAM_FLOOR), float(w[1][0])) for w in windows]
    cons = [{"type": "eq", "fun": lambda lam: np.sum(lam) - 1}]
    best = -math.inf
    rng = np.random.default_rng(0)
    for r in range(RESTARTS):
        lam0 = np.array([0.5 * (lo + hi) for lo, hi in bounds])
        if r:
            lam0 = np.array([lo + (hi - lo) * u for (lo, hi), u in zip(bounds, rng.random(m))])
        res = minimize(neg, lam0, method="SLSQP", bounds=bounds, constraints=cons,
                       options={"maxiter": 300, "ftol": 1e-14})
        if abs(np.sum(res.x) - 1) < 1e-8:
            best = max(best, -res.fun)
    return SupConvolution(math.exp(best) if best > -math.inf else 0.0, False, (), "slsqp")


def _dirichlet_integral(i_dims: Sequence[int], rates: Sequence[float], rtol: float) -> float:
    """``int_{t >= 0, sum t <= 1} prod t_j^(i_j - 1) exp(-sum a_j t_j) dt`` by nested quadrature."""
    i_dims, rates = list(i_dims), list(rates)

    def rec(j: int, budget: float) -> float:
        if j == len(i_dims):
            return 1.0
        ij, aj = i_dims[j], rates[j]
        return spi.quad(lambda t: t ** (ij - 1) * math.exp(-aj * t) * rec(j + 1, budget - t),
                        0.0, budget, epsrel=rtol, epsabs=0.0)[0]

    return rec(0, 1.0)


def embedded_integral(efs: Sequence[EmbeddedFactor], rtol: float = 1e-8, samples: int = 400_000,
                      seed=0) -> Integral:
    """Integral of the sup-convolution of embedded factors over the total space."""
    fs = [e.f for e in efs]
    if all(isinstance(f, Indicator) for f in fs) and all(f.body.contains([0] * f.dim) for f in fs):
        heights = [f.height for f in fs]
        if len(set(heights)) == 1:
            C = conv_of_blocks([(f.body, None) for f in fs])
            return Integral(heights[0] * C.volume, 0.0, True, "hull")
        if len(fs) <= 4:
            top = max(heights)
            rates = [math.log(top / h) for h in heights]
            scale = float(top) * math.prod(f.dim * float(f.body.volume) for f in fs)
            v = scale * _dirichlet_integral([f.dim for f in fs], rates, rtol)
            return Integral(v, v * rtol, False, "gauge-quadrature")
    if len(fs) != 2:
        raise UnsupportedDim("numeric sup-convolution integrals are implemented for two factors")
    los, his = [], []
    for f in fs:
        lo, hi = f.sample_box()
        los.append(np.minimum(lo, 0.0))
        his.append(np.maximum(hi, 0.0))
    lo, hi = np.concatenate(los), np.concatenate(his)
    box = float(np.prod(hi - lo))
    rng = np.random.default_rng(seed)
    acc, acc2, done = 0.0, 0.0, 0
    while done < samples:
        k = min(100_000, samples - done)
        Z = lo + (hi - lo) * rng.random((k, len(lo)))
        v = np.exp(_embedded_two(fs, Z)) * box
        acc += float(v.sum())
        acc2 += float((v**2).sum())
        done += k
    mean = acc / samples
    var = max(acc2 / samples - mean**2, 0.0)
    return Integral(mean, math.sqrt(var / samples), False, "monte-carlo")


# ---------------------------------------------------------------------------
# minimum over a product space


def min_product_integral(fs: Sequence[LogConcaveFn], rtol: float = 1e-9) -> Integral:
    """``int min_j f_j(x_j)`` over the product space, via the layer-cake formula."""
    if all(isinstance(f, Indicator) for f in fs):
        return Integral(min(f.height for f in fs) * math.prod(f.body.volume for f in fs), 0.0, True, "exact")
    top = min(float(f.sup_norm()) for f in fs)

    def layer(t):
        if t <= 0:
            return 0.0
        return math.prod(f.level_volume(t) for f in fs)

    cuts = sorted({float(f.height) for f in fs if isinstance(f, Indicator) and float(f.height) < top})
    pts = [0.0] + cuts + [top]
    total, err = 0.0, 0.0
    for u, w in zip(pts, pts[1:]):
        v, e = spi.quad(layer, u, w, epsrel=rtol, epsabs=0.0, limit=200)
        total += v
        err += e
    return Integral(total, err, False, "layer-cake")
