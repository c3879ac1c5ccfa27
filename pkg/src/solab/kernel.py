"""One-dimensional numerical substrate.

Uniform-grid functions with 4th-order differentiation and cumulative
quadrature, the generalized sine/cosine pair sn_k / cn_k, and a fixed-step
RK4 solver for y'' = Q(t) y.  Everything downstream (curvature, soliton
residuals, volume comparison) is built on these primitives, so the accuracy
contracts here are the binding ones: O(h^4) for derivatives and integrals on
smooth data, including second derivatives of composed integrals.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import OverflowDetected

__all__ = [
    "GridFn",
    "sn",
    "cn",
    "derivative",
    "integrate_cumulative",
    "solve_linear_ode2",
    "fd_weights",
]

# Width of the one-sided stencil band at each end of the grid.  Grids must
# contain at least one centered-stencil point between the two bands.
EDGE_WIDTH = 4
MIN_SAMPLES = 2 * EDGE_WIDTH + 1


@dataclass(frozen=True)
class GridFn:
    """A real function of one variable sampled on a uniform grid.

    Values must be free of infinities.  NaN is tolerated at isolated
    samples (it marks points where a quantity is undefined, e.g. a ratio
    at a model pole); all quadrature and sup-norm consumers either see
    finite data or mask NaN explicitly.
    """

    t0: float
    t1: float
    values: np.ndarray

    def __post_init__(self):
        # own a frozen copy: freezing a caller's array in place would be
        # a visible side effect
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1:
            raise ValueError("GridFn values must be one-dimensional")
        if vals.size < MIN_SAMPLES:
            raise ValueError(f"GridFn needs at least {MIN_SAMPLES} samples, got {vals.size}")
        if not self.t1 > self.t0:
            raise ValueError("GridFn requires t1 > t0")
        if np.isinf(vals).any():
            raise ValueError("GridFn values must not contain infinities")

    @property
    def n_samples(self) -> int:
        return self.values.size

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / (self.n_samples - 1)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_samples)

    @classmethod
    def from_callable(cls, fn: Callable, t0: float, t1: float, n_samples: int) -> "GridFn":
        t = np.linspace(t0, t1, n_samples)
        return cls(t0, t1, np.asarray(fn(t), dtype=float))

    @classmethod
    def constant(cls, value: float, t0: float, t1: float, n_samples: int) -> "GridFn":
        return cls(t0, t1, np.full(n_samples, float(value)))

    def with_values(self, values: np.ndarray) -> "GridFn":
        """Same grid, new samples."""
        return GridFn(self.t0, self.t1, values)

    def same_grid(self, other: "GridFn") -> bool:
        return (
            self.n_samples == other.n_samples
            and abs(self.t0 - other.t0) <= 1e-12 * (1 + abs(self.t0))
            and abs(self.t1 - other.t1) <= 1e-12 * (1 + abs(self.t1))
        )

    def _coerce(self, other):
        if isinstance(other, GridFn):
            if not self.same_grid(other):
                raise ValueError("GridFn operands live on different grids")
            return other.values
        return float(other)

    def __add__(self, other):
        return self.with_values(self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._coerce(other))

    def __rsub__(self, other):
        return self.with_values(self._coerce(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.with_values(self.values / self._coerce(other))

    def __neg__(self):
        return self.with_values(-self.values)

    def __pow__(self, exponent):
        return self.with_values(self.values ** float(exponent))

    def eval(self, t):
        """Evaluate at arbitrary points by 4-point (cubic) Lagrange interpolation.

        O(h^4) accurate on smooth data.  Points may sit anywhere in
        [t0, t1] (a 1e-9-relative slack beyond the ends is tolerated and
        clamped).
        """
        tq = np.asarray(t, dtype=float)
        scalar = tq.ndim == 0
        tq = np.atleast_1d(tq)
        slack = 1e-9 * (self.t1 - self.t0)
        if (tq < self.t0 - slack).any() or (tq > self.t1 + slack).any():
            raise ValueError("evaluation point outside the grid domain")
        s = (np.clip(tq, self.t0, self.t1) - self.t0) / self.h
        i = np.clip(np.floor(s).astype(int), 1, self.n_samples - 3)
        u = s - i
        v = self.values
        w_m1 = -u * (u - 1.0) * (u - 2.0) / 6.0
        w_0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0
        w_1 = -(u + 1.0) * u * (u - 2.0) / 2.0
        w_2 = (u + 1.0) * u * (u - 1.0) / 6.0
        out = w_m1 * v[i - 1] + w_0 * v[i] + w_1 * v[i + 1] + w_2 * v[i + 2]
        return float(out[0]) if scalar else out

    def __call__(self, t):
        return self.eval(t)


# ---------------------------------------------------------------------------
# generalized sine / cosine
# ---------------------------------------------------------------------------

# Below this threshold on |k| t^2 the closed forms lose digits to
# cancellation; the unified power series (identical for all signs of k)
# takes over, which also enforces continuity in k across k = 0.
_SERIES_CUTOFF = 1e-8


def sn(k: float, t):
    """Generalized sine: the solution of y'' + k y = 0, y(0)=0, y'(0)=1.

    sinh(sqrt(-k) t)/sqrt(-k) for k < 0, t for k = 0, sin(sqrt(k) t)/sqrt(k)
    for k > 0.  Accepts scalars or arrays in t.
    """
    k = float(k)
    tq = np.asarray(t, dtype=float)
    scalar = tq.ndim == 0
    tq = np.atleast_1d(tq)
    t2 = tq * tq
    series = tq * (1.0 - k * t2 / 6.0 + k * k * t2 * t2 / 120.0)
    if k == 0.0:
        out = series
    else:
        r = np.sqrt(abs(k))
        closed = np.sin(r * tq) / r if k > 0 else np.sinh(r * tq) / r
        out = np.where(abs(k) * t2 < _SERIES_CUTOFF, series, closed)
    return float(out[0]) if scalar else out


def cn(k: float, t):
    """Derivative of sn in t: cosh, 1, or cos according to the sign of k."""
    k = float(k)
    tq = np.asarray(t, dtype=float)
    scalar = tq.ndim == 0
    tq = np.atleast_1d(tq)
    t2 = tq * tq
    series = 1.0 - k * t2 / 2.0 + k * k * t2 * t2 / 24.0
    if k == 0.0:
        out = np.ones_like(tq)
    else:
        r = np.sqrt(abs(k))
        closed = np.cos(r * tq) if k > 0 else np.cosh(r * tq)
        out = np.where(abs(k) * t2 < _SERIES_CUTOFF, series, closed)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def fd_weights(offsets, x0: float, order: int) -> np.ndarray:
    """Finite-difference weights at x0 for the given derivative order.

    Fornberg's recursion on the (unit-spaced) node offsets.  Divide by
    h**order for a physical grid spacing h.
    """
    x = np.asarray(offsets, dtype=float)
    n = x.size
    c = np.zeros((n, order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for m in range(mn, 0, -1):
                    c[i, m] = c1 * (m * c[i - 1, m - 1] - c5 * c[i - 1, m]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for m in range(mn, 0, -1):
                c[j, m] = (c4 * c[j, m] - m * c[j, m - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


@lru_cache(maxsize=None)
def _edge_weight_table(order: int) -> np.ndarray:
    """Rows i = 0..3: one-sided 4th-order weights over the first cluster.

    First derivatives use a 5-node cluster, second derivatives a 6-node
    cluster; both give O(h^4) at every row.  Mirror (with sign for odd
    orders) for the right edge.
    """
    width = 5 if order == 1 else 6
    rows = []
    for i in range(EDGE_WIDTH):
        w = fd_weights(np.arange(width), float(i), order)
        # differentiation must annihilate constants exactly; park the
        # rounding residue of the recursion on the largest weight
        w[np.argmax(np.abs(w))] -= w.sum()
        rows.append(w)
    return np.vstack(rows)


def derivative(f: GridFn, order: int = 1) -> GridFn:
    """Differentiate on the grid: 4th-order centered stencils in the
    interior, one-sided 4th-order stencils at the 4 boundary points of
    each side."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    v = f.values
    n = v.size
    h = f.h
    scale = h ** order
    out = np.empty(n)

    # integer-weight pairing so that constants cancel exactly before the
    # 1/h**order amplification
    if order == 1:
        acc = 8.0 * (v[3 : n - 1] - v[1 : n - 3]) + (v[0 : n - 4] - v[4:n])
    else:
        acc = 16.0 * (v[1 : n - 3] + v[3 : n - 1]) - (v[0 : n - 4] + v[4:n]) - 30.0 * v[2 : n - 2]
    out[2 : n - 2] = acc / (12.0 * scale)

    edge = _edge_weight_table(order)
    width = edge.shape[1]
    out[:EDGE_WIDTH] = edge @ v[:width] / scale
    # right edge: same cluster viewed from the far end (row i lands at
    # index n-1-i, with the axis flip negating odd derivative orders)
    sign = -1.0 if order % 2 else 1.0
    out[n - EDGE_WIDTH :] = (sign * (edge @ v[: n - width - 1 : -1]) / scale)[::-1]
    return f.with_values(out)


# ---------------------------------------------------------------------------
# cumulative quadrature
# ---------------------------------------------------------------------------

def integrate_cumulative(f: GridFn) -> GridFn:
    """Running integral F with F(t0) = 0 and F' = f, O(h^4) on smooth data.

    Even-index prefixes are composite Simpson.  Odd-index prefixes append a
    corrected trapezoid over the final subinterval (cubic through the two
    neighbours on each side); a plain trapezoid there would leave an O(h^3)
    even/odd sawtooth that second derivatives of the result amplify to
    O(h), which the identity suite cannot afford.
    """
    v = f.values
    n = v.size
    h = f.h
    F = np.zeros(n)
    pairs = (h / 3.0) * (v[0:-2:2] + 4.0 * v[1:-1:2] + v[2::2])
    F[2::2] = np.cumsum(pairs)

    odd = np.arange(1, n, 2)
    last = (h / 24.0) * (-v[odd[1:] - 2] + 13.0 * v[odd[1:] - 1] + 13.0 * v[odd[1:]] - v[np.minimum(odd[1:] + 1, n - 1)])
    # interior 4-point rule needs a node past the right end; the final
    # subinterval (odd last index) uses the left-sided end rule instead
    F[odd[1:]] = F[odd[1:] - 1] + last
    F[1] = (h / 24.0) * (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3])
    if n % 2 == 0:
        i = n - 1
        F[i] = F[i - 1] + (h / 24.0) * (v[i - 3] - 5.0 * v[i - 2] + 19.0 * v[i - 1] + 9.0 * v[i])
    return f.with_values(F)


# ---------------------------------------------------------------------------
# second-order linear ODE
# ---------------------------------------------------------------------------

def _rk4_linear(Q: GridFn, y0: float, yp0: float):
    q = Q.values
    n = q.size
    h = Q.h
    mid = Q.t0 + (np.arange(n - 1) + 0.5) * h
    qm = Q.eval(mid)
    y = np.empty(n)
    v = np.empty(n)
    y[0], v[0] = float(y0), float(yp0)
    yi, vi = y[0], v[0]
    for i in range(n - 1):
        q0, qh, q1 = q[i], qm[i], q[i + 1]
        k1y = vi
        k1v = q0 * yi
        k2y = vi + 0.5 * h * k1v
        k2v = qh * (yi + 0.5 * h * k1y)
        k3y = vi + 0.5 * h * k2v
        k3v = qh * (yi + 0.5 * h * k2y)
        k4y = vi + h * k3v
        k4v = q1 * (yi + h * k3y)
        yi += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        vi += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if abs(yi) > 1e300 or abs(vi) > 1e300:
            raise OverflowDetected(f"solution exceeded 1e300 near t = {Q.t0 + (i + 1) * h:.6g}")
        y[i + 1], v[i + 1] = yi, vi
    return Q.with_values(y), Q.with_values(v)


def solve_linear_ode2(Q: GridFn, y0: float, yp0: float) -> GridFn:
    """Solve y'' = Q(t) y with y(t0) = y0, y'(t0) = yp0.

    Classical RK4 marching on the grid spacing, with Q interpolated
    cubically at half steps; global error O(h^4).  Raises OverflowDetected
    if the solution blows past 1e300.
    """
    y, _ = _rk4_linear(Q, y0, yp0)
    return y


def solve_linear_ode2_with_derivative(Q: GridFn, y0: float, yp0: float):
    """Like solve_linear_ode2 but also returns y' on the grid (from the
    integrated system, not a stencil)."""
    return _rk4_linear(Q, y0, yp0)
