"""Constructors for the explicit almost-soliton families.

Every constructor returns a SolitonSpec: a warped-product profile together
with a radial potential f and soliton function lambda satisfying

    Ric + Hess(f) = lambda <,>

on the working interval.  Closed-form families are built from analytic
derivatives and are expected to satisfy the defining equation to 1e-8;
the quadrature-built general family to 1e-6 at the default resolution.
The verifier module re-checks this for every constructed spec.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidCase, InvalidWarp
from .geometry import Custom, SnCombination, WarpProfile
from .kernel import GridFn, cn, integrate_cumulative

__all__ = [
    "FamilyTag",
    "ClassifiedCase",
    "SolitonSpec",
    "build_einstein_family",
    "build_general_family",
    "build_classified",
    "build_gaussian",
    "CLOSED_FORM_TOL",
    "QUADRATURE_TOL",
]

# sup-norm residual each family is required to meet (composed O(h^4)
# stencil and Simpson error at the default 2001-sample resolution)
CLOSED_FORM_TOL = 1e-8
QUADRATURE_TOL = 1e-6

DEFAULT_RESOLUTION = 2001
DEFAULT_INTERVAL = (0.0, 4.0)


class FamilyTag(Enum):
    EINSTEIN_WARPED = "einstein_warped"
    GENERAL_WARPED = "general_warped"
    CLASSIFIED_FLAT = "classified_flat"
    CLASSIFIED_SPACE_FORM = "classified_space_form"
    CLASSIFIED_HYPERBOLIC_WARPED = "classified_hyperbolic_warped"
    GAUSSIAN = "gaussian"
    CUSTOM = "custom"


class ClassifiedCase(Enum):
    FLAT = "flat"
    SPACE_FORM = "space_form"
    HYPERBOLIC_WARPED = "hyperbolic_warped"


@dataclass(frozen=True)
class SolitonSpec:
    """A candidate gradient Ricci almost soliton on a warped product.

    Invariant (enforced by the verification suite rather than at
    construction, so that building and checking stay independent): the
    defining-equation residual stays below residual_tolerance.

    Note: with f and lambda both radial, df ^ dlambda = 0 holds by
    construction, so lambda is a function of f wherever df != 0; no test
    is needed for that compatibility.
    """

    profile: WarpProfile
    f: GridFn
    lam: GridFn
    family_tag: FamilyTag
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        probe = GridFn(self.profile.t0, self.profile.t1, np.zeros(self.profile.n_samples))
        if not (self.f.same_grid(probe) and self.lam.same_grid(probe)):
            raise ValueError("f and lambda must live on the profile grid")
        if not (np.isfinite(self.f.values).all() and np.isfinite(self.lam.values).all()):
            raise ValueError("potential and soliton function must be finite")

    @property
    def residual_tolerance(self) -> float:
        if self.family_tag in (FamilyTag.GENERAL_WARPED, FamilyTag.CUSTOM):
            return QUADRATURE_TOL
        return CLOSED_FORM_TOL


def _is_pole_start(interval, g0: float, gp0: float) -> bool:
    # the sn/cn combination vanishes at t = 0, so the grid must start there
    return interval[0] == 0.0 and abs(g0) < 1e-14 and abs(gp0 - 1.0) < 1e-14


def build_einstein_family(
    c: float,
    g0: float,
    gp0: float,
    a: float,
    b: float,
    n: int,
    interval=DEFAULT_INTERVAL,
    resolution: int = DEFAULT_RESOLUTION,
    family_tag: FamilyTag = FamilyTag.EINSTEIN_WARPED,
) -> SolitonSpec:
    """Einstein warped product g'' = c g carrying the soliton structure

        f(t)      = a * integral_0^t g + b
        lambda(t) = a g'(t) - (n-1) c

    with g = gp0 * sn_{-c} + g0 * cn_{-c} and the fiber Einstein constant
    rho_sigma = (n-2) (gp0^2 - c g0^2) that makes the total space Einstein.
    """
    if n < 3:
        raise ValueError("einstein family needs n >= 3")
    t0, t1 = float(interval[0]), float(interval[1])
    d = n - 1
    form = SnCombination(k=-float(c), c1=float(gp0), c2=float(g0))
    rho_sigma = (d - 1) * (gp0 * gp0 - c * g0 * g0)
    pole = _is_pole_start(interval, g0, gp0)
    profile = WarpProfile(
        n=n,
        rho_sigma=rho_sigma,
        g=form,
        t0=t0,
        t1=t1,
        n_samples=resolution,
        pole=pole,
        fiber_constant_curvature=True,
    )
    t = profile.grid
    g_grid = GridFn(t0, t1, np.asarray(form.value(t), dtype=float))
    f = a * integrate_cumulative(g_grid) + b
    lam = GridFn(t0, t1, a * np.asarray(form.d1(t), dtype=float) - d * c)
    return SolitonSpec(
        profile=profile,
        f=f,
        lam=lam,
        family_tag=family_tag,
        params={"c": c, "g0": g0, "gp0": gp0, "a": a, "b": b, "n": n},
    )


def build_general_family(
    g,
    rho_sigma: float,
    A: float,
    B: float,
    n: int,
    interval=DEFAULT_INTERVAL,
    resolution: int = DEFAULT_RESOLUTION,
) -> SolitonSpec:
    """Almost soliton on I x_g Sigma for an arbitrary positive warp.

    With a = -rho_sigma / (n-2), the radial system integrates to

        h(t)      = (g'' g - g'^2 - a) / g^3
        f(t)      = B + integral_0^t g(s) [A + (n-2) integral_0^s h] ds
        lambda(t) = -(n-2) (g'^2 + a)/g^2 - g''/g + g'(t) [A + (n-2) integral_0^t h]

    (integrals anchored at the interval start; the constants A, B absorb
    the choice of anchor).  When g'' = c g with matching rho_sigma this
    degenerates to the Einstein family with (A, B) = (a, b).
    """
    if n < 3:
        raise ValueError("general family needs n >= 3")
    t0, t1 = float(interval[0]), float(interval[1])
    d = n - 1
    if isinstance(g, GridFn):
        g = Custom(g)
    profile = WarpProfile(
        n=n,
        rho_sigma=float(rho_sigma),
        g=g,
        t0=t0,
        t1=t1,
        n_samples=resolution,
        pole=False,
        fiber_constant_curvature=True,
    )
    gv, gp, gpp = profile.warp_values
    if np.min(gv) <= 0:
        raise InvalidWarp("general family needs g > 0 on the closed interval")
    a = -float(rho_sigma) / (d - 1)
    h = (gpp * gv - gp * gp - a) / gv**3
    H = integrate_cumulative(GridFn(t0, t1, h))
    inner = A + (d - 1) * H.values
    f = B + integrate_cumulative(GridFn(t0, t1, gv * inner))
    lam_vals = -(d - 1) * (gp * gp + a) / gv**2 - gpp / gv + gp * inner
    return SolitonSpec(
        profile=profile,
        f=f,
        lam=GridFn(t0, t1, lam_vals),
        family_tag=FamilyTag.GENERAL_WARPED,
        params={"rho_sigma": rho_sigma, "A": A, "B": B, "n": n},
    )


def _build_flat(lambda0: float, n: int, r_max: float, resolution: int, tag: FamilyTag) -> SolitonSpec:
    profile = WarpProfile(
        n=n,
        rho_sigma=float(n - 2),
        g=SnCombination(k=0.0, c1=1.0, c2=0.0),
        t0=0.0,
        t1=float(r_max),
        n_samples=resolution,
        pole=True,
        fiber_constant_curvature=True,
    )
    t = profile.grid
    f = GridFn(0.0, float(r_max), 0.5 * lambda0 * t * t)
    lam = GridFn.constant(lambda0, 0.0, float(r_max), resolution)
    return SolitonSpec(
        profile=profile, f=f, lam=lam, family_tag=tag,
        params={"lambda0": lambda0, "n": n},
    )


def build_classified(
    case: ClassifiedCase | str,
    params: dict,
    n: int,
    interval=None,
    resolution: int = DEFAULT_RESOLUTION,
) -> SolitonSpec:
    """Radial representatives of the classified Einstein almost solitons.

    FLAT: Euclidean model with f = lambda0 r^2 / 2 and constant soliton
    function (the affine term of the general flat solution breaks radial
    symmetry and is omitted).  SPACE_FORM: constant-curvature model with
    lambda = a cn_{-c}(r) - (n-1) c and f = a cn_{-c}(r) / c + b; rejects
    c = 0.  HYPERBOLIC_WARPED: the c > 0 warped line, delegated to the
    Einstein family (whose soliton function a g' - (n-1) c is the one the
    defining equation forces).
    """
    case = ClassifiedCase(case)
    if case is ClassifiedCase.FLAT:
        r_max = float(interval[1]) if interval is not None else DEFAULT_INTERVAL[1]
        return _build_flat(float(params.get("lambda0", 1.0)), n, r_max, resolution,
                           FamilyTag.CLASSIFIED_FLAT)

    if case is ClassifiedCase.SPACE_FORM:
        c = float(params["c"])
        if c == 0.0:
            raise InvalidCase("space-form case requires c != 0")
        a = float(params.get("a", 0.0))
        b = float(params.get("b", 0.0))
        r_max = float(interval[1]) if interval is not None else DEFAULT_INTERVAL[1]
        profile = WarpProfile(
            n=n,
            rho_sigma=float(n - 2),
            g=SnCombination(k=-c, c1=1.0, c2=0.0),
            t0=0.0,
            t1=r_max,
            n_samples=resolution,
            pole=True,
            fiber_constant_curvature=True,
        )
        t = profile.grid
        lam = GridFn(0.0, r_max, a * cn(-c, t) - (n - 1) * c)
        f = GridFn(0.0, r_max, (a / c) * cn(-c, t) + b)
        return SolitonSpec(
            profile=profile, f=f, lam=lam,
            family_tag=FamilyTag.CLASSIFIED_SPACE_FORM,
            params={"c": c, "a": a, "b": b, "n": n},
        )

    if case is ClassifiedCase.HYPERBOLIC_WARPED:
        c = float(params["c"])
        if c <= 0.0:
            raise InvalidCase("hyperbolic warped case requires c > 0")
        return build_einstein_family(
            c=c,
            g0=float(params.get("g0", 1.0)),
            gp0=float(params.get("gp0", 0.0)),
            a=float(params.get("a", 0.0)),
            b=float(params.get("b", 0.0)),
            n=n,
            interval=interval if interval is not None else DEFAULT_INTERVAL,
            resolution=resolution,
            family_tag=FamilyTag.CLASSIFIED_HYPERBOLIC_WARPED,
        )

    raise InvalidCase(f"unknown classified case {case!r}")


def build_gaussian(lambda0: float, n: int, r_max: float = 8.0, resolution: int = DEFAULT_RESOLUTION) -> SolitonSpec:
    """Flat model with f = lambda0 r^2/2: shrinking for lambda0 > 0,
    steady (and trivial) for lambda0 = 0, expanding for lambda0 < 0."""
    if n < 2:
        raise ValueError("gaussian needs n >= 2")
    return _build_flat(float(lambda0), n, float(r_max), resolution, FamilyTag.GAUSSIAN)
