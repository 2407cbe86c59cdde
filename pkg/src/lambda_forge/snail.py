"""Flux-tunable nonlinear inductance element and its series array.

A single element is a loop of ``n`` large Josephson junctions (energy ``ej``
each) in parallel with one smaller junction scaled by ``alpha``.  Its
potential in units of the large-junction energy is

    u(phi) = -alpha*cos(phi) - n*cos((2*pi*phi_ext_s - phi) / n)

with ``phi`` the phase across the small junction and ``phi_ext_s`` the loop
flux in units of the flux quantum.  Biased away from zero flux the well
becomes asymmetric and the cubic term of its Taylor expansion provides
three-wave mixing.  An array of N identical elements in series dilutes the
expansion coefficients as c2/N, c3/N^2, c4/N^3 while the linear inductances
add.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NoMinimumError
from .units import H_PLANCK, PHI0_REDUCED, TWO_PI

DEFAULT_AREA_RATIO = 60.0

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SnailSpec:
    """Geometry and bias of a single element.

    alpha      : small/large junction area ratio, single-well regime needs < 0.5
    n_junctions: number of large junctions in the loop
    phi_ext_s  : external flux through the loop, units of the flux quantum
    ej         : Josephson energy of one large junction, Hz
    """

    alpha: float
    n_junctions: int
    phi_ext_s: float
    ej: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(
                f"alpha={self.alpha} outside the single-well regime (0, 0.5)")
        if self.n_junctions < 1:
            raise ValueError("n_junctions must be >= 1")
        if self.ej <= 0.0:
            raise ValueError("ej must be positive")


@dataclass(frozen=True)
class SnailCoeffs:
    """Expansion of the potential around its minimum.

    phi_min : location of the minimum, rad
    c2, c3, c4 : Taylor coefficients u(x) ~ c2 x^2 + c3 x^3 + c4 x^4,
        dimensionless (energy prefactor is the large-junction ej)
    l_s : linear inductance phi0^2 / (2 c2 ej), henries
    """

    phi_min: float
    c2: float
    c3: float
    c4: float
    l_s: float

    def __post_init__(self):
        if self.c2 <= 0.0:
            raise ValueError("c2 must be positive (stable minimum)")


def potential(phi, spec):
    """Potential energy in units of the large-junction ej."""
    a = TWO_PI * spec.phi_ext_s
    n = spec.n_junctions
    return -spec.alpha * np.cos(phi) - n * np.cos((a - phi) / n)


def potential_derivatives(phi, spec):
    """Analytic d^m u / d phi^m for m = 1..4 at ``phi`` (units of ej)."""
    a = TWO_PI * spec.phi_ext_s
    n = spec.n_junctions
    al = spec.alpha
    s, c = np.sin(phi), np.cos(phi)
    sr, cr = np.sin((a - phi) / n), np.cos((a - phi) / n)
    u1 = al * s - sr
    u2 = al * c + cr / n
    u3 = -al * s + sr / n**2
    u4 = -al * c - cr / n**3
    return u1, u2, u3, u4


def _wrap_flux(phi_ext_s):
    """Reduce to the fundamental window [-1/2, 1/2].

    Shifting the loop flux by one quantum translates the potential landscape
    by a full winding (2 pi), leaving every expansion coefficient unchanged;
    the reported minimum is the fundamental-window representative.  IEEE
    remainder keeps +-1/2 inputs on their own side so the odd-in-flux
    branch convention survives at the frustration point.
    """
    if abs(phi_ext_s) <= 0.5:
        return phi_ext_s
    return math.remainder(phi_ext_s, 1.0)


def find_minimum(spec):
    """Locate the potential minimum in (-pi, pi] at the wrapped flux.

    Coarse grid scan guards against a periodic image, golden-section narrows
    the bracket, and a Newton polish on the derivative pins |u'| below 1e-13.
    """
    spec = replace(spec, phi_ext_s=_wrap_flux(spec.phi_ext_s))
    grid = np.linspace(-math.pi, math.pi, 721)
    values = potential(grid, spec)
    k = int(np.argmin(values))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]

    # golden-section on the bracket
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = potential(x1, spec)
    f2 = potential(x2, spec)
    while hi - lo > 1e-12:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = potential(x1, spec)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = potential(x2, spec)
    phi_min = 0.5 * (lo + hi)

    # Newton polish on u'
    for _ in range(60):
        u1, u2, _, _ = potential_derivatives(phi_min, spec)
        if u2 <= 0.0:
            break
        step = u1 / u2
        phi_min -= step
        if abs(step) < 1e-15:
            break

    u1, u2, _, _ = potential_derivatives(phi_min, spec)
    if abs(u1) > 1e-12 or u2 <= 0.0:
        raise NoMinimumError(
            f"no stable minimum found for alpha={spec.alpha}, "
            f"phi_ext_s={spec.phi_ext_s} (|u'|={abs(u1):.2e}, u''={u2:.2e})")
    if phi_min <= -math.pi:
        phi_min += TWO_PI
    elif phi_min > math.pi:
        phi_min -= TWO_PI
    return phi_min


def taylor_coeffs(spec):
    """Expand the potential around its minimum: c_m = u^(m)(phi_min) / m!.

    Coefficients come from the analytic derivatives of the two-cosine
    potential, not finite differences.
    """
    spec = replace(spec, phi_ext_s=_wrap_flux(spec.phi_ext_s))
    phi_min = find_minimum(spec)
    _, u2, u3, u4 = potential_derivatives(phi_min, spec)
    c2 = u2 / 2.0
    c3 = u3 / 6.0
    c4 = u4 / 24.0
    l_s = PHI0_REDUCED**2 / (2.0 * c2 * spec.ej * H_PLANCK)
    return SnailCoeffs(phi_min=phi_min, c2=c2, c3=c3, c4=c4, l_s=l_s)


def array_coeffs(single, n_array):
    """Coefficients of N identical elements in series.

    The phase divides equally across the array, so c2 -> c2/N, c3 -> c3/N^2,
    c4 -> c4/N^3 and the linear inductances add, l_s -> N*l_s.
    """
    if n_array < 1:
        raise ValueError("n_array must be >= 1")
    n = float(n_array)
    return replace(
        single,
        c2=single.c2 / n,
        c3=single.c3 / n**2,
        c4=single.c4 / n**3,
        l_s=single.l_s * n,
    )


def flux_map(phi_ext_f, area_ratio=DEFAULT_AREA_RATIO):
    """Loop flux seen by the coupling element for a given qubit-loop flux.

    Both loops sit in the same global field; the element loop is smaller by
    ``area_ratio``, so its flux is the qubit-loop flux divided by that ratio.
    """
    if area_ratio <= 0.0:
        raise ValueError("area_ratio must be positive")
    return phi_ext_f / area_ratio
