"""Physics payloads: pair-distance moments (with and without a hard core),
Coulomb-type self-energies, neutrino-pair-exchange self-energies, and the
geometric constant <r12.r23>.

Self-energy totals are always pair count times the per-pair energy,
W = N(N-1)/2 * U, with U = coupling * <1/s^k>. Note that the closed form
often quoted as W_n = 2n/(n+2) Z(Z-1) q^2 / R^(n-2) double-counts pairs:
the pair-count route gives n/(n+2) Z(Z-1) q^2 / R^(n-2), which is what this
module computes (it reproduces W_3 = (3/5) Z(Z-1) e0^2/R).

All energies are in caller-supplied units. Reference values for nucleon
applications (documented presets, never applied implicitly): hard-core
radius r_c = 0.5e-13 cm and standard-model neutrino couplings
a_e = 0.964, a_p = 0.036, a_n = -1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    BallGeometry,
    DivergentMomentError,
    DomainError,
    UnsupportedError,
    beta,
    beta_ext,
    inc_beta,
    inc_beta_ext,
    inc_gamma_upper,
    log_gamma,
)

__all__ = [
    "MomentSpec",
    "SelfEnergySpec",
    "HARD_CORE_RADIUS_CM",
    "COUPLING_ELECTRON",
    "COUPLING_PROTON",
    "COUPLING_NEUTRON",
    "moment_uniform",
    "moment_uniform_gamma_forms",
    "moment_gaussian",
    "moment_hardcore",
    "coulomb_pair_energy",
    "coulomb_self_energy",
    "coulomb_gaussian_pair_energy",
    "coulomb_gaussian_self_energy",
    "neutrino_self_energy_uniform",
    "neutrino_self_energy_gaussian",
    "dot_constant",
]

HARD_CORE_RADIUS_CM = 0.5e-13
COUPLING_ELECTRON = 0.964
COUPLING_PROTON = 0.036
COUPLING_NEUTRON = -0.5


@dataclass(frozen=True)
class MomentSpec:
    """Moment order plus an optional hard-core lower cutoff (0 = none)."""
    order: int
    hard_core: float = 0.0

    def __post_init__(self):
        if self.hard_core < 0.0:
            raise DomainError("hard-core radius must be >= 0")


@dataclass(frozen=True)
class SelfEnergySpec:
    """Pairwise self-energy request: N(N-1)/2 pairs at the given coupling."""
    count: int
    coupling: float = 1.0
    geometry: BallGeometry = None
    sigma: float = None

    def __post_init__(self):
        if self.count < 2:
            raise DomainError("need at least two particles for a pair energy")

    @property
    def pair_count(self) -> float:
        return self.count * (self.count - 1) / 2.0


def moment_uniform(geometry: BallGeometry, m: int) -> float:
    """<s^m> for the uniform ball:
    2^(n+m) (n/(n+m)) B((n+1)/2, (n+1+m)/2) / B((n+1)/2, 1/2) R^m,
    valid for integer m >= -(n-1)."""
    n, R = geometry.dimension, geometry.radius
    if m < -(n - 1):
        raise DivergentMomentError(
            f"<s^{m}> diverges for the uniform {n}-ball (needs m >= -(n-1) = {-(n - 1)})")
    if m == 0:
        return 1.0
    p = (n + 1) / 2.0
    return (2.0 ** (n + m) * (n / (n + m)) * beta(p, p + m / 2.0) / beta(p, 0.5) * R ** m)


def moment_uniform_gamma_forms(geometry: BallGeometry, m: int) -> tuple:
    """The two equivalent gamma-function forms of <s^m> (cross-check surface)."""
    n, R = geometry.dimension, geometry.radius
    if m < -(n - 1):
        raise DivergentMomentError(f"<s^{m}> diverges (needs m >= -(n-1))")
    g = math.lgamma
    form1 = ((2.0 * R) ** m * (n / (n + m))
             * math.exp(g((n + m + 1) / 2.0) + g(n + 1.0) - g(n + 1.0 + m / 2.0) - g((n + 1) / 2.0)))
    form2 = ((n / (n + m)) ** 2
             * math.exp(g(n + m + 1.0) + g(n / 2.0) - g((n + m) / 2.0) - g(n + 1.0 + m / 2.0))
             * R ** m)
    return form1, form2


def moment_gaussian(n: int, sigma: float, m: int) -> float:
    """<s^m> for the Gaussian cloud: (2 sigma)^m Gamma((n+m)/2) / Gamma(n/2)."""
    if n + m <= 0:
        raise DivergentMomentError(f"<s^{m}> diverges for the Gaussian in n={n} (needs n+m > 0)")
    if sigma <= 0.0:
        raise DomainError("sigma must be positive")
    return (2.0 * sigma) ** m * math.exp(log_gamma((n + m) / 2.0) - log_gamma(n / 2.0))


def _hardcore_h(geometry: BallGeometry, r_c: float, m: int) -> float:
    """H(R, r_c; m, n), the truncated-support moment kernel:

        H = (2R)^(n+m)/(n+m) [B(pm, p) - B_xc(pm, p)]
          - r_c^(n+m)/(n+m) [B(1/2, p) - B_xc(1/2, p)],

    p = (n+1)/2, pm = (n+1+m)/2, xc = (r_c/2R)^2. Differentiating the
    cumulative kernel pins the moment shift to the FIRST argument of the
    incomplete beta (tabulations that put it second disagree with direct
    quadrature). For m+n < 0 the beta functions are continued analytically.
    """
    n, R = geometry.dimension, geometry.radius
    if m + n == 0:
        raise DivergentMomentError("m + n = 0 is a logarithmic case the closed form cannot reach")
    pm = (n + 1 + m) / 2.0
    if pm <= 0.0 and pm == int(pm):
        raise DivergentMomentError(
            f"(n+1+m)/2 = {pm} hits a beta-function pole; this moment order is unsupported")
    p = (n + 1) / 2.0
    xc = (r_c / (2.0 * R)) ** 2
    first = (2.0 * R) ** (n + m) / (n + m) * (beta_ext(p, pm) - inc_beta_ext(xc, pm, p))
    second = r_c ** (n + m) / (n + m) * (beta(0.5, p) - inc_beta(xc, 0.5, p))
    return first - second


def moment_hardcore(geometry: BallGeometry, r_c: float, m: int) -> float:
    """<s^m> over [r_c, 2R] (both numerator and normalization truncated):
    H(R, r_c; m, n) / H(R, r_c; 0, n). Negative orders below -(n-1) are
    meaningful here because the cutoff removes the s = 0 divergence."""
    n, R = geometry.dimension, geometry.radius
    if r_c >= 2.0 * R:
        raise DomainError(f"hard core r_c={r_c!r} leaves empty support (needs r_c < 2R)")
    if not (r_c > 0.0):
        raise DomainError("hard-core radius must be positive; use moment_uniform for r_c = 0")
    if m == 0:
        return 1.0
    return _hardcore_h(geometry, r_c, m) / _hardcore_h(geometry, r_c, 0)


# ---------------------------------------------------------------------------
# Coulomb-type self-energies (1/s^(n-2) pair potential)
# ---------------------------------------------------------------------------

def coulomb_pair_energy(geometry: BallGeometry, q2: float = 1.0) -> float:
    """Average pair energy U_n = q^2 <1/s^(n-2)> = q^2 2n / ((n+2) R^(n-2))."""
    n, R = geometry.dimension, geometry.radius
    if n < 3:
        raise UnsupportedError("the 1/s^(n-2) pair potential needs n >= 3")
    return q2 * 2.0 * n / ((n + 2.0) * R ** (n - 2))


def coulomb_self_energy(spec: SelfEnergySpec) -> float:
    """Total W = N(N-1)/2 * U_n = n/(n+2) N(N-1) q^2 / R^(n-2)."""
    if spec.geometry is None:
        raise DomainError("coulomb_self_energy needs a ball geometry")
    return spec.pair_count * coulomb_pair_energy(spec.geometry, spec.coupling)


def coulomb_gaussian_pair_energy(n: int, sigma: float, q2: float = 1.0) -> float:
    """Per-pair energy for a Gaussian charge cloud:
    q^2 <1/s^(n-2)> = q^2 / (2^(n-2) Gamma(n/2) sigma^(n-2))."""
    if n < 3:
        raise UnsupportedError("the 1/s^(n-2) pair potential needs n >= 3")
    return q2 * moment_gaussian(n, sigma, -(n - 2))


def coulomb_gaussian_self_energy(spec: SelfEnergySpec, n: int = None) -> float:
    if spec.sigma is None:
        raise DomainError("coulomb_gaussian_self_energy needs sigma")
    dim = n if n is not None else (spec.geometry.dimension if spec.geometry else 3)
    return spec.pair_count * coulomb_gaussian_pair_energy(dim, spec.sigma, spec.coupling)


# ---------------------------------------------------------------------------
# Neutrino-pair exchange (1/s^5 pair potential, 3 dimensions)
# ---------------------------------------------------------------------------

def neutrino_self_energy_uniform(radius: float, r_c: float, count: int,
                                 g_f2: float = 1.0, a2: float = 1.0) -> float:
    """W_3 for N particles uniformly distributed in a 3-ball with hard core:

        W = N(N-1)/2 * (a^2 G_F^2 / 4 pi^3)
            * (3/(2 r_c^2 R^3) - 9/(4 r_c R^4) + 9/(8 R^5) - 3 r_c/(16 R^6)),

    the bracket being int_{r_c}^{2R} s^-5 P_3(s) ds in closed form. The
    coupling product a^2 is an explicit factor (default 1); see the module
    constants for the standard-model values.
    """
    if not (0.0 < r_c < 2.0 * radius):
        raise DomainError(f"need 0 < r_c < 2R, got r_c={r_c!r}, R={radius!r}")
    if count < 2:
        raise DomainError("need at least two particles")
    R = radius
    bracket = (3.0 / (2.0 * r_c ** 2 * R ** 3) - 9.0 / (4.0 * r_c * R ** 4)
               + 9.0 / (8.0 * R ** 5) - 3.0 * r_c / (16.0 * R ** 6))
    return count * (count - 1) / 2.0 * bracket * a2 * g_f2 / (4.0 * math.pi ** 3)


def neutrino_self_energy_gaussian(sigma: float, r_c: float, count: int,
                                  g_f2: float = 1.0, a2: float = 1.0) -> float:
    """W_3 for a Gaussian cloud with hard core:

        W = [exp(-r_c^2/4 sigma^2)/r_c^2 - Gamma(0, r_c^2/4 sigma^2)/(4 sigma^2)]
            * N(N-1) a^2 G_F^2 / (32 sigma^3 pi^(7/2)).
    """
    if not (r_c > 0.0):
        raise DomainError("hard-core radius must be positive")
    if not (sigma > 0.0):
        raise DomainError("sigma must be positive")
    if count < 2:
        raise DomainError("need at least two particles")
    v = r_c ** 2 / (4.0 * sigma ** 2)
    bracket = math.exp(-v) / r_c ** 2 - inc_gamma_upper(0.0, v) / (4.0 * sigma ** 2)
    return bracket * count * (count - 1) * a2 * g_f2 / (32.0 * sigma ** 3 * math.pi ** 3.5)


# ---------------------------------------------------------------------------
# Geometric constants
# ---------------------------------------------------------------------------

def dot_constant(n: int, scale: float = 1.0, kind: str = "uniform") -> float:
    """<r12 . r23> for three independent points: -n/(n+2) R^2 for the uniform
    ball (scale = R) and -n sigma^2 for the Gaussian (scale = sigma).

    Both equal -(1/2) <s^2> for the matching density; the identity is checked
    on every call.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if kind == "uniform":
        value = -n / (n + 2.0) * scale ** 2
        half_s2 = -0.5 * moment_uniform(BallGeometry(n, scale), 2)
    elif kind == "gaussian":
        value = -n * scale ** 2
        half_s2 = -0.5 * moment_gaussian(n, scale, 2)
    else:
        raise DomainError(f"kind must be 'uniform' or 'gaussian', got {kind!r}")
    if abs(value - half_s2) > 1e-12 * abs(value):
        raise AssertionError("closed form disagrees with -(1/2)<s^2>; internal inconsistency")
    return value
