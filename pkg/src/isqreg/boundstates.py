"""Bound states of the regularized inverse-square potential.

The wavefunction is assembled from two exact pieces matched at the cutoff
x0:

* inner (Eckart shell): [1 + cosh(lambda x)]^(tau/2) sqrt(sinh(lambda x))
  (cosh(lambda x) - 1)^(nu/2) 2F1(...), evaluated with the normalization
  [(1+z)/2]^(tau/2) so the shell prefactor stays O(1) in double precision,
* outer tail: B sqrt(kx) K_{i eta}(kx).

C^1 continuity at x0 quantizes k.  In the shell regime
(lambda*x0 << 1, k*x0 << 1) the inner log-derivative at the cutoff tends
to an energy-independent constant, so the wavenumbers form a geometric
ladder

    k_n = (2/x0) exp{ (1/eta) [-n pi + arg Gamma(i eta) - atan(c/eta)] }

with E_{n+1}/E_n = e^{-2 pi/eta}.  Two choices of the matching constant c
are implemented:

* ``constant="exact"``: c is the actual cutoff log-derivative of the
  shell solution in the zero-energy limit (computed from the 2F1 series).
  This is the constant the regularized model really produces; seeds built
  from it agree with exact roots to O((k x0)^2).
* ``constant="weak"``: the closed form c = 2 nu, the weak-shell limiting
  value.  It reproduces the geometric ladder but offsets the whole tower,
  because it drops an O(1) shell correction (the shell floor
  (mu - mu_tilde)/(2 x0^2) turns the cutoff log-derivative into a Bessel
  ratio at argument sqrt(mu - mu_tilde), which only reduces to nu as
  mu -> mu_tilde).

Both constants satisfy the same quantization identity
tan[eta ln(k x0 / 2) - arg Gamma(i eta)] = -c/eta at their own ladder.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import MatchingError, ParameterError
from .potential import DerivedParams, PotentialParams, derive_params
from .specfun import (
    bessel_k_imag,
    bessel_k_imag_deriv,
    hyp2f1,
    hyp2f1_deriv,
)

# States reported under the asymptotic ladder must satisfy k*x0 below this.
KX0_GUARD = 0.1


@dataclass(frozen=True)
class InnerSolution:
    """Shell-region solution psi_in and its x-derivative on (0, x0].

    nu, tau, epsilon are the solution parameters (epsilon = 2E/lambda^2);
    the hypergeometric exponents are nu/2 and tau/2.  The overall scale is
    fixed by the [(1+z)/2]^(tau/2) normalization, not the raw (1+z)^(tau/2)
    one, which would overflow for the deep shells this problem produces.
    """

    params: PotentialParams
    nu: float
    tau: float
    epsilon: float
    _a: complex = field(repr=False, default=0j)
    _b: complex = field(repr=False, default=0j)
    _c: float = field(repr=False, default=0.0)

    def _pieces(self, x: float):
        lam = self.params.lam
        if not 0.0 < x <= self.params.x0:
            raise ParameterError(f"inner solution defined on (0, x0], got x={x}")
        y = lam * x
        sh2 = math.sinh(0.5 * y) ** 2
        w = -sh2  # (1 - cosh)/2, exact small-y form
        f = hyp2f1(self._a, self._b, self._c, w)
        fp = hyp2f1_deriv(self._a, self._b, self._c, w)
        return y, sh2, f, fp

    def value(self, x: float) -> float:
        y, sh2, f, _ = self._pieces(x)
        half_nu = 0.5 * self.nu
        half_tau = 0.5 * self.tau
        log_mag = (
            2.0 * half_tau * math.log(math.cosh(0.5 * y))
            + 0.5 * math.log(math.sinh(y))
            + half_nu * math.log(2.0 * sh2)
        )
        return math.exp(log_mag) * f.real

    def hyp_factor(self, x: float) -> float:
        """The 2F1 factor of the solution at x (tends to 1 at the origin)."""
        _, _, f, _ = self._pieces(x)
        return f.real

    def logderiv(self, x: float) -> float:
        """x-independent-scale logarithmic derivative psi'/psi at x."""
        y, _, f, fp = self._pieces(x)
        lam = self.params.lam
        half_nu = 0.5 * self.nu
        half_tau = 0.5 * self.tau
        ratio = (fp / f).real
        return lam * (
            half_tau * math.tanh(0.5 * y)
            + 0.5 / math.tanh(y)
            + half_nu / math.tanh(0.5 * y)
            - 0.5 * math.sinh(y) * ratio
        )

    def derivative(self, x: float) -> float:
        return self.value(x) * self.logderiv(x)


def inner_wavefunction(p: PotentialParams, d: DerivedParams, energy: float) -> InnerSolution:
    """Exact shell-region solution at the given energy (either sign)."""
    eps = 2.0 * energy / (p.lam * p.lam)
    se = complex(math.sqrt(-eps)) if eps <= 0 else 1j * math.sqrt(eps)
    half = 0.5 * (d.nu + d.tau) + 0.5
    return InnerSolution(
        params=p,
        nu=d.nu,
        tau=d.tau,
        epsilon=eps,
        _a=half + se,
        _b=half - se,
        _c=1.0 + d.nu,
    )


@dataclass(frozen=True)
class OuterSolution:
    """Tail solution sqrt(kx) K_{i eta}(kx) and its x-derivative."""

    eta: float
    k: float

    def value(self, x: float) -> float:
        kx = self.k * x
        return math.sqrt(kx) * bessel_k_imag(self.eta, kx)

    def derivative(self, x: float) -> float:
        kx = self.k * x
        kv = bessel_k_imag(self.eta, kx)
        kvp = bessel_k_imag_deriv(self.eta, kx)
        return self.k * (0.5 * kv / math.sqrt(kx) + math.sqrt(kx) * kvp)

    def logderiv(self, x: float) -> float:
        kx = self.k * x
        kv = bessel_k_imag(self.eta, kx)
        return 0.5 / x + self.k * bessel_k_imag_deriv(self.eta, kx) / kv


def outer_wavefunction(d: DerivedParams, k: float) -> OuterSolution:
    if not k > 0.0:
        raise ParameterError(f"outer tail needs k > 0, got {k}")
    return OuterSolution(eta=d.eta, k=k)


def cutoff_logderiv(p: PotentialParams, d: DerivedParams, energy: float) -> float:
    """Dimensionless inner log-derivative x0 psi'/psi at the cutoff."""
    return p.x0 * inner_wavefunction(p, d, energy).logderiv(p.x0)


@lru_cache(maxsize=256)
def shell_matching_constant(p: PotentialParams) -> float:
    """Zero-energy matching constant c = x0 psi'/psi - 1/2 at the cutoff.

    This is the quantity the asymptotic spectrum formula needs; its
    weak-shell limit is 2*(nu/2) = nu and its exact value is a Bessel-type
    ratio at argument ~ sqrt(mu - mu_tilde).
    """
    d = derive_params(p)
    return cutoff_logderiv(p, d, 0.0) - 0.5


def _constant(p: PotentialParams, d: DerivedParams, constant: str) -> float:
    if constant == "exact":
        return shell_matching_constant(p)
    if constant == "weak":
        return 2.0 * d.nu
    raise ParameterError(f"constant must be 'exact' or 'weak', got {constant!r}")


def asymptotic_k(n: int, p: PotentialParams, d: DerivedParams, constant: str = "exact") -> float:
    """Ladder wavenumber k_n = (2/x0) exp{(1/eta)[-n pi + arg Gamma(i eta) - atan(c/eta)]}.

    n >= 1 indexes states downward in |E| (larger n, shallower state);
    consecutive ratios are exactly e^{-pi/eta}.  Raises if k_n x0 leaves
    the shell regime where the ladder formula holds.
    """
    c = _constant(p, d, constant)
    arg = d.gamma_imag.argument_wrapped
    k = (2.0 / p.x0) * math.exp((-n * math.pi + arg - math.atan(c / d.eta)) / d.eta)
    if k * p.x0 >= KX0_GUARD:
        raise ParameterError(
            f"asymptotic index n={n} gives k*x0 = {k * p.x0:.3e} >= {KX0_GUARD}; "
            "outside the ladder regime"
        )
    return k


def quantization_residual(
    k: float, p: PotentialParams, d: DerivedParams, constant: str = "exact"
) -> float:
    """Residual of tan[eta ln(k x0/2) - arg Gamma(i eta)] = -c/eta at k."""
    c = _constant(p, d, constant)
    theta = d.eta * math.log(0.5 * k * p.x0) - d.gamma_imag.argument_wrapped
    return math.tan(theta) + c / d.eta


@dataclass(frozen=True)
class BoundState:
    """One quantized level.

    n is the spectral index and equals the node count of the assembled
    wavefunction; coeff_B is the outer/inner amplitude ratio in the
    normalized inner convention (the raw (1+z)^(tau/2) convention differs
    by the constant 2^(tau/2), which overflows for deep shells).
    """

    n: int
    k: float
    energy: float
    coeff_B: float
    nodes: int


def _logderiv_mismatch(k: float, p: PotentialParams, d: DerivedParams) -> float:
    e = -0.5 * k * k
    li = cutoff_logderiv(p, d, e)
    lo = p.x0 * outer_wavefunction(d, k).logderiv(p.x0)
    return li - lo


def match_exact(
    p: PotentialParams, d: DerivedParams, k_bracket: tuple[float, float]
) -> BoundState:
    """Locate the C^1-matching root of the log-derivative mismatch.

    The bracket must contain exactly one sign change; the root is refined
    in ln k to 1e-12 relative.  Warns if the mismatch changes sign more
    than once across the bracket subdivision.
    """
    k_lo, k_hi = sorted(k_bracket)
    t_lo, t_hi = math.log(k_lo), math.log(k_hi)
    f = lambda t: _logderiv_mismatch(math.exp(t), p, d)
    samples = [f(t) for t in np.linspace(t_lo, t_hi, 9)]
    nonzero = [s for s in samples if s != 0.0]
    crossings = sum(1 for a, b in zip(nonzero, nonzero[1:]) if (a < 0) != (b < 0))
    flips = max(crossings, sum(1 for s in samples[1:-1] if s == 0.0))
    if flips == 0:
        raise MatchingError(
            f"no sign change of the matching mismatch in k bracket ({k_lo}, {k_hi})"
        )
    if flips > 1:
        warnings.warn(
            f"matching mismatch changes sign {flips} times in ({k_lo}, {k_hi}); "
            "bracket may contain several roots",
            stacklevel=2,
        )
    t_root = brentq(f, t_lo, t_hi, xtol=1e-13, rtol=8.9e-16)
    k = math.exp(t_root)
    energy = -0.5 * k * k
    inner = inner_wavefunction(p, d, energy)
    outer = outer_wavefunction(d, k)
    coeff_b = inner.value(p.x0) / outer.value(p.x0)
    nodes = count_nodes(p, d, k)
    return BoundState(n=nodes, k=k, energy=energy, coeff_B=coeff_b, nodes=nodes)


def count_nodes(p: PotentialParams, d: DerivedParams, k: float) -> int:
    """Sign changes of the assembled wavefunction on (0, infinity).

    Inner zeros can only come from the hypergeometric factor (the
    prefactors are positive), sampled on a grid resolving its Bessel-type
    oscillation; outer zeros come from the log-periodic cosine of
    K_{i eta}, sampled at better than quarter-period down to k*x ~ 1e-8
    and out to the decay region.
    """
    energy = -0.5 * k * k
    inner = inner_wavefunction(p, d, energy)
    u0 = math.sqrt(max(p.mu - p.mu_tilde, 0.0) + 1.0)
    n_in = max(32, int(24.0 * u0))
    xs = np.linspace(p.x0 / n_in, p.x0, n_in)
    vals = [inner.value(x) for x in xs]
    nodes = _sign_changes(vals)

    outer = outer_wavefunction(d, k)
    # phase rate in ln x is eta in the log-oscillation zone and falls off
    # beyond kx ~ 1; march from the cutoff to kx = 20 where the tail is
    # monotone
    t_lo = math.log(p.x0)
    t_hi = math.log(20.0 / k)
    step = 0.25 * math.pi / max(d.eta, 1.0)
    n_out = max(16, int((t_hi - t_lo) / step) + 1)
    ts = np.linspace(t_lo, t_hi, n_out)
    vals = [outer.value(math.exp(t)) for t in ts]
    nodes += _sign_changes(vals)
    # seam: the pieces are rescaled to agree at x0, so no extra crossing
    return nodes


def _sign_changes(values) -> int:
    signs = [v for v in values if v != 0.0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a < 0) != (b < 0))


@dataclass(frozen=True)
class SpectrumResult:
    """Matched ladder states, the prefactor energy e0, and the fitted ratio."""

    states: tuple[BoundState, ...]
    e0: float
    ratio_fit: float


def renormalized_e0(p: PotentialParams, d: DerivedParams, constant: str = "exact") -> float:
    """Prefactor energy e0 = -(2/x0^2) exp{(2/eta)[arg Gamma(i eta) - atan(c/eta)]}.

    The wrapped (principal) branch of arg Gamma enters here; e0 therefore
    jumps by the factor e^{-4 pi/eta} whenever the continuous argument
    crosses a branch edge.  e0 anchors the asymptotic ladder and is not a
    true ground-state energy.
    """
    c = _constant(p, d, constant)
    return _e0_from_bracket(d.gamma_imag.argument_wrapped - math.atan(c / d.eta), d.eta, p.x0)


def _e0_from_bracket(bracket: float, eta: float, x0: float) -> float:
    return -(2.0 / (x0 * x0)) * math.exp(2.0 * bracket / eta)


def spectrum(
    p: PotentialParams,
    d: DerivedParams | None = None,
    n_count: int = 5,
    kx0_start: float = 1e-3,
    constant: str = "exact",
) -> SpectrumResult:
    """n_count exact-matched ladder states, deepest first.

    The deepest reported state is the first ladder index whose seed
    satisfies k x0 <= kx0_start; each seed is refined by match_exact
    inside a +-25% bracket in ln k.
    """
    if d is None:
        d = derive_params(p)
    if n_count < 1:
        raise ParameterError("n_count must be at least 1")
    n = 1
    while asymptotic_k(n, p, d, constant) * p.x0 > kx0_start:
        n += 1
        if n > 500:
            raise MatchingError("no ladder index reaches the requested k*x0")
    states = []
    for i in range(n, n + n_count):
        seed = asymptotic_k(i, p, d, constant)
        state = match_exact(p, d, (seed * math.exp(-0.25), seed * math.exp(0.25)))
        states.append(state)
    logs = np.log(np.abs([s.energy for s in states]))
    idx = np.array([s.n for s in states], dtype=float)
    slope = np.polyfit(idx, logs, 1)[0]
    return SpectrumResult(
        states=tuple(states), e0=renormalized_e0(p, d, constant), ratio_fit=math.exp(slope)
    )


@dataclass(frozen=True)
class JumpEvent:
    """Branch-edge crossing of arg Gamma(i eta) localized along a mu sweep.

    ``factor`` is the measured prefactor discontinuity, the ratio of
    e0*x0^2 just above to just below the crossing; ``expected_factor`` is
    e^{-4 pi turns / eta} at the localized eta.
    """

    mu: float
    eta: float
    turns: int
    factor: float
    expected_factor: float


@dataclass(frozen=True)
class Figure1Sweep:
    """Ground-state-prefactor sweep e0*x0^2 against the bare coupling mu."""

    mu: np.ndarray
    e0_scaled: np.ndarray
    jump_flag: np.ndarray
    jumps: tuple[JumpEvent, ...]
    crossings: tuple[float, ...]
    bracket_zeros: tuple[float, ...]


def figure1_sweep(
    mu_range: tuple[float, float],
    steps: int,
    mu_tilde: float,
    x0: float,
    lam: float,
    constant: str = "exact",
) -> Figure1Sweep:
    """Sweep e0*x0^2 over mu at fixed mu_tilde, x0, lambda.

    A jump is flagged where the winding count of arg Gamma(i eta) changes
    between consecutive sweep points (the wrapped argument crossed a
    branch edge); each event records the measured e0 ratio and the
    expected factor e^{-4 pi/eta}.  Crossings of e0*x0^2 = -2 coincide
    with zeros of the bracket [arg Gamma(i eta) - atan(c/eta)].
    """
    mu_lo, mu_hi = mu_range
    if not (0.25 < mu_lo < mu_hi):
        raise ParameterError(f"mu range must satisfy 1/4 < lo < hi, got {mu_range}")
    if steps < 2:
        raise ParameterError("need at least 2 sweep points")
    mus = np.linspace(mu_lo, mu_hi, steps)
    e0s = np.empty(steps)
    flags = np.zeros(steps, dtype=int)
    windings = np.empty(steps, dtype=int)
    brackets = np.empty(steps)
    etas = np.empty(steps)
    for i, mu in enumerate(mus):
        p = PotentialParams(mu=float(mu), mu_tilde=mu_tilde, x0=x0, lam=lam)
        d = derive_params(p)
        c = _constant(p, d, constant)
        brackets[i] = d.gamma_imag.argument_wrapped - math.atan(c / d.eta)
        e0s[i] = _e0_from_bracket(brackets[i], d.eta, p.x0) * x0 * x0
        windings[i] = d.gamma_imag.winding
        etas[i] = d.eta

    def point(mu: float):
        pp = PotentialParams(mu=float(mu), mu_tilde=mu_tilde, x0=x0, lam=lam)
        dd = derive_params(pp)
        cc = _constant(pp, dd, constant)
        br = dd.gamma_imag.argument_wrapped - math.atan(cc / dd.eta)
        return _e0_from_bracket(br, dd.eta, pp.x0) * x0 * x0, dd.gamma_imag.winding, dd.eta

    jumps = []
    for i in range(1, steps):
        if windings[i] != windings[i - 1]:
            flags[i] = 1
            # localize the branch-edge crossing, then measure the jump as
            # the e0 ratio across a vanishing mu interval
            lo, hi = float(mus[i - 1]), float(mus[i])
            w_lo = windings[i - 1]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if point(mid)[1] == w_lo:
                    lo = mid
                else:
                    hi = mid
            mu_star = 0.5 * (lo + hi)
            delta = 1e-9 * mu_star
            e_below, _, _ = point(mu_star - delta)
            e_above, _, eta_star = point(mu_star + delta)
            turns = windings[i] - windings[i - 1]
            jumps.append(
                JumpEvent(
                    mu=mu_star,
                    eta=eta_star,
                    turns=turns,
                    factor=float(e_above / e_below),
                    expected_factor=math.exp(-4.0 * math.pi * turns / eta_star),
                )
            )

    crossings = tuple(
        float(mus[i]) for i in range(1, steps)
        if flags[i] == 0 and (e0s[i - 1] + 2.0) * (e0s[i] + 2.0) < 0.0
    )
    zeros = tuple(
        float(mus[i]) for i in range(1, steps)
        if flags[i] == 0 and brackets[i - 1] * brackets[i] < 0.0
    )
    return Figure1Sweep(
        mu=mus, e0_scaled=e0s, jump_flag=flags, jumps=tuple(jumps),
        crossings=crossings, bracket_zeros=zeros,
    )
