"""Continuum states: phase shift, amplitude, and the assembled wavefunction.

For E > 0 the shell solution continues to the oscillatory regime
(sqrt(-epsilon) -> i sqrt(epsilon)) and the tail becomes a combination of
the imaginary-order Hankel functions,

    psi(x) = sqrt(kx) [B+ H+_{i eta}(kx) + B- H-_{i eta}(kx)],
    B+/- = sqrt(pi/2) e^{-/+ pi eta/2} e^{+/- i (delta + pi/4)},

which carries unit reflection and the S-matrix e^{2 i delta}.  Because
B- H- is the complex conjugate of B+ H+, the tail is real and the whole
matching reduces to one real angle beta = delta + pi/4:

    tan(beta) = [x0 Re h' - L Re h] / [x0 Im h' - L Im h],
    h(x) = sqrt(kx) H+_{i eta}(kx),  L = x0 psi_in'/psi_in.

In the shell regime this collapses to the closed form

    tan(beta) = tanh(eta pi/2) (eta - c t) / (c + eta t),
    t = tan[eta ln(k x0/2) - arg Gamma(i eta)],

whose denominator vanishes exactly on the bound-state ladder (the
S-matrix poles).  ``c`` is the same matching constant as in boundstates:
"exact" (energy-dependent cutoff log-derivative, agrees with direct
integration to O((k x0)^2)) or "weak" (the closed-form 2 nu limit).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .boundstates import cutoff_logderiv, inner_wavefunction, _constant
from .potential import DerivedParams, PotentialParams
from .specfun import hankel_imag, hankel_imag_deriv

# |1 + (eta/c) tan(theta)| below this is reported as an S-matrix pole.
POLE_TOL = 1e-8


@dataclass(frozen=True)
class ScatteringState:
    """One continuum solution: energy, phase shift, and matched amplitudes."""

    energy: float
    k: float
    epsilon: float
    delta: float
    amp_A: float
    coeff_Bplus: complex
    coeff_Bminus: complex

    @property
    def smatrix(self) -> complex:
        return smatrix(self.delta)


def smatrix(delta: float) -> complex:
    """Unit-modulus S-matrix e^{2 i delta}."""
    return cmath.exp(2j * delta)


def _wrap_halfpi(a: float) -> float:
    """Fold an angle into (-pi/2, pi/2] (phase shifts are defined mod pi)."""
    a = math.remainder(a, math.pi)
    if a <= -0.5 * math.pi:
        a += math.pi
    return a


def _check_energy(p: PotentialParams, energy: float) -> float:
    if not energy > 0.0:
        raise ParameterError(f"scattering needs energy > 0, got {energy}")
    k = math.sqrt(2.0 * energy)
    if k * p.x0 >= 0.1:
        raise ParameterError(
            f"k*x0 = {k * p.x0:.3e} outside the shell regime (needs < 0.1)"
        )
    return k


def phase_shift_detail(
    p: PotentialParams, d: DerivedParams, energy: float, constant: str = "exact"
) -> tuple[float, bool, float]:
    """(delta, pole_flag, denominator) of the closed-form phase shift.

    delta is the principal value in (-pi/2, pi/2]; the pole flag marks
    |denominator| = |1 + (eta/c) tan(theta)| < POLE_TOL, where the
    S-matrix diverges on the bound-state ladder.  At a flagged pole delta
    is the limiting value +-pi/2 - pi/4.
    """
    k = _check_energy(p, energy)
    if constant == "exact":
        c = cutoff_logderiv(p, d, energy) - 0.5
    else:
        c = _constant(p, d, constant)
    theta = d.eta * math.log(0.5 * k * p.x0) - d.gamma_imag.argument_wrapped
    t = math.tan(theta)
    num = math.tanh(0.5 * d.eta * math.pi) * (d.eta - c * t)
    den = c + d.eta * t
    denom_normalized = den / c if c != 0.0 else math.inf
    pole = abs(denom_normalized) < POLE_TOL
    if pole:
        delta = math.copysign(0.5 * math.pi, num) - 0.25 * math.pi
    else:
        delta = math.atan2(num, den) - 0.25 * math.pi
    return _wrap_halfpi(delta), pole, denom_normalized


def phase_shift(
    p: PotentialParams, d: DerivedParams, energy: float, constant: str = "exact"
) -> float:
    """Principal-value phase shift from the closed-form matching."""
    return phase_shift_detail(p, d, energy, constant)[0]


def phase_shift_exact(p: PotentialParams, d: DerivedParams, energy: float) -> float:
    """Phase shift from full C^1 matching with exact Hankel tails.

    No small-k*x0 expansion at all: this is the angle the assembled
    wavefunction actually needs, accurate to roundoff.  Principal value
    in (-pi/2, pi/2].
    """
    k = _check_energy(p, energy)
    L = cutoff_logderiv(p, d, energy)
    hv, hd = _tail_basis(d, k, p.x0)
    num = p.x0 * hd.real - L * hv.real
    den = p.x0 * hd.imag - L * hv.imag
    return _wrap_halfpi(math.atan2(num, den) - 0.25 * math.pi)


def _tail_basis(d: DerivedParams, k: float, x: float) -> tuple[complex, complex]:
    """h(x) = sqrt(kx) H+_{i eta}(kx) and dh/dx."""
    kx = k * x
    h = hankel_imag(1, d.eta, kx)
    hp = hankel_imag_deriv(1, d.eta, kx)
    val = math.sqrt(kx) * h
    der = k * (0.5 * h / math.sqrt(kx) + math.sqrt(kx) * hp)
    return val, der


def scattering_amplitude(
    p: PotentialParams, d: DerivedParams, energy: float, delta: float
) -> float:
    """Inner amplitude A of the assembled wavefunction, Eckart side scaled to 1.

    Shell-regime closed form.  The tail side is the small-argument Hankel
    combination

        psi_tail(x0) ~ sqrt(k x0) sqrt(pi/2) (2/(eta |Gamma(i eta)| sinh(eta pi)))
            * { e^{eta pi/2} sin(phi + delta + pi/4)
                - e^{-eta pi/2} sin(phi - delta - pi/4) },
        phi = eta ln(k x0/2) - arg Gamma(i eta),

    and A is its ratio to the shell solution at the cutoff.  With the
    leading power psi_in ~ 2^{-nu/2} sqrt(lambda x0) (lambda x0)^{nu} this
    reproduces the 2^{nu/2} sqrt(2 pi k/lambda) (lambda x0)^{-nu} / (...)
    prefactor scaling; the exact cutoff value is kept here (the weak-shell
    form drops the O(1) hypergeometric factor and the deep-shell
    prefactor, and then the assembled wavefunction fails continuity).
    Exponents are halved relative to the stored nu because nu/2 is the
    hypergeometric exponent, and the value refers to the normalized inner
    convention (the raw one carries 2^{tau/2}, overflowing for deep
    shells).
    """
    k = _check_energy(p, energy)
    phi = d.eta * math.log(0.5 * k * p.x0) - d.gamma_imag.argument_wrapped
    sinh_eta_pi = math.sinh(d.eta * math.pi)
    brace = math.exp(0.5 * d.eta * math.pi) * math.sin(phi + delta + 0.25 * math.pi) - math.exp(
        -0.5 * d.eta * math.pi
    ) * math.sin(phi - delta - 0.25 * math.pi)
    tail = (
        math.sqrt(k * p.x0)
        * math.sqrt(0.5 * math.pi)
        * 2.0
        * brace
        / (d.eta * d.gamma_imag.modulus * sinh_eta_pi)
    )
    return tail / inner_wavefunction(p, d, energy).value(p.x0)


@dataclass(frozen=True)
class ScatteringWavefunction:
    """Assembled continuum wavefunction, real up to roundoff.

    value(x) evaluates A * psi_in on (0, x0) and
    2 Re[B+ sqrt(kx) H+_{i eta}(kx)] beyond; value_complex(x) exposes the
    two-Hankel combination for residual checks.
    """

    params: PotentialParams
    derived: DerivedParams
    energy: float
    k: float
    delta: float
    amp_A: float
    coeff_Bplus: complex
    coeff_Bminus: complex

    def value(self, x: float) -> float:
        if x < self.params.x0:
            inner = inner_wavefunction(self.params, self.derived, self.energy)
            return self.amp_A * inner.value(x)
        return self.value_complex(x).real

    def value_complex(self, x: float) -> complex:
        kx = self.k * x
        return math.sqrt(kx) * (
            self.coeff_Bplus * hankel_imag(1, self.derived.eta, kx)
            + self.coeff_Bminus * hankel_imag(-1, self.derived.eta, kx)
        )

    def derivative(self, x: float) -> float:
        if x < self.params.x0:
            inner = inner_wavefunction(self.params, self.derived, self.energy)
            return self.amp_A * inner.derivative(x)
        e = self.derived.eta
        kx = self.k * x
        out = 0.0j
        for sign, b in ((1, self.coeff_Bplus), (-1, self.coeff_Bminus)):
            h = hankel_imag(sign, e, kx)
            hp = hankel_imag_deriv(sign, e, kx)
            out += b * self.k * (0.5 * h / math.sqrt(kx) + math.sqrt(kx) * hp)
        return out.real


def scattering_wavefunction(
    p: PotentialParams, d: DerivedParams, energy: float
) -> ScatteringWavefunction:
    """Assemble the continuum solution with exact C^1 matching at x0."""
    k = _check_energy(p, energy)
    delta = phase_shift_exact(p, d, energy)
    beta = delta + 0.25 * math.pi
    bplus = math.sqrt(0.5 * math.pi) * math.exp(-0.5 * math.pi * d.eta) * cmath.exp(1j * beta)
    bminus = math.sqrt(0.5 * math.pi) * math.exp(0.5 * math.pi * d.eta) * cmath.exp(-1j * beta)
    inner = inner_wavefunction(p, d, energy)
    kx0 = k * p.x0
    tail = math.sqrt(kx0) * (
        bplus * hankel_imag(1, d.eta, kx0) + bminus * hankel_imag(-1, d.eta, kx0)
    )
    amp = tail.real / inner.value(p.x0)
    return ScatteringWavefunction(
        params=p,
        derived=d,
        energy=energy,
        k=k,
        delta=delta,
        amp_A=amp,
        coeff_Bplus=bplus,
        coeff_Bminus=bminus,
    )


def solve_scattering(p: PotentialParams, d: DerivedParams, energy: float) -> ScatteringState:
    """ScatteringState record for one energy (exact matching throughout)."""
    wf = scattering_wavefunction(p, d, energy)
    return ScatteringState(
        energy=energy,
        k=wf.k,
        epsilon=2.0 * energy / (p.lam * p.lam),
        delta=wf.delta,
        amp_A=wf.amp_A,
        coeff_Bplus=wf.coeff_Bplus,
        coeff_Bminus=wf.coeff_Bminus,
    )


def phase_sweep(
    p: PotentialParams,
    d: DerivedParams,
    energies,
    constant: str = "exact",
):
    """Vector sweep: principal delta, unwrapped delta, branch index, pole flags.

    The closed form determines delta modulo pi; the unwrapped column adds
    the multiple of pi that makes the sweep continuous (ordered by
    energy), and branch_index records that multiple.
    """
    energies = np.asarray(list(energies), dtype=float)
    order = np.argsort(energies)
    principal = np.empty_like(energies)
    poles = np.zeros(energies.shape, dtype=int)
    for i, e in enumerate(energies):
        delta, pole, _ = phase_shift_detail(p, d, float(e), constant)
        principal[i] = delta
        poles[i] = int(pole)
    unwrapped = principal.copy()
    branch = np.zeros(energies.shape, dtype=int)
    shift = 0
    for a, b in zip(order, order[1:]):
        step = principal[b] - principal[a]
        # smallest continuation step mod pi
        turns = -round(step / math.pi)
        shift_b = shift + turns
        unwrapped[b] = principal[b] + math.pi * shift_b
        branch[b] = shift_b
        shift = shift_b
    unwrapped[order[0]] = principal[order[0]]
    branch[order[0]] = 0
    return principal, unwrapped, branch, poles
