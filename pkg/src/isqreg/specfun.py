"""Special functions for the spectral pipeline.

Everything here is self-contained double-precision code: complex gamma
(Lanczos), the Gauss hypergeometric series 2F1 with complex parameters,
the modified Bessel function K of purely imaginary order, and the Hankel
functions H+/H- of purely imaginary order.  Imaginary-order Bessel
functions are not available in scipy (real orders only), and they are the
workhorses of this problem: K_{i eta}(x) oscillates like
cos[eta*ln(x/2) - arg Gamma(i eta)] as x -> 0 and decays like e^{-x} at
large x.

Conventions
-----------
* order arguments named ``eta`` are the positive imaginary part, i.e. the
  functions evaluate K_{i eta}, H+/-_{i eta}.
* small arguments use power series, large arguments the exponential /
  oscillatory asymptotic expansions; the crossover is SERIES_CUTOFF.
* all functions are pure and thread-safe.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ConvergenceError, GammaPoleError, ParameterError

# Series/asymptotic crossover for K_{i eta} and H+/-_{i eta}.  The nested
# small-argument series loses digits past x ~ 10 in double precision while
# the asymptotic expansion reaches ~4e-9 there, so the switch sits at 10.
SERIES_CUTOFF = 10.0

# Smallest order for which the sin(i*eta*pi) connection denominator is
# treated as nondegenerate.
ETA_FLOOR = 1e-8

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# Lanczos g=7, n=9 coefficient set (double precision workhorse).
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Bernoulli quotients B_{2k}/(2k(2k-1)) for the Stirling tail of ln Gamma.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
)


def _is_nonpositive_integer(z: complex, tol: float = 1e-14) -> bool:
    if abs(z.imag) > tol:
        return False
    r = round(z.real)
    return r <= 0 and abs(z.real - r) <= tol * max(1.0, abs(z.real))


def gamma_complex(z: complex) -> complex:
    """Gamma function for complex argument (Lanczos, reflection for Re z < 1/2).

    Relative accuracy is ~1e-13 on the strip needed here.  Raises
    GammaPoleError at nonpositive integers.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise GammaPoleError(f"gamma pole at z={z}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return math.pi / (cmath.sin(math.pi * z) * gamma_complex(1.0 - z))
    zz = z - 1.0
    acc = _LANCZOS_C[0]
    for k, c in enumerate(_LANCZOS_C[1:], start=1):
        acc += c / (zz + k)
    t = zz + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * t ** (zz + 0.5) * cmath.exp(-t) * acc


def _log_sinh(x: float) -> float:
    """ln(sinh x) for x > 0 without overflow."""
    if x > 350.0:
        return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)
    return math.log(math.sinh(x))


def _im_loggamma_imag(eta: float) -> float:
    """Continuous Im ln Gamma(i*eta), eta > 0.

    Upward recurrence pushes the argument to |z| >= 9 where the Stirling
    series converges; each recurrence phase arg(j + i*eta) lies in
    (0, pi/2], so the assembled value is the analytic (unfolded) branch.
    """
    z = complex(0.0, eta)
    shift = 0.0
    m = 0
    while m < 9.0:
        shift += cmath.phase(z + m)
        m += 1
    w = z + m
    val = (w - 0.5) * cmath.log(w) - w + 0.5 * math.log(2.0 * math.pi)
    winv = 1.0 / w
    w2 = winv * winv
    p = winv
    for coef in _STIRLING:
        val += coef * p
        p *= w2
    return val.imag - shift


@dataclass(frozen=True)
class GammaImag:
    """Modulus and argument of Gamma(i*eta) for eta > 0.

    ``argument`` is the analytically continued (unfolded) branch, so it is
    smooth along sweeps in eta; ``argument_wrapped`` folds it back into
    (-pi, pi].  The modulus is fixed by the reflection identity
    |Gamma(i eta)|^2 * eta * sinh(eta*pi) = pi.
    """

    eta: float
    modulus: float
    argument: float

    @property
    def argument_wrapped(self) -> float:
        a = math.remainder(self.argument, 2.0 * math.pi)
        if a <= -math.pi:
            a += 2.0 * math.pi
        return a

    @property
    def winding(self) -> int:
        """Number of 2*pi turns between the continuous and wrapped branches."""
        return round((self.argument - self.argument_wrapped) / (2.0 * math.pi))


def gamma_imag(eta: float) -> GammaImag:
    """Gamma(i*eta) in polar pieces, with a branch-tracked argument."""
    if not eta > 0.0:
        raise ParameterError(f"gamma_imag requires eta > 0, got {eta}")
    log_mod = 0.5 * (math.log(math.pi) - math.log(eta) - _log_sinh(eta * math.pi))
    return GammaImag(eta=eta, modulus=math.exp(log_mod), argument=_im_loggamma_imag(eta))


# ---------------------------------------------------------------------------
# Gauss hypergeometric series
# ---------------------------------------------------------------------------

_HYP_MAX_TERMS = 100_000
_HYP_TOL = 1e-16


def hyp2f1(a: complex, b: complex, c: complex, z: complex) -> complex:
    """2F1(a, b; c; z) by direct power series, |z| < 1.

    The stopping rule requires three consecutive terms below 1e-16 of the
    partial sum; the call sites in this package keep |z| << 1 so the series
    is short.  Raises ParameterError for c a nonpositive integer and
    ConvergenceError for |z| >= 1 or a runaway series.
    """
    a = complex(a)
    b = complex(b)
    c = complex(c)
    z = complex(z)
    if _is_nonpositive_integer(c):
        raise ParameterError(f"hyp2f1: c={c} is a nonpositive integer")
    if abs(z) >= 1.0:
        raise ConvergenceError(f"hyp2f1 series needs |z| < 1, got |z|={abs(z)}")
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    small = 0
    for m in range(_HYP_MAX_TERMS):
        term *= (a + m) * (b + m) * z / ((c + m) * (m + 1))
        total += term
        if abs(term) <= _HYP_TOL * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise ConvergenceError("hyp2f1 series did not converge within 1e5 terms")


def hyp2f1_deriv(a: complex, b: complex, c: complex, z: complex) -> complex:
    """d/dz 2F1(a, b; c; z) = (a b / c) 2F1(a+1, b+1; c+1; z)."""
    a = complex(a)
    b = complex(b)
    c = complex(c)
    if a == 0 or b == 0:
        return 0.0 + 0.0j
    return (a * b / c) * hyp2f1(a + 1, b + 1, c + 1, z)


# ---------------------------------------------------------------------------
# Bessel functions of purely imaginary order
# ---------------------------------------------------------------------------


def _iv_series(order: complex, x: float, signed: bool) -> complex:
    """Power series for I_order(x) (signed=False) or J_order(x) (signed=True).

    sum_m (+-1)^m (x/2)^{order+2m} / (m! Gamma(m+1+order)); the leading
    gamma is evaluated once and the rest follows by upward recurrence.
    """
    half = 0.5 * x
    lead = half**order / gamma_complex(1.0 + order)
    term = lead
    total = term
    x2 = -half * half if signed else half * half
    m = 1
    while m < 2000:
        term *= x2 / (m * (order + m))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        m += 1
    else:
        raise ConvergenceError("Bessel power series did not converge")
    return total


def _kv_series(order: complex, x: float) -> complex:
    """K_order(x) from the two conjugate series halves, order not an integer.

    K_v = (pi/2) [I_{-v}(x) - I_{v}(x)] / sin(pi v).
    """
    ip = _iv_series(order, x, signed=False)
    im = _iv_series(-order, x, signed=False)
    return 0.5 * math.pi * (im - ip) / cmath.sin(math.pi * order)


def _asym_sum(order: complex, x: float, phase: complex) -> complex:
    """sum_m phase^m a_m(order)/x^m with a_m the Bessel asymptotic numerators.

    Truncated at the smallest term (optimal truncation of the divergent
    tail); ``phase`` is +1 for K and +-i for H+-.
    """
    four_v2 = 4.0 * order * order
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    prev = math.inf
    for m in range(1, 80):
        term *= (four_v2 - (2 * m - 1) ** 2) * phase / (8.0 * m * x)
        mag = abs(term)
        if mag >= prev:
            break
        total += term
        prev = mag
    return total


def _kv_asym(order: complex, x: float) -> complex:
    """Exponential asymptotic expansion of K_order(x), x > SERIES_CUTOFF."""
    s = _asym_sum(order, x, 1.0)
    if x > 700.0:
        return cmath.exp(-x + 0.5 * math.log(math.pi / (2.0 * x))) * s
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * s


def _kv_complexorder(order: complex, x: float) -> complex:
    if x <= SERIES_CUTOFF:
        return _kv_series(order, x)
    return _kv_asym(order, x)


def _check_args(eta: float, x: float, name: str) -> None:
    if not eta > ETA_FLOOR:
        raise ParameterError(f"{name}: eta must exceed {ETA_FLOOR}, got {eta}")
    if not x > 0.0:
        raise ParameterError(f"{name}: x must be positive, got {x}")


def bessel_k_imag(eta: float, x: float) -> float:
    """K_{i eta}(x) for eta > 0, x > 0 (real-valued).

    The two series halves are complex conjugates, so the imaginary parts
    cancel; the roundoff residual is monitored and the real part returned.
    Use bessel_k_imag_residual to inspect the cancellation quality.
    """
    value, _ = bessel_k_imag_residual(eta, x)
    return value


def bessel_k_imag_residual(eta: float, x: float) -> tuple[float, float]:
    """(K_{i eta}(x), |imaginary residual|) of the complex evaluation."""
    _check_args(eta, x, "bessel_k_imag")
    val = _kv_complexorder(1j * eta, x)
    resid = abs(val.imag)
    # envelope-scaled gross-error guard; near zeros of K the relative
    # residual is meaningless, so compare against the oscillation amplitude
    envelope = math.exp(-min(x, 700.0)) * math.sqrt(math.pi / (eta * math.sinh(min(eta * math.pi, 700.0))))
    if resid > 1e-8 * max(abs(val.real), envelope):
        raise ConvergenceError(
            f"bessel_k_imag lost conjugate cancellation at eta={eta}, x={x}: residual {resid:.3e}"
        )
    return val.real, resid


def bessel_k_imag_deriv(eta: float, x: float) -> float:
    """d/dx K_{i eta}(x) = -[K_{1+i eta}(x) + K_{1-i eta}(x)]/2 = -Re K_{1+i eta}(x)."""
    _check_args(eta, x, "bessel_k_imag_deriv")
    return -_kv_complexorder(1.0 + 1j * eta, x).real


def _hankel_series(sign: int, order: complex, x: float) -> complex:
    """H+/-_order(x) via the J_{+-order} connection, order = sigma + i eta.

    H+_v = i [e^{-i pi v} J_v - J_{-v}] / sin(pi v)
    H-_v = i [J_{-v} - e^{+i pi v} J_v] / sin(pi v)
    """
    jp = _iv_series(order, x, signed=True)
    jm = _iv_series(-order, x, signed=True)
    s = cmath.sin(math.pi * order)
    if sign > 0:
        return 1j * (cmath.exp(-1j * math.pi * order) * jp - jm) / s
    return 1j * (jm - cmath.exp(1j * math.pi * order) * jp) / s


def _hankel_asym(sign: int, order: complex, x: float) -> complex:
    """Oscillatory asymptotic expansion of H+/-_order(x)."""
    s = _asym_sum(order, x, 1j * sign)
    omega = x - 0.5 * math.pi * order - 0.25 * math.pi
    return cmath.sqrt(2.0 / (math.pi * x)) * cmath.exp(1j * sign * omega) * s


def _hankel_complexorder(sign: int, order: complex, x: float) -> complex:
    if x <= SERIES_CUTOFF:
        return _hankel_series(sign, order, x)
    return _hankel_asym(sign, order, x)


def hankel_imag(sign: int, eta: float, x: float) -> complex:
    """H+/-_{i eta}(x) = J_{i eta}(x) +/- i Y_{i eta}(x); sign selects the branch."""
    if sign not in (1, -1):
        raise ParameterError(f"hankel_imag: sign must be +1 or -1, got {sign}")
    _check_args(eta, x, "hankel_imag")
    return _hankel_complexorder(sign, 1j * eta, x)


def hankel_imag_deriv(sign: int, eta: float, x: float) -> complex:
    """d/dx H+/-_{i eta}(x) = [H+/-_{i eta - 1}(x) - H+/-_{i eta + 1}(x)]/2."""
    if sign not in (1, -1):
        raise ParameterError(f"hankel_imag_deriv: sign must be +1 or -1, got {sign}")
    _check_args(eta, x, "hankel_imag_deriv")
    v = 1j * eta
    lo = _hankel_complexorder(sign, v - 1.0, x)
    hi = _hankel_complexorder(sign, v + 1.0, x)
    return 0.5 * (lo - hi)
