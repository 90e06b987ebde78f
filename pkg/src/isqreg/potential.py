"""Regularized inverse-square potential and its Eckart inner shell.

The potential is -mu/(2x^2) outside a small cutoff x0 and an Eckart well

    W(x) = -(lambda^2/2) (gamma + rho cosh(lambda x)) / sinh^2(lambda x)

inside, glued continuously at x0.  The shell keeps the x^-2 singularity at
the origin but with a weak renormalized strength mu_tilde < 1/4, which is
what bounds the spectrum from below.  A stack of such shells (one per
subinterval, each matched in value to the previous one at its outer
boundary) generalizes the construction; the single-shell case is the
primary pipeline.

All quantities are in units hbar = m = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import MatchingError, ParameterError
from .specfun import GammaImag, gamma_imag

# Guard enforcing the lambda*x0 << 1 shell regime; the closed-form
# spectrum and phase formulas assume both lambda*x0 and k*x0 are small.
LAMBDA_X0_GUARD = 0.1

# Smallest eta = sqrt(mu - 1/4) accepted by derive_params: level spacing
# grows like e^{2 pi/eta}, so the spectrum degenerates for eta -> 0.
ETA_GUARD = 0.05


@dataclass(frozen=True)
class PotentialParams:
    """Couplings and shell geometry of the regularized potential.

    mu        : bare coupling of the outer inverse-square tail, > 1/4
    mu_tilde  : renormalized short-range coupling, in (0, 1/4)
    x0        : cutoff radius, > 0
    lam       : Eckart slope (inverse length), > 0
    """

    mu: float
    mu_tilde: float
    x0: float
    lam: float

    def __post_init__(self) -> None:
        if not self.mu > 0.25:
            raise ParameterError(
                f"strong-coupling regime requires mu > 1/4, got mu={self.mu}"
            )
        if not 0.0 < self.mu_tilde < 0.25:
            raise ParameterError(
                f"renormalized coupling must satisfy 0 < mu_tilde < 1/4, got {self.mu_tilde}"
            )
        if not self.x0 > 0.0:
            raise ParameterError(f"cutoff x0 must be positive, got {self.x0}")
        if not self.lam > 0.0:
            raise ParameterError(f"Eckart slope lambda must be positive, got {self.lam}")
        if not self.lam * self.x0 < LAMBDA_X0_GUARD:
            raise ParameterError(
                f"shell regime requires lambda*x0 < {LAMBDA_X0_GUARD}, "
                f"got {self.lam * self.x0}"
            )


@dataclass(frozen=True)
class DerivedParams:
    """Parameters of the analytic solution, derived from PotentialParams.

    rho, gamma_coef : Eckart strength split, gamma_coef + rho = mu_tilde
    nu              : sqrt(1/4 - mu_tilde), the regular small-x index is 1/2 + nu
    tau             : sqrt(1/4 - mu_tilde + 2 rho)
    eta             : sqrt(mu - 1/4), log-oscillation rate of the outer tail
    z0              : cosh(lambda x0)
    gamma_imag      : cached |Gamma(i eta)| and arg Gamma(i eta)

    The inner hypergeometric solution carries the exponents nu/2 and tau/2
    (the indicial quadratic alpha(2 alpha - 1) = -mu_tilde/2 fixes
    alpha = 1/4 + nu/2), so x^2 psi''/psi -> (1/2 + nu)(nu - 1/2) at the
    origin as it must.
    """

    rho: float
    gamma_coef: float
    nu: float
    tau: float
    eta: float
    z0: float
    gamma_imag: GammaImag


def gtilde(y: float, ratio: float) -> float:
    """Shell-strength function ((sinh y / y)^2 - ratio) / (cosh y - 1).

    ``ratio`` is mu_tilde/mu.  Stable for small y: the numerator is summed
    as (1 - ratio) + y^2/3 + 2y^4/45 + ... and the denominator evaluated
    as 2 sinh^2(y/2).  Always exceeds 2/3 on the valid domain.
    """
    if not y > 0.0:
        raise ParameterError(f"gtilde requires y > 0, got {y}")
    if not 0.0 < ratio < 1.0:
        raise ParameterError(f"gtilde requires ratio in (0, 1), got {ratio}")
    if y <= 0.25:
        num = (1.0 - ratio) + y * y * (
            1.0 / 3.0 + y * y * (2.0 / 45.0 + y * y * (1.0 / 315.0 + y * y * (2.0 / 14175.0)))
        )
    else:
        s = math.sinh(y) / y
        num = s * s - ratio
    den = 2.0 * math.sinh(0.5 * y) ** 2
    return num / den


def derive_params(p: PotentialParams) -> DerivedParams:
    """Solve the continuity and origin-limit conditions for the shell."""
    eta = math.sqrt(p.mu - 0.25)
    if eta <= ETA_GUARD:
        raise ParameterError(
            f"eta = sqrt(mu - 1/4) = {eta} below guard {ETA_GUARD}; "
            "level spacing e^{2 pi/eta} diverges"
        )
    y0 = p.lam * p.x0
    rho = p.mu * gtilde(y0, p.mu_tilde / p.mu)
    z0 = 1.0 + 2.0 * math.sinh(0.5 * y0) ** 2
    return DerivedParams(
        rho=rho,
        gamma_coef=p.mu_tilde - rho,
        nu=math.sqrt(0.25 - p.mu_tilde),
        tau=math.sqrt(0.25 - p.mu_tilde + 2.0 * rho),
        eta=eta,
        z0=z0,
        gamma_imag=gamma_imag(eta),
    )


def eckart(x: float, d: DerivedParams, lam: float) -> float:
    """Eckart shell W(x) = -(lam^2/2)(gamma + rho cosh(lam x))/sinh^2(lam x).

    Evaluated as -(lam^2/2)[mu_tilde/sinh^2(lam x) + rho/(2 cosh^2(lam x/2))],
    which splits the x^-2 singular piece from the bounded one.
    """
    if not x > 0.0:
        raise ParameterError(f"eckart potential is singular at x <= 0, got {x}")
    # recover mu_tilde from nu rather than gamma_coef + rho: the latter loses
    # the low bits of mu_tilde under the large rho
    mu_tilde = 0.25 - d.nu * d.nu
    return _eckart_value(x, mu_tilde, d.rho, lam)


def _eckart_value(x, mu_tilde: float, rho: float, lam: float):
    y = lam * x
    sh = np.sinh(np.minimum(y, 350.0))
    ch_half = np.cosh(np.minimum(0.5 * y, 350.0))
    return -(lam * lam / 2.0) * (mu_tilde / (sh * sh) + rho / (2.0 * ch_half * ch_half))


def regularized_potential(x: float, p: PotentialParams) -> float:
    """Full potential: Eckart shell for x < x0, -mu/(2x^2) for x >= x0."""
    if not x > 0.0:
        raise ParameterError(f"potential is singular at x <= 0, got {x}")
    if x >= p.x0:
        return -p.mu / (2.0 * x * x)
    d = derive_params(p)
    return eckart(x, d, p.lam)


@dataclass(frozen=True)
class Shell:
    """One Eckart shell on (x_inner, x_outer]: strength split and slope."""

    mu_tilde: float
    lam: float
    rho: float
    gamma_coef: float


@dataclass(frozen=True)
class PiecewisePotential:
    """Inverse-square tail plus a stack of Eckart shells.

    boundaries[j] is the outer radius of shell j; boundaries are strictly
    decreasing with boundaries[0] = x0 and the innermost shell extending
    to the origin.  Adjacent pieces agree in value at every boundary.
    """

    outer_mu: float
    boundaries: tuple[float, ...]
    shells: tuple[Shell, ...]

    @property
    def x0(self) -> float:
        return self.boundaries[0]

    @property
    def innermost_mu_tilde(self) -> float:
        return self.shells[-1].mu_tilde

    @property
    def origin_exponent(self) -> float:
        """Power of the regular solution at the origin, x^(1/2 + nu_in)."""
        return 0.5 + math.sqrt(0.25 - self.innermost_mu_tilde)

    def well_floor(self) -> float:
        """Constant part of the innermost shell near the origin.

        W_in(x) = -mu_tilde/(2x^2) - floor + O(x^2) with
        floor = lam^2 rho/4 - lam^2 mu_tilde/6.
        """
        s = self.shells[-1]
        return s.lam**2 * (s.rho / 4.0 - s.mu_tilde / 6.0)

    def value(self, x):
        """V(x), scalar or ndarray; x must be positive."""
        xs = np.asarray(x, dtype=float)
        if np.any(xs <= 0.0):
            raise ParameterError("potential is singular at x <= 0")
        out = -self.outer_mu / (2.0 * xs * xs)
        for j, shell in enumerate(self.shells):
            hi = self.boundaries[j]
            lo = self.boundaries[j + 1] if j + 1 < len(self.boundaries) else 0.0
            mask = (xs < hi) & (xs >= lo)
            if np.any(mask):
                out = np.where(
                    mask, _eckart_value(xs, shell.mu_tilde, shell.rho, shell.lam), out
                )
        return float(out) if np.isscalar(x) else out

    def __call__(self, x):
        return self.value(x)


def as_piecewise(p: PotentialParams) -> PiecewisePotential:
    """Single-shell PiecewisePotential equivalent to regularized_potential."""
    d = derive_params(p)
    return PiecewisePotential(
        outer_mu=p.mu,
        boundaries=(p.x0,),
        shells=(Shell(p.mu_tilde, p.lam, d.rho, d.gamma_coef),),
    )


def build_multishell(
    outer_mu: float,
    shells: Sequence[tuple[float, float]],
    x0: float,
    boundaries: Sequence[float] | None = None,
) -> PiecewisePotential:
    """Stack of Eckart shells matched in value at every boundary.

    ``shells`` lists (mu_tilde_j, lambda_j) from the outermost inward;
    mu_tilde_j may take the closed interval [0, 1/4] here.  Boundaries are
    the outer radii of the shells; when omitted they form the geometric
    ladder x_j = x0 / 2^j.  Each rho_j follows in closed form from
    requiring W_j(x_j) to equal the previous piece there.
    """
    if not outer_mu > 0.25:
        raise ParameterError(f"outer coupling must exceed 1/4, got {outer_mu}")
    n = len(shells)
    if n == 0:
        raise ParameterError("at least one shell is required")
    if boundaries is None:
        boundaries = tuple(x0 * 0.5**j for j in range(n))
    boundaries = tuple(float(b) for b in boundaries)
    if len(boundaries) != n:
        raise ParameterError("need exactly one boundary radius per shell")
    if abs(boundaries[0] - x0) > 1e-15 * x0:
        raise ParameterError("first boundary must equal x0")
    if any(b2 >= b1 for b1, b2 in zip(boundaries, boundaries[1:])) or boundaries[-1] <= 0:
        raise ParameterError("boundaries must decrease strictly toward 0")

    built: list[Shell] = []
    prev_value: Callable[[float], float] = lambda x: -outer_mu / (2.0 * x * x)
    for j, ((mu_t, lam), xb) in enumerate(zip(shells, boundaries)):
        if not 0.0 <= mu_t <= 0.25:
            raise ParameterError(
                f"shell {j}: mu_tilde must lie in [0, 1/4], got {mu_t}"
            )
        if not lam > 0.0:
            raise ParameterError(f"shell {j}: lambda must be positive, got {lam}")
        y = lam * xb
        if y >= 1.0:
            raise MatchingError(
                f"shell {j}: lambda*x_j = {y} leaves the shell regime, no match"
            )
        v_prev = prev_value(xb)
        # W_j(x_j) = v_prev, linear in rho_j:
        #   rho_j = (-2 v_prev sinh^2(y)/lam^2 - mu_t) / (cosh(y) - 1)
        sh = math.sinh(y)
        den = 2.0 * math.sinh(0.5 * y) ** 2
        rho = (-2.0 * v_prev * sh * sh / (lam * lam) - mu_t) / den
        shell = Shell(mu_tilde=mu_t, lam=lam, rho=rho, gamma_coef=mu_t - rho)
        built.append(shell)
        prev_value = lambda x, s=shell: float(_eckart_value(x, s.mu_tilde, s.rho, s.lam))

    pot = PiecewisePotential(
        outer_mu=outer_mu, boundaries=boundaries, shells=tuple(built)
    )
    # verify the continuity the construction promises
    for j, xb in enumerate(boundaries):
        if j == 0:
            left = -outer_mu / (2.0 * xb * xb)
        else:
            s = built[j - 1]
            left = float(_eckart_value(xb, s.mu_tilde, s.rho, s.lam))
        s = built[j]
        right = float(_eckart_value(xb, s.mu_tilde, s.rho, s.lam))
        if abs(left - right) > 1e-10 * max(abs(left), abs(right)):
            raise MatchingError(f"continuity failed at boundary {j}: {left} vs {right}")
    return pot
