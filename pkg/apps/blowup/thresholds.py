"""
Closed-form exponents, constants and admissibility conditions of the
nonexistence theorems.

All functions are pure; interval endpoints are compared exactly.
"""

import logging
from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np

from .exceptions import ParameterDomainError, HypothesisError

logger = logging.getLogger(__name__)


class Theorem(str, Enum):
    FLUID = 'Fluid'
    MHD = 'MHD'
    NONE = 'None'


@dataclass(frozen=True)
class ExponentParams:
    """
    Parameters of the model and of the theorems.

    Parameters:
    - `n` - Spatial dimension (1-3 for the solver, >= 2 for theorem quantities).
    - `gamma` - Heat ratio of the pressure law, > 1.
    - `A` - Pressure coefficient, > 0.
    - `nu` - Coercivity constant, > 0.
    - `q` - Coercivity exponent, > 1.
    - `eta` - Magnetic resistivity, >= 0 (MHD only).
    """

    n: int
    gamma: float
    A: float = 1.0
    nu: float = 1.0
    q: float = 2.0
    eta: float = 0.0

    def __post_init__(self):
        errors = []
        if int(self.n) != self.n or self.n < 1:
            errors.append('n must be a positive integer')
        if not self.gamma > 1:
            errors.append('gamma must exceed 1')
        if not self.A > 0:
            errors.append('A must be positive')
        if not self.nu > 0:
            errors.append('nu must be positive')
        if not self.q > 1:
            errors.append('q must exceed 1')
        if not self.eta >= 0:
            errors.append('eta must be nonnegative')
        if errors:
            raise ParameterDomainError('; '.join(errors))

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ThresholdSet:
    q0: float
    q1: float
    K: float = None
    K1: float = None
    mhd_lo: float = None

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class AdmissibilityReport:
    in_q_range: bool
    condition15: bool
    momentum_nonzero: bool
    theorem_applies: bool
    which_theorem: Theorem
    in_open_range: bool = False
    in_closed_range: bool = False
    condition15_value: float = None
    failed: list = field(default_factory=list)

    def to_dict(self):
        data = asdict(self)
        data['which_theorem'] = self.which_theorem.value
        return data


@dataclass(frozen=True)
class CertificateConstants:
    """Decay constants of the energy bound; `*_chain` use the re-derived E0 exponent."""

    K: float
    K1: float
    C: float
    T_star: float
    C_chain: float
    T_star_chain: float


#--------------------#
#-- DOMAIN CHECKS: --#
#--------------------#

def _require_theory_dimension(n):
    if int(n) != n or n < 2:
        raise ParameterDomainError('theorem quantities need an integer dimension n >= 2, got {}'.format(n))


def _require_gamma(gamma):
    if not gamma > 1:
        raise ParameterDomainError('gamma must exceed 1, got {}'.format(gamma))


def _require_subcritical(n, q):
    if not 1 < q < n:
        raise ParameterDomainError('q must lie in (1, n) = (1, {}), got {}'.format(n, q))


#----------------#
#-- EXPONENTS: --#
#----------------#

def q0(n, gamma):
    """Lower end of the exponent range for finite energy: 2nγ / (n(γ−1) + 2γ)."""

    _require_theory_dimension(n)
    _require_gamma(gamma)
    return 2.0 * n * gamma / (n * (gamma - 1.0) + 2.0 * gamma)


def q1(n, gamma):
    """Exponent nγ / ((n+1)(γ−1) + 1) below which the Jensen step fails; always < q0."""

    _require_theory_dimension(n)
    _require_gamma(gamma)
    return n * gamma / ((n + 1) * (gamma - 1.0) + 1.0)


def q_sigma(n, sigma):
    """2nσ / ((σ−1)n + 2σ); strictly decreasing in σ and confined to (1, n)."""

    _require_theory_dimension(n)
    if not sigma > 1:
        raise ParameterDomainError('sigma must exceed 1, got {}'.format(sigma))
    return 2.0 * n * sigma / ((sigma - 1.0) * n + 2.0 * sigma)


def mhd_lower_endpoint(gamma):
    """6γ/(5γ−3), the left end of the MHD exponent range (equals q0 at n = 3)."""

    _require_gamma(gamma)
    return 6.0 * gamma / (5.0 * gamma - 3.0)


def sobolev_K(n, q):
    """Constant of the Sobolev-type inequality: q(n−1) / (2(n−q)), for 1 < q < n."""

    _require_theory_dimension(n)
    _require_subcritical(n, q)
    return q * (n - 1.0) / (2.0 * (n - q))


def condition15(n, gamma, q):
    """Value of (γ−1)(n(q−1)+q)/(n−q); the Jensen step is valid when it is >= 1."""

    _require_theory_dimension(n)
    _require_gamma(gamma)
    _require_subcritical(n, q)
    return (gamma - 1.0) * (n * (q - 1.0) + q) / (n - q)


def jensen_gamma_floor(n, q):
    """qn/(n(q−1)+q): the Jensen exponent condition rewritten as a lower bound on γ."""

    _require_theory_dimension(n)
    _require_subcritical(n, q)
    return q * n / (n * (q - 1.0) + q)


def energy_exponent(n, gamma, q):
    """(n−q)/(qn(γ−1)), the power of the internal energy in the momentum bound."""

    _require_theory_dimension(n)
    _require_gamma(gamma)
    _require_subcritical(n, q)
    return (n - q) / (q * n * (gamma - 1.0))


def finite_energy_class(n, gamma, q):
    """True when q ∈ [q0, n), the range where total mass and energy are finite."""

    return q0(n, gamma) <= q < n


def momentum_K1(n, gamma, q, m, A):
    """
    Constant of the momentum bound |P| <= K1 E_i^e (∫|u|^(qn/(n−q)))^((n−q)/(qn)).

    Hölder gives |P| <= R^a U with R = ∫ρ^s, s = qn/(n(q−1)+q), a = 1/s.
    Jensen gives R <= m ((γ−1)E_i/(mA))^(1/b) with b the Jensen exponent,
    so R^a <= m^a ((γ−1)/(mA))^(a/b) E_i^(a/b) and a/b = (n−q)/(qn(γ−1)).

    Parameters:
    - `n`, `gamma`, `q` - Model exponents.
    - `m` - Total mass, > 0.
    - `A` - Pressure coefficient, > 0.
    """

    _require_theory_dimension(n)
    _require_gamma(gamma)
    _require_subcritical(n, q)
    if not m > 0:
        raise ParameterDomainError('total mass must be positive, got {}'.format(m))
    if not A > 0:
        raise ParameterDomainError('A must be positive, got {}'.format(A))
    if condition15(n, gamma, q) < 1:
        raise ParameterDomainError(
            'Jensen exponent condition fails for n={}, gamma={}, q={}'.format(n, gamma, q))
    holder_power = (n * (q - 1.0) + q) / (q * n)
    return m ** holder_power * ((gamma - 1.0) / (m * A)) ** energy_exponent(n, gamma, q)


def threshold_set(n, gamma, q=None, m=None, A=None):
    """
    Collects every threshold for (n, γ); `K` and `K1` stay `None` when their
    inputs are missing or out of their domain.
    """

    K = K1 = None
    if q is not None:
        try:
            K = sobolev_K(n, q)
        except ParameterDomainError as err:
            logger.warning('K undefined: %s', err)
        if K is not None and m is not None and A is not None:
            try:
                K1 = momentum_K1(n, gamma, q, m, A)
            except ParameterDomainError as err:
                logger.warning('K1 undefined: %s', err)
    return ThresholdSet(
        q0=q0(n, gamma),
        q1=q1(n, gamma),
        K=K,
        K1=K1,
        mhd_lo=mhd_lower_endpoint(gamma) if n == 3 else None,
    )


#--------------------#
#-- ADMISSIBILITY: --#
#--------------------#

def admissibility(params, P, mhd=False):
    """
    Evaluates the hypotheses of the fluid theorem (q in the open range (q0, n))
    or the MHD theorem (n = 3, q in [6γ/(5γ−3), 3)), the Jensen exponent condition and P != 0.

    Parameters:
    - `params` - `ExponentParams`.
    - `P` - Momentum vector (any sequence of reals).
    - `mhd` - True when a magnetic field is part of the problem.
    """

    failed = []
    n, gamma, q = params.n, params.gamma, params.q
    momentum_nonzero = bool(np.linalg.norm(np.asarray(P, dtype=float)) > 0)

    if n < 2 or (mhd and n != 3):
        failed.append('dimension')
        in_open = in_closed = in_range = cond_ok = False
        cond_value = None
    else:
        lo = mhd_lower_endpoint(gamma) if mhd else q0(n, gamma)
        in_open = lo < q < n
        in_closed = lo <= q < n
        in_range = in_closed if mhd else in_open
        if q < n:
            cond_value = condition15(n, gamma, q)
            cond_ok = cond_value >= 1
        else:
            cond_value = None
            cond_ok = False

    if not in_range and 'dimension' not in failed:
        failed.append('in_q_range')
    if not cond_ok and 'dimension' not in failed:
        failed.append('condition15')
    if not momentum_nonzero:
        failed.append('momentum_nonzero')

    applies = not failed
    if applies:
        which = Theorem.MHD if mhd else Theorem.FLUID
    else:
        which = Theorem.NONE
    return AdmissibilityReport(
        in_q_range=in_range,
        condition15=cond_ok,
        momentum_nonzero=momentum_nonzero,
        theorem_applies=applies,
        which_theorem=which,
        in_open_range=in_open,
        in_closed_range=in_closed,
        condition15_value=cond_value,
        failed=failed,
    )


def certificate_constants(params, m, P, E0, mhd=False):
    """
    Returns the guaranteed energy decay rate and the lifespan bound.

    C = ν|P|^q / (K1^q K) · E0^(−e) with e = (n−q)/(qn(γ−1)), T_star = E0/C.
    The chain of inequalities actually yields the exponent −q·e on E0; that
    rate is returned alongside as `C_chain` / `T_star_chain`.

    Raises `HypothesisError` when the selected theorem does not apply.
    """

    report = admissibility(params, P, mhd=mhd)
    if not report.theorem_applies:
        raise HypothesisError(
            'no certificate: failed hypotheses {}'.format(', '.join(report.failed)), report.failed)
    if not E0 > 0:
        raise ParameterDomainError('initial energy must be positive, got {}'.format(E0))

    n, gamma, q, nu = params.n, params.gamma, params.q, params.nu
    K = sobolev_K(n, q)
    K1 = momentum_K1(n, gamma, q, m, params.A)
    e = energy_exponent(n, gamma, q)
    base = nu * float(np.linalg.norm(np.asarray(P, dtype=float))) ** q / (K1 ** q * K)
    C = base * E0 ** (-e)
    C_chain = base * E0 ** (-q * e)
    return CertificateConstants(
        K=K, K1=K1, C=C, T_star=E0 / C, C_chain=C_chain, T_star_chain=E0 / C_chain)
