"""
Two-sided evaluation of the functional inequalities used by the energy
argument, on discrete fields.

Hölder- and Jensen-type checks are exact for the discrete (weighted-sum)
integrals, so they run with the algebraic tolerance; the Sobolev-type check
carries a discretization allowance; the dissipation bound stacks two such
allowances.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import thresholds
from .conf import tolerance
from .exceptions import ParameterDomainError, HypothesisError
from .grid_fields import (
    integrate, gradient, shear_rate, tensor_magnitude, functionals,
)

logger = logging.getLogger(__name__)


class CheckName(str, Enum):
    SOBOLEV10 = 'Sobolev10'
    HOLDER11 = 'Holder11'
    HOLDER13 = 'Holder13'
    JENSEN14 = 'Jensen14'
    MOMENTUM16 = 'Momentum16'
    DISSIPATION_BOUND = 'DissipationBound'
    KINETIC_HOLDER = 'KineticHolder'


class GradientChoice(str, Enum):
    FULL = 'Full'
    SYMMETRIC = 'Symmetric'


@dataclass
class InequalityReport:
    """
    Both sides of one `lhs <= rhs` inequality; `passed` when
    rhs − lhs >= −tol·max(|lhs|, |rhs|, 1).
    """

    name: CheckName
    lhs: float
    rhs: float
    slack: float
    passed: bool
    tol: float
    context: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'name': self.name.value,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'slack': self.slack,
            'passed': self.passed,
            'tol': self.tol,
            'context': dict(self.context),
        }


def make_report(name, lhs, rhs, tol, **context):
    lhs = float(lhs)
    rhs = float(rhs)
    slack = rhs - lhs
    passed = bool(slack >= -tol * max(abs(lhs), abs(rhs), 1.0))
    if not passed:
        logger.info('%s failed: lhs=%.6e rhs=%.6e slack=%.3e', name.value, lhs, rhs, slack)
    return InequalityReport(name=name, lhs=lhs, rhs=rhs, slack=slack, passed=passed, tol=tol, context=context)


def _velocity_power_integral(u, power):
    return integrate(u.magnitude() ** power, u.grid)


#--------------#
#-- SOBOLEV: --#
#--------------#

def sobolev_sides(u, q, gradient_choice=GradientChoice.FULL):
    """Returns `(lhs, rhs)` of (∫|u|^(qn/(n−q)))^((n−q)/n) <= K ∫|G u|^q."""

    n = u.grid.n
    K = thresholds.sobolev_K(n, q)
    critical = q * n / (n - q)
    lhs = _velocity_power_integral(u, critical) ** ((n - q) / n)
    if GradientChoice(gradient_choice) is GradientChoice.SYMMETRIC:
        G = shear_rate(u)
    else:
        G = gradient(u)
    rhs = K * integrate(tensor_magnitude(G).values ** q, u.grid)
    return lhs, rhs


def verify_sobolev10(u, q, gradient_choice=GradientChoice.FULL, tol=None):
    """
    Sobolev-type bound with K = q(n−1)/(2(n−q)); `gradient_choice` selects the
    full gradient or its symmetric part on the right. A failing symmetric
    check also records the full-gradient verdict.
    """

    n = u.grid.n
    if n < 2 or not 1 < q < n:
        raise ParameterDomainError('Sobolev check needs n >= 2 and 1 < q < n, got n={}, q={}'.format(n, q))
    tol = tolerance('sobolev') if tol is None else tol
    choice = GradientChoice(gradient_choice)
    lhs, rhs = sobolev_sides(u, q, choice)
    report = make_report(CheckName.SOBOLEV10, lhs, rhs, tol, q=q, n=n, gradient_choice=choice.value)
    if not report.passed and choice is GradientChoice.SYMMETRIC:
        _, full_rhs = sobolev_sides(u, q, GradientChoice.FULL)
        report.context['full_gradient_rhs'] = full_rhs
        report.context['full_gradient_passed'] = bool(full_rhs - lhs >= -tol * max(abs(lhs), abs(full_rhs), 1.0))
    return report


#-------------#
#-- HOLDER: --#
#-------------#

def verify_holder11(rho, sigma, gamma, tol=None):
    """∫ρ^σ <= (∫ρ)^((γ−σ)/(γ−1)) (∫ρ^γ)^((σ−1)/(γ−1)) for 1 < σ < γ."""

    if not 1 < sigma < gamma:
        raise ParameterDomainError('sigma must lie in (1, gamma) = (1, {}), got {}'.format(gamma, sigma))
    tol = tolerance('algebraic') if tol is None else tol
    r = rho.values
    grid = rho.grid
    lhs = integrate(r ** sigma, grid)
    rhs = (integrate(r, grid) ** ((gamma - sigma) / (gamma - 1.0))
           * integrate(r ** gamma, grid) ** ((sigma - 1.0) / (gamma - 1.0)))
    return make_report(CheckName.HOLDER11, lhs, rhs, tol, sigma=sigma, gamma=gamma)


def verify_holder13(rho, u, q, tol=None):
    """|∫ρu| <= (∫ρ^s)^(1/s) (∫|u|^(qn/(n−q)))^((n−q)/(qn)), s = qn/(n(q−1)+q)."""

    n = rho.grid.n
    if n < 2 or not 1 < q < n:
        raise ParameterDomainError('momentum Holder bound needs n >= 2 and 1 < q < n, got n={}, q={}'.format(n, q))
    tol = tolerance('algebraic') if tol is None else tol
    grid = rho.grid
    s = q * n / (n * (q - 1.0) + q)
    P = np.array([integrate(rho.values * u.values[i], grid) for i in range(n)])
    lhs = float(np.linalg.norm(P))
    rhs = (integrate(rho.values ** s, grid) ** (1.0 / s)
           * _velocity_power_integral(u, q * n / (n - q)) ** ((n - q) / (q * n)))
    return make_report(CheckName.HOLDER13, lhs, rhs, tol, q=q, n=n)


def verify_kinetic_holder(rho, u, sigma, tol=None):
    """2E_k <= ‖ρ‖_σ ‖u‖²_(2σ/(σ−1)), the first step of the finite-energy argument."""

    if not sigma > 1:
        raise ParameterDomainError('sigma must exceed 1, got {}'.format(sigma))
    tol = tolerance('algebraic') if tol is None else tol
    grid = rho.grid
    speed2 = np.sum(u.values ** 2, axis=0)
    lhs = integrate(rho.values * speed2, grid)
    conjugate = 2.0 * sigma / (sigma - 1.0)
    rhs = (integrate(rho.values ** sigma, grid) ** (1.0 / sigma)
           * integrate(speed2 ** (conjugate / 2.0), grid) ** (2.0 / conjugate))
    return make_report(CheckName.KINETIC_HOLDER, lhs, rhs, tol, sigma=sigma)


#-------------#
#-- JENSEN: --#
#-------------#

def verify_jensen14(rho, q, gamma, A, m, tol=None):
    """
    ((1/m)∫ρ^s)^b <= (∫ρ^γ)/m with b = (γ−1)(n(q−1)+q)/(n−q).

    Refuses to produce a verdict when b < 1, since the inequality direction is
    then not guaranteed.
    """

    n = rho.grid.n
    value = thresholds.condition15(n, gamma, q)
    if value < 1:
        raise HypothesisError('Jensen exponent condition fails ({:.6g} < 1): Jensen step not valid'.format(value),
                              ['condition15'])
    if not m > 0:
        raise ParameterDomainError('total mass must be positive, got {}'.format(m))
    tol = tolerance('algebraic') if tol is None else tol
    grid = rho.grid
    s = q * n / (n * (q - 1.0) + q)
    lhs = (integrate(rho.values ** s, grid) / m) ** value
    rhs = integrate(rho.values ** gamma, grid) / m
    return make_report(CheckName.JENSEN14, lhs, rhs, tol, q=q, gamma=gamma, m=m,
                       E_i=A * rhs * m / (gamma - 1.0))


#---------------------#
#-- MOMENTUM BOUND: --#
#---------------------#

def verify_momentum16(rho, u, params, tol=None):
    """|P| <= K1 E_i^e (∫|u|^(qn/(n−q)))^((n−q)/(qn)) with the re-derived K1."""

    n, gamma, q, A = params.n, params.gamma, params.q, params.A
    tol = tolerance('algebraic') if tol is None else tol
    grid = rho.grid
    m = integrate(rho.values, grid)
    K1 = thresholds.momentum_K1(n, gamma, q, m, A)
    e = thresholds.energy_exponent(n, gamma, q)
    E_i = integrate(A * rho.values ** gamma / (gamma - 1.0), grid)
    P = np.array([integrate(rho.values * u.values[i], grid) for i in range(n)])
    lhs = float(np.linalg.norm(P))
    rhs = K1 * E_i ** e * _velocity_power_integral(u, q * n / (n - q)) ** ((n - q) / (q * n))
    return make_report(CheckName.MOMENTUM16, lhs, rhs, tol, K1=K1, exponent=e, m=m)


#------------------------#
#-- DISSIPATION BOUND: --#
#------------------------#

def dissipation_bound_lhs(P_norm, E_i, m, params):
    """
    (1/K)(|P| / (K1 E_i^e))^q: the dissipation the inequality chain forces.
    ν times this value is the instantaneous decay rate C_inst.
    """

    n, gamma, q = params.n, params.gamma, params.q
    K = thresholds.sobolev_K(n, q)
    K1 = thresholds.momentum_K1(n, gamma, q, m, params.A)
    e = thresholds.energy_exponent(n, gamma, q)
    return (P_norm / (K1 * E_i ** e)) ** q / K


def check_dissipation_bound(P_norm, E_i, m, D_q, params, mhd=False, tol=None):
    """Dissipation bound from stored functionals (no field access needed)."""

    report = thresholds.admissibility(params, [1.0], mhd=mhd)
    failed = [name for name in report.failed if name != 'momentum_nonzero']
    if failed:
        raise HypothesisError('dissipation bound needs admissible parameters; failed: {}'.format(
            ', '.join(failed)), failed)
    if not E_i > 0:
        raise ParameterDomainError('internal energy must be positive, got {}'.format(E_i))
    tol = tolerance('composite') if tol is None else tol
    lhs = dissipation_bound_lhs(P_norm, E_i, m, params)
    return make_report(CheckName.DISSIPATION_BOUND, lhs, D_q, tol, P=P_norm, E_i=E_i, m=m,
                       C_inst=params.nu * lhs)


def dissipation_lower_bound(state, params, m, mhd=False, tol=None):
    """
    Checks ∫|𝔻(u)|^q >= (1/K)(|P| / (K1 E_i^e))^q on a state.

    Parameters:
    - `state` - `FluidState`.
    - `params` - `ExponentParams`; must satisfy the theorem's q-range and
      Jensen exponent condition (a zero momentum is allowed and gives lhs = 0).
    - `m` - Total mass used in K1.
    - `mhd` - Use the MHD exponent range.
    """

    breakdown = functionals(state, params)
    return check_dissipation_bound(breakdown.momentum_norm, breakdown.E_i, m, breakdown.D_q,
                                   params, mhd=mhd, tol=tol)


#----------#
#-- ALL: --#
#----------#

def verify_all(state, params, sigma=None, gradient_choice=GradientChoice.SYMMETRIC, tolerances=None):
    """
    Runs every check that applies to `state`; checks whose preconditions fail
    are skipped with a log line rather than reported.
    """

    reports = []
    for name in CheckName:
        try:
            reports.append(run_check(name, state, params, sigma, gradient_choice, tolerances))
        except (ParameterDomainError, HypothesisError) as err:
            logger.warning('Skipping %s: %s', name.value, err)
    return reports


def run_check(name, state, params, sigma=None, gradient_choice=GradientChoice.SYMMETRIC, tolerances=None):
    """Runs a single named check on `state`; precondition failures propagate."""

    tolerances = tolerances or {}
    name = CheckName(name)
    rho, u = state.rho, state.u
    sigma = (1.0 + params.gamma) / 2.0 if sigma is None else sigma
    m = integrate(rho.values, rho.grid)
    if name is CheckName.SOBOLEV10:
        return verify_sobolev10(u, params.q, gradient_choice, tol=tolerances.get('sobolev'))
    if name is CheckName.HOLDER11:
        return verify_holder11(rho, sigma, params.gamma, tol=tolerances.get('algebraic'))
    if name is CheckName.HOLDER13:
        return verify_holder13(rho, u, params.q, tol=tolerances.get('algebraic'))
    if name is CheckName.JENSEN14:
        return verify_jensen14(rho, params.q, params.gamma, params.A, m, tol=tolerances.get('algebraic'))
    if name is CheckName.MOMENTUM16:
        return verify_momentum16(rho, u, params, tol=tolerances.get('algebraic'))
    if name is CheckName.KINETIC_HOLDER:
        return verify_kinetic_holder(rho, u, sigma, tol=tolerances.get('algebraic'))
    return dissipation_lower_bound(state, params, m, mhd=state.H is not None, tol=tolerances.get('composite'))
