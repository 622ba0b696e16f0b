"""
Stress models: Newtonian, power-law and generalized viscosity of the form
ℙ = β0(ρ, div u) 𝕀 + β(ρ, |𝔻|) 𝔻, the barotropic pressure p = Aρ^γ, and a
sampled check of the pointwise coercivity condition
β0(g, tr B) tr B + β(g, |B|)|B|² >= ν|B|^q.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .conf import tolerance
from .exceptions import ParameterDomainError
from .grid_fields import ScalarField, TensorField, shear_rate, divergence

logger = logging.getLogger(__name__)


def _times(coefficient, x):
    # β·x with β·0 := 0, so degenerate laws (q < 2, no regularization) stay finite.
    with np.errstate(divide='ignore', invalid='ignore'):
        out = coefficient * x
    return np.where(x == 0, 0.0, out)


class ViscosityLaw:
    """
    Base class of viscosity laws.

    Subclasses supply `beta0(g, tr)` and `beta(g, mag)`; both receive numpy
    arrays (or floats) and must be safe to call concurrently.
    """

    kind = None

    def beta0(self, g, tr):
        raise NotImplementedError

    def beta(self, g, mag):
        raise NotImplementedError

    def effective_viscosity(self, rho, mag):
        """Diffusion coefficient used by the viscous time-step limit."""

        return np.abs(self.beta(rho, mag))

    def coercive_lhs(self, g, B):
        """β0(g, tr B) tr B + β(g, |B|) |B|² for one symmetric matrix."""

        tr = float(np.trace(B))
        mag = float(np.sqrt(np.sum(B * B)))
        return float(_times(self.beta0(g, tr), tr) + _times(self.beta(g, mag), mag * mag))

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class NewtonianLaw(ViscosityLaw):
    """λ div u 𝕀 + 2μ 𝔻 with μ > 0 and λ + (2/n) μ > 0 (checked against n by the model)."""

    lam: float
    mu: float
    kind = 'newtonian'

    def __post_init__(self):
        if not self.mu > 0:
            raise ParameterDomainError('mu must be positive, got {}'.format(self.mu))

    def beta0(self, g, tr):
        return self.lam * np.asarray(tr, dtype=float)

    def beta(self, g, mag):
        return 2.0 * self.mu * np.ones_like(np.asarray(mag, dtype=float))

    def effective_viscosity(self, rho, mag):
        return (self.lam + 2.0 * self.mu) * np.ones_like(np.asarray(mag, dtype=float))

    def to_dict(self):
        return {'model': self.kind, 'lambda': self.lam, 'mu': self.mu}


@dataclass(frozen=True)
class PowerLawModel(ViscosityLaw):
    """ν(|𝔻|² + ε²)^((q−2)/2) 𝔻, β0 = 0; exact power law at ε = 0."""

    nu: float
    q: float
    eps_reg: float = 0.0
    kind = 'power_law'

    def __post_init__(self):
        if not self.nu > 0:
            raise ParameterDomainError('nu must be positive, got {}'.format(self.nu))
        if not self.q > 1:
            raise ParameterDomainError('q must exceed 1, got {}'.format(self.q))
        if not self.eps_reg >= 0:
            raise ParameterDomainError('eps_reg must be nonnegative, got {}'.format(self.eps_reg))

    def beta0(self, g, tr):
        return np.zeros_like(np.asarray(tr, dtype=float))

    def beta(self, g, mag):
        mag = np.asarray(mag, dtype=float)
        with np.errstate(divide='ignore'):
            return self.nu * (mag * mag + self.eps_reg ** 2) ** ((self.q - 2.0) / 2.0)

    def to_dict(self):
        return {'model': self.kind, 'nu': self.nu, 'q': self.q, 'eps_reg': self.eps_reg}


@dataclass(frozen=True)
class GeneralizedLaw(ViscosityLaw):
    """
    β0(ρ, div u) 𝕀 + β(ρ, |𝔻|) 𝔻 with user-supplied vectorized callables.

    Certificates for such laws are only issued after `coercivity_check` passes.
    """

    beta0_fn: object
    beta_fn: object
    kind = 'generalized'

    def beta0(self, g, tr):
        return np.asarray(self.beta0_fn(g, tr), dtype=float)

    def beta(self, g, mag):
        return np.asarray(self.beta_fn(g, mag), dtype=float)

    def check_bounded_at_zero(self, densities=(0.0, 1e-3, 1.0), rates=(0.0, 1e-12, 1e-8, 1e-4)):
        """True when both functions stay finite for arguments approaching zero."""

        for g in densities:
            for x in rates:
                values = (self.beta0(g, x), self.beta0(g, -x), self.beta(g, x))
                if not all(np.all(np.isfinite(v)) for v in values):
                    logger.warning('Generalized law unbounded near zero at g=%s, x=%s', g, x)
                    return False
        return True

    def to_dict(self):
        return {'model': self.kind}


@dataclass(frozen=True)
class PressureLaw:
    A: float
    gamma: float

    def __post_init__(self):
        if not self.A >= 0:
            raise ParameterDomainError('A must be nonnegative, got {}'.format(self.A))
        if not self.gamma > 1:
            raise ParameterDomainError('gamma must exceed 1, got {}'.format(self.gamma))


@dataclass(frozen=True)
class ConstitutiveModel:
    """A viscosity law paired with the pressure law."""

    law: ViscosityLaw
    pressure: PressureLaw

    def check_dimension(self, n):
        if isinstance(self.law, NewtonianLaw) and not self.law.lam + 2.0 * self.law.mu / n > 0:
            raise ParameterDomainError('Newtonian viscosity needs lambda + (2/n) mu > 0')

    def to_dict(self):
        data = self.law.to_dict()
        data.update({'A': self.pressure.A, 'gamma': self.pressure.gamma})
        return data


@dataclass
class CoercivityReport:
    samples_checked: int
    min_slack: float
    passed: bool
    worst_sample: int = None
    caveats: list = field(default_factory=list)

    def to_dict(self):
        return {
            'samples_checked': self.samples_checked,
            'min_slack': self.min_slack,
            'passed': self.passed,
            'worst_sample': self.worst_sample,
            'caveats': list(self.caveats),
        }


#---------------#
#-- PRESSURE: --#
#---------------#

def pressure(rho, A, gamma):
    """p = Aρ^γ cell-wise; `rho` is a `ScalarField`."""

    if np.any(rho.values < 0):
        raise ParameterDomainError('pressure needs a nonnegative density')
    return ScalarField(rho.grid, A * rho.values ** gamma)


#-------------#
#-- STRESS: --#
#-------------#

def viscous_stress_from_rate(law, rho_values, D, div_u):
    """ℙ from a precomputed shear rate tensor array `D` and divergence array."""

    n = D.shape[0]
    mag = np.sqrt(np.sum(D ** 2, axis=(0, 1)))
    beta = law.beta(rho_values, mag)
    P = np.where(mag > 0, beta, 0.0) * D
    isotropic = law.beta0(rho_values, div_u)
    for i in range(n):
        P[i, i] = P[i, i] + isotropic
    return P


def viscous_stress(model, rho, u):
    """
    Viscous part ℙ of the stress.

    Parameters:
    - `model` - `ConstitutiveModel` (or a bare `ViscosityLaw`).
    - `rho` - `ScalarField`.
    - `u` - `VectorField` on the same grid.
    """

    law = getattr(model, 'law', model)
    D = shear_rate(u).values
    return TensorField(u.grid, viscous_stress_from_rate(law, rho.values, D, divergence(u).values))


def full_stress(model, rho, u):
    """𝕊 = −p 𝕀 + ℙ."""

    S = viscous_stress(model, rho, u).values.copy()
    p = pressure(rho, model.pressure.A, model.pressure.gamma).values
    for i in range(rho.grid.n):
        S[i, i] -= p
    return TensorField(u.grid, S)


def dissipation_density(model, rho, u):
    """ℙ:𝔻 cell-wise."""

    law = getattr(model, 'law', model)
    D = shear_rate(u)
    P = viscous_stress(law, rho, u)
    return ScalarField(u.grid, np.sum(P.values * D.values, axis=(0, 1)))


#-----------------#
#-- COERCIVITY: --#
#-----------------#

def coercivity_samples(n, count=64, seed=0, scale=10.0):
    """
    Documented sample set of symmetric n×n matrices: the zero matrix, a pure
    trace, a pure shear, and `count` random symmetric matrices with entries
    uniform in [−scale, scale].
    """

    rng = np.random.default_rng(seed)
    samples = [np.zeros((n, n)), np.eye(n)]
    shear = np.zeros((n, n))
    shear[0, 1] = shear[1, 0] = 1.0 if n > 1 else 0.0
    samples.append(shear)
    for _ in range(count):
        M = rng.uniform(-scale, scale, size=(n, n))
        samples.append(0.5 * (M + M.T))
    return samples


def coercivity_check(model, g_samples, B_samples, nu, q, tol=None):
    """
    Evaluates β0 tr B + β|B|² − ν|B|^q over every (g, B) pair.

    Parameters:
    - `model` - `ConstitutiveModel` or `ViscosityLaw`.
    - `g_samples` - Nonnegative densities.
    - `B_samples` - Symmetric matrices.
    - `nu`, `q` - Constants of the condition being tested.
    - `tol` - Relative tolerance; defaults to the `coercivity` setting.
    """

    if not g_samples or not B_samples:
        raise ParameterDomainError('coercivity check needs non-empty sample lists')
    if not nu > 0 or not q > 1:
        raise ParameterDomainError('coercivity check needs nu > 0 and q > 1')
    tol = tolerance('coercivity') if tol is None else tol
    law = getattr(model, 'law', model)

    slacks = []
    scale = 1.0
    for g in g_samples:
        for B in B_samples:
            B = np.asarray(B, dtype=float)
            lhs = law.coercive_lhs(g, B)
            rhs = nu * float(np.sqrt(np.sum(B * B))) ** q
            slacks.append(lhs - rhs)
            scale = max(scale, abs(lhs), abs(rhs))
    slacks = np.array(slacks)
    worst = int(np.argmin(slacks))
    min_slack = float(slacks[worst])
    caveats = []
    if isinstance(law, NewtonianLaw) and law.lam < 0:
        caveats.append('lambda < 0: the trace term lambda (tr B)^2 is negative, coercivity with q = 2, '
                       'nu = 2 mu fails on dilatational samples')
    if isinstance(law, PowerLawModel) and law.eps_reg > 0 and law.q < 2:
        caveats.append('regularized shear-thinning law: (|B|^2 + eps^2)^((q-2)/2) < |B|^(q-2), '
                       'the condition cannot hold with the nominal nu')
    passed = min_slack >= -tol * scale
    if not passed:
        logger.warning('Coercivity check failed: min slack %.3e at sample %d', min_slack, worst)
    return CoercivityReport(
        samples_checked=len(slacks), min_slack=min_slack, passed=passed,
        worst_sample=worst, caveats=caveats)
