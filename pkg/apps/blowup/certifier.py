"""
Blow-up certificates and run monitors.

A certificate states, from the initial data alone, the energy decay rate C the
nonexistence argument guarantees and the resulting lifespan bound
T_star = E0/C. The monitor replays a recorded run against every inequality of
that argument: energy monotonicity, the energy-rate bound, conservation,
the dissipation lower bound and the certified energy line.
"""

import logging
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import thresholds
from .conf import blowup_setting, tolerance
from .constitutive import PowerLawModel, coercivity_check, coercivity_samples
from .exceptions import HypothesisError, ParameterDomainError, SeriesMismatchError
from .grid_fields import functionals
from .helper import dump_json
from .inequality_lab import check_dissipation_bound
from .solver import Termination

logger = logging.getLogger(__name__)


class Disposition:
    CERTIFIED_CONSISTENT = 'certified-consistent'
    HYPOTHESIS_FAILED = 'hypothesis-failed'
    NUMERICAL_BREAKDOWN = 'numerical-breakdown'
    DOMAIN_EXHAUSTED = 'domain-exhausted'
    INCONSISTENT = 'inconsistent'


MOMENTUM_ROUNDOFF = 1e-12

EXIT_CODES = {
    Disposition.CERTIFIED_CONSISTENT: 0,
    Disposition.HYPOTHESIS_FAILED: 2,
    Disposition.NUMERICAL_BREAKDOWN: 3,
    Disposition.DOMAIN_EXHAUSTED: 4,
    Disposition.INCONSISTENT: 5,
}


@dataclass(frozen=True)
class BlowupCertificate:
    """
    Constants of the energy decay bound for one initial state.

    `C`, `T_star` and their `_chain` counterparts are `None` whenever a
    hypothesis fails; `reason` then names the failed hypotheses.
    """

    params: thresholds.ExponentParams
    m: float
    P: tuple
    E0: float
    theorem: thresholds.Theorem
    hypotheses: thresholds.AdmissibilityReport
    K: float = None
    K1: float = None
    C: float = None
    T_star: float = None
    C_chain: float = None
    T_star_chain: float = None
    reason: str = None
    config_hash: str = None

    @property
    def issued(self):
        return self.C is not None

    @property
    def momentum_norm(self):
        return float(np.linalg.norm(self.P))

    def to_dict(self):
        return {
            'params': self.params.to_dict(),
            'm': self.m,
            'P': list(self.P),
            'E0': self.E0,
            'K': self.K,
            'K1': self.K1,
            'C': self.C,
            'T_star': self.T_star,
            'C_chain': self.C_chain,
            'T_star_chain': self.T_star_chain,
            'theorem': self.theorem.value,
            'hypotheses': self.hypotheses.to_dict(),
            'reason': self.reason,
            'config_hash': self.config_hash,
        }

    @classmethod
    def from_dict(cls, data):
        hypotheses = dict(data['hypotheses'])
        hypotheses['which_theorem'] = thresholds.Theorem(hypotheses['which_theorem'])
        return cls(
            params=thresholds.ExponentParams(**data['params']),
            m=data['m'],
            P=tuple(data['P']),
            E0=data['E0'],
            theorem=thresholds.Theorem(data['theorem']),
            hypotheses=thresholds.AdmissibilityReport(**hypotheses),
            K=data.get('K'),
            K1=data.get('K1'),
            C=data.get('C'),
            T_star=data.get('T_star'),
            C_chain=data.get('C_chain'),
            T_star_chain=data.get('T_star_chain'),
            reason=data.get('reason'),
            config_hash=data.get('config_hash'),
        )


@dataclass
class MonitorReport:
    """
    Outcome of replaying a time series against the certificate.

    Interval checks (`energy_monotone`, `eq12_residual`, `eq12_passed`) have one
    entry per consecutive record pair; the rest have one entry per record.
    `dissipation_bound` entries are `None` where the bound does not apply.
    """

    energy_monotone: list = field(default_factory=list)
    eq12_residual: list = field(default_factory=list)
    eq12_passed: list = field(default_factory=list)
    eq12_pass_fraction: float = 1.0
    dissipation_bound: list = field(default_factory=list)
    conservation_drift: list = field(default_factory=list)
    support_ok: list = field(default_factory=list)
    certified_line: list = field(default_factory=list)
    conservation_guaranteed: bool = True
    violations: list = field(default_factory=list)
    verdict: str = 'pass'

    @property
    def passed(self):
        return self.verdict == 'pass'

    def worst(self):
        """Worst value of each monitored quantity, for summaries."""

        bounds = [b for b in self.dissipation_bound if b is not None]
        drifts = self.conservation_drift or [(0.0, 0.0)]
        return {
            'eq12_residual': max(self.eq12_residual) if self.eq12_residual else None,
            'dissipation_bound_slack': min(b.slack for b in bounds) if bounds else None,
            'mass_drift': max(d[0] for d in drifts),
            'momentum_drift': max(d[1] for d in drifts),
        }

    def to_dict(self):
        return {
            'energy_monotone': list(self.energy_monotone),
            'eq12_residual': list(self.eq12_residual),
            'eq12_passed': list(self.eq12_passed),
            'eq12_pass_fraction': self.eq12_pass_fraction,
            'dissipation_bound': [None if b is None else b.to_dict() for b in self.dissipation_bound],
            'conservation_drift': [list(d) for d in self.conservation_drift],
            'support_ok': list(self.support_ok),
            'certified_line': list(self.certified_line),
            'conservation_guaranteed': self.conservation_guaranteed,
            'violations': list(self.violations),
            'verdict': self.verdict,
            'worst': self.worst(),
        }


#------------------#
#-- CERTIFICATE: --#
#------------------#

def _check_coercivity(model, params):
    """True when the law satisfies the pointwise coercivity condition with (ν, q)."""

    law = model.law
    if isinstance(law, PowerLawModel):
        # The regularization is a discretization device; the theorem speaks about the exact law.
        if law.eps_reg > 0:
            logger.info('Certifying the unregularized power law (eps_reg=%g used only by the solver)', law.eps_reg)
        return law.q == params.q and law.nu >= params.nu
    report = coercivity_check(model, [0.0, 0.5, 1.0, 2.0], coercivity_samples(params.n), params.nu, params.q)
    for caveat in report.caveats:
        logger.warning('Coercivity caveat: %s', caveat)
    return report.passed


def certify(params, state0, is_mhd, model=None, config_hash=None):
    """
    Issues the certificate for `state0`.

    Never raises for failed hypotheses: the certificate then carries no rate
    and names the failure in `reason`.

    Parameters:
    - `params` - `ExponentParams`.
    - `state0` - Initial `FluidState`.
    - `is_mhd` - Use the MHD theorem (energy includes the magnetic part).
    - `model` - Optional `ConstitutiveModel`; when given, coercivity with
      (ν, q) becomes an additional hypothesis.
    - `config_hash` - Echoed so monitors can reject foreign series.
    """

    breakdown = functionals(state0, params)
    E0 = breakdown.total if is_mhd else breakdown.E_k + breakdown.E_i
    P = tuple(breakdown.P)
    # Momentum at round-off level (symmetric data) counts as zero:
    if breakdown.momentum_norm <= MOMENTUM_ROUNDOFF * math.sqrt(max(2.0 * breakdown.m * E0, 0.0)):
        P = (0.0,) * len(P)
    hypotheses = thresholds.admissibility(params, P, mhd=is_mhd)
    if model is not None and not _check_coercivity(model, params):
        hypotheses = replace(hypotheses, theorem_applies=False, which_theorem=thresholds.Theorem.NONE,
                             failed=list(hypotheses.failed) + ['coercivity'])

    theorem = thresholds.Theorem.MHD if is_mhd else thresholds.Theorem.FLUID
    common = dict(params=params, m=breakdown.m, P=P, E0=E0, theorem=theorem,
                  hypotheses=hypotheses, config_hash=config_hash)

    # Constants are reported whenever they are defined, even without a certificate:
    K = K1 = None
    if 2 <= params.n and params.q < params.n:
        K = thresholds.sobolev_K(params.n, params.q)
        if thresholds.condition15(params.n, params.gamma, params.q) >= 1 and breakdown.m > 0:
            K1 = thresholds.momentum_K1(params.n, params.gamma, params.q, breakdown.m, params.A)

    if not hypotheses.theorem_applies:
        reason = '; '.join('{} = false'.format(name) for name in hypotheses.failed)
        logger.info('No certificate: %s', reason)
        return BlowupCertificate(K=K, K1=K1, reason=reason, **common)

    try:
        constants = thresholds.certificate_constants(params, breakdown.m, P, E0, mhd=is_mhd)
    except ParameterDomainError as err:
        logger.info('No certificate: %s', err)
        return BlowupCertificate(K=K, K1=K1, reason=str(err), **common)
    logger.info('Certificate issued: C=%.6e T_star=%.6e (chain rate %.6e)',
                constants.C, constants.T_star, constants.C_chain)
    return BlowupCertificate(
        K=constants.K, K1=constants.K1, C=constants.C, T_star=constants.T_star,
        C_chain=constants.C_chain, T_star_chain=constants.T_star_chain, **common)


#--------------#
#-- MONITOR: --#
#--------------#

def _relative(value, scale):
    return abs(value) / scale if scale > 0 else abs(value)


def monitor(series, cert, params, tolerances=None):
    """
    Replays `series` against `cert`.

    Per record pair: energy monotone within `energy_monotone`·E0, and the
    energy-rate residual (ΔE/Δt + ν·mean D_q [+ η·mean ∫|curl H|²]) at most
    `eq12_relative` of the dissipation term plus `eq12_absolute`·E0. Per record:
    mass and momentum drift, the dissipation lower bound with the
    instantaneous E_i, and the certified line E0 − C_chain·t, each only while
    the support stays inside the margin.

    Parameters:
    - `series` - `TimeSeries`.
    - `cert` - `BlowupCertificate` of the same config.
    - `params` - `ExponentParams` of the run.
    - `tolerances` - Overrides for the `BLOWUP['TOLERANCES']` entries.
    """

    if not len(series):
        raise ParameterDomainError('cannot monitor an empty series')
    if series.config_hash and cert.config_hash and series.config_hash != cert.config_hash:
        raise SeriesMismatchError('series config hash {} does not match certificate hash {}'.format(
            series.config_hash, cert.config_hash))

    tol = lambda name: tolerance(name, tolerances)
    is_mhd = cert.theorem is thresholds.Theorem.MHD
    records = series.breakdowns
    times = series.times
    energy = [b.total for b in records]
    E0 = energy[0]
    E_scale = abs(E0) if E0 != 0 else 1.0
    m0 = records[0].m
    P0 = np.asarray(records[0].P, dtype=float)
    P_scale = max(float(np.linalg.norm(P0)), math.sqrt(max(2.0 * m0 * E0, 0.0)))

    report = MonitorReport(conservation_guaranteed=series.clamps[-1] == 0)
    violations = []

    def flag(index, check, value):
        violations.append({'index': index, 'time': times[index], 'check': check, 'value': value})

    report.support_ok = [series.support_ok(k) for k in range(len(series))]

    # Interval checks:
    eta = params.eta if is_mhd else 0.0
    counted = passed = 0
    for k in range(len(series) - 1):
        dt = times[k + 1] - times[k]
        monotone = energy[k + 1] <= energy[k] + tol('energy_monotone') * E_scale
        # Trapezoid mean of the dissipation over [t_k, t_k+1]
        dissipation = params.nu * 0.5 * (records[k].D_q + records[k + 1].D_q)
        if eta > 0:
            dissipation += eta * 0.5 * (records[k].ohmic + records[k + 1].ohmic)
        rate = (energy[k + 1] - energy[k]) / dt
        residual = rate + dissipation
        # One-sided: extra numerical dissipation never fails an interval
        ok = residual <= tol('eq12_relative') * dissipation + tol('eq12_absolute') * E_scale
        report.energy_monotone.append(bool(monotone))
        report.eq12_residual.append(float(residual))
        report.eq12_passed.append(bool(ok))
        # Intervals ending outside the margin are reported but not counted
        if report.support_ok[k + 1]:
            counted += 1
            passed += ok
            if not monotone:
                flag(k + 1, 'energy_monotone', energy[k + 1] - energy[k])
    report.eq12_pass_fraction = passed / counted if counted else 1.0
    if report.eq12_pass_fraction < tol('eq12_pass_fraction'):
        flag(len(series) - 1, 'eq12_pass_fraction', report.eq12_pass_fraction)

    # Per-record checks:
    for k, b in enumerate(records):
        mass_drift = _relative(b.m - m0, abs(m0))
        momentum_drift = _relative(float(np.linalg.norm(np.asarray(b.P) - P0)), P_scale)
        report.conservation_drift.append((mass_drift, momentum_drift))

        bound = None
        if b.E_i > 0:
            try:
                bound = check_dissipation_bound(b.momentum_norm, b.E_i, m0, b.D_q, params, mhd=is_mhd,
                                                tol=tol('composite'))
            except (HypothesisError, ParameterDomainError) as err:
                logger.debug('Dissipation bound inactive: %s', err)
        report.dissipation_bound.append(bound)

        on_line = None
        if cert.issued:
            line = cert.E0 - cert.C_chain * (times[k] - times[0])
            on_line = bool(energy[k] <= line + tol('certified_line') * E_scale)
        report.certified_line.append(on_line)

        if not report.support_ok[k]:
            continue
        if mass_drift > tol('drift'):
            flag(k, 'mass_drift', mass_drift)
        if momentum_drift > tol('drift'):
            flag(k, 'momentum_drift', momentum_drift)
        if bound is not None and not bound.passed:
            flag(k, 'dissipation_bound', bound.slack)
        if on_line is False:
            flag(k, 'certified_line', energy[k])

    report.violations = violations
    report.verdict = 'fail' if violations else 'pass'
    series.violations = list(violations)
    if violations:
        logger.warning('Monitor found %d violations, first: %s at t=%.6g', len(violations),
                       violations[0]['check'], violations[0]['time'])
    return report


#------------------#
#-- DISPOSITION: --#
#------------------#

def disposition(cert, report=None, termination=None):
    """
    Maps a certificate, an optional monitor report and the run termination to
    one disposition. Hypothesis failure wins over everything else.
    """

    if not cert.issued:
        return Disposition.HYPOTHESIS_FAILED
    if termination == Termination.NUMERICAL_BREAKDOWN:
        return Disposition.NUMERICAL_BREAKDOWN
    if termination == Termination.DOMAIN_EXHAUSTED:
        return Disposition.DOMAIN_EXHAUSTED
    if report is not None and not report.passed:
        return Disposition.INCONSISTENT
    return Disposition.CERTIFIED_CONSISTENT


def exit_code(value):
    return EXIT_CODES[value]


#-------------#
#-- REPORT: --#
#-------------#

def _summary_lines(data):
    cert = data['certificate']
    lines = [
        'Disposition: {}'.format(data['disposition']),
        'Theorem: {}'.format(cert['theorem']),
        'Hypotheses:',
    ]
    hypotheses = cert['hypotheses']
    for name in ('in_q_range', 'condition15', 'momentum_nonzero', 'theorem_applies'):
        lines.append('  {:<18} {}'.format(name, 'yes' if hypotheses[name] else 'no'))
    if cert['reason']:
        lines.append('  reason: {}'.format(cert['reason']))
    lines.append('m = {!r}, |P| = {!r}, E0 = {!r}'.format(
        cert['m'], float(np.linalg.norm(cert['P'])), cert['E0']))
    lines.append('K = {!r}, K1 = {!r}'.format(cert['K'], cert['K1']))
    lines.append('C = {!r}, T_star = {!r}'.format(cert['C'], cert['T_star']))
    lines.append('C_chain = {!r}, T_star_chain = {!r}'.format(cert['C_chain'], cert['T_star_chain']))
    monitor_data = data.get('monitor')
    if monitor_data:
        worst = monitor_data['worst']
        lines.append('Monitor verdict: {}'.format(monitor_data['verdict']))
        lines.append('  energy-rate pass fraction: {!r}'.format(monitor_data['eq12_pass_fraction']))
        lines.append('  worst energy-rate residual: {!r}'.format(worst['eq12_residual']))
        lines.append('  worst dissipation bound slack: {!r}'.format(worst['dissipation_bound_slack']))
        lines.append('  max mass drift: {!r}'.format(worst['mass_drift']))
        lines.append('  max momentum drift: {!r}'.format(worst['momentum_drift']))
        if not monitor_data['conservation_guaranteed']:
            lines.append('  conservation not guaranteed (density floor clamps fired)')
        for violation in monitor_data['violations'][:10]:
            lines.append('  violation: {check} at t={time!r} ({value!r})'.format(**violation))
    if data.get('exit_time') is not None:
        lines.append('Run ended ({}) at t = {!r}'.format(data['termination'], data['exit_time']))
    if data.get('breakdown_before_T_star'):
        lines.append('Numerical breakdown preceded T_star.')
    return lines


def write_report(cert, report, path, termination=None, exit_time=None):
    """
    Writes `report.json` and `summary.txt` into the directory `path` and
    returns the disposition.

    Parameters:
    - `cert` - `BlowupCertificate`.
    - `report` - `MonitorReport` or `None` (certificate only).
    - `path` - Output directory (created when missing).
    - `termination` - Run termination reason, when a run took place.
    - `exit_time` - Time at which the run stopped.
    """

    try:
        os.makedirs(path, exist_ok=True)
    except OSError as err:
        raise ParameterDomainError('cannot write report to {}: {}'.format(path, err))
    outcome = disposition(cert, report, termination)
    before = (termination == Termination.NUMERICAL_BREAKDOWN and cert.issued and exit_time is not None
              and exit_time < cert.T_star)
    data = {
        'schema_version': blowup_setting('REPORT_SCHEMA_VERSION'),
        'disposition': outcome,
        'exit_code': exit_code(outcome),
        'certificate': cert.to_dict(),
        'monitor': None if report is None else report.to_dict(),
        'termination': termination,
        'exit_time': exit_time,
        'breakdown_before_T_star': bool(before),
    }
    dump_json(data, os.path.join(path, 'report.json'))
    with open(os.path.join(path, 'summary.txt'), 'w') as handle:
        handle.write('\n'.join(_summary_lines(data)) + '\n')
    logger.info('Report written to %s: %s', path, outcome)
    return outcome
