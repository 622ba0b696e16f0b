"""
Explicit time integration of the compressible non-Newtonian system and its
resistive MHD extension on the periodic box.

Spatial terms are central differences written in divergence form, so the
discrete total mass and momentum change only through round-off (and through
floor clamps, which are counted). Time stepping is the two-stage midpoint
Runge-Kutta method with a combined acoustic/viscous/resistive limit.
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .conf import blowup_setting
from .constitutive import full_stress
from .exceptions import GridMismatchError, ParameterDomainError
from .grid_fields import (
    FluidState, ScalarField, VectorField, Grid, partial, shear_rate, curl, cross,
    functionals, integrate, support_radius,
)
from .initial_data import initial_data
from .snapshots import write_snapshot

logger = logging.getLogger(__name__)

HYPERDIFFUSION_DEFAULT = 1.0 / 32.0


class Termination:
    COMPLETED = 'completed'
    DOMAIN_EXHAUSTED = 'domain-exhausted'
    NUMERICAL_BREAKDOWN = 'numerical-breakdown'
    STEP_LIMIT = 'step-limit'


@dataclass(frozen=True)
class SimConfig:
    """
    Everything a run needs.

    Parameters:
    - `grid` - `Grid`.
    - `model` - `ConstitutiveModel`.
    - `params` - `ExponentParams` (its `eta` is the resistivity).
    - `t_end` - Final time, > 0.
    - `initial_condition` - `{'name': ..., **generator options}`.
    - `cfl` - Safety factor in (0, 0.9].
    - `rho_floor` - Absolute density floor; `None` uses the ratio setting times
      the initial maximum density.
    - `support_margin` - Runs stop once the support radius exceeds margin·L.
    - `support_threshold` - Relative threshold defining the support.
    - `output_every` - Steps between recorded breakdowns.
    - `snapshot_every` - Records between snapshots (0: first and last only).
    - `induction_only` - Freeze ρ and u and evolve H alone.
    - `hyperdiffusion` - Filter coefficient; `None` enables the default filter
      for q < 2 and disables it otherwise.
    - `vacuum_ratio` - Cells below this fraction of the initial peak density
      carry zero velocity and do not limit the viscous step.
    - `max_steps` - Optional hard cap on the number of steps.
    - `tolerances` - Per-run tolerance overrides.
    """

    grid: Grid
    model: object
    params: object
    t_end: float
    initial_condition: dict
    cfl: float = 0.4
    rho_floor: float = None
    support_margin: float = 0.4
    support_threshold: float = 1e-3
    output_every: int = 10
    snapshot_every: int = 0
    induction_only: bool = False
    hyperdiffusion: float = None
    vacuum_ratio: float = 1e-6
    max_steps: int = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        errors = []
        if not 0 < self.cfl <= 0.9:
            errors.append('cfl must lie in (0, 0.9]')
        if not 0 < self.support_margin < 1:
            errors.append('support_margin must lie in (0, 1)')
        if not self.t_end > 0:
            errors.append('t_end must be positive')
        if int(self.output_every) != self.output_every or self.output_every < 1:
            errors.append('output_every must be a positive integer')
        if self.params.n != self.grid.n:
            errors.append('params.n and grid dimension differ')
        if self.induction_only and self.grid.n != 3:
            errors.append('induction_only needs n = 3')
        if errors:
            raise ParameterDomainError('; '.join(errors))

    @property
    def eta(self):
        return self.params.eta

    @property
    def filter_coefficient(self):
        if self.hyperdiffusion is not None:
            return float(self.hyperdiffusion)
        return HYPERDIFFUSION_DEFAULT if self.params.q < 2 else 0.0


@dataclass
class TimeSeries:
    """
    Recorded functionals of one run.

    `support_limit` is margin·L (`None` disables the support gate), and
    `violations` is filled by the certifier's monitor.
    """

    n: int
    times: list = field(default_factory=list)
    breakdowns: list = field(default_factory=list)
    support_radii: list = field(default_factory=list)
    clamps: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    config_hash: str = None
    support_limit: float = None
    termination: str = Termination.COMPLETED
    exit_time: float = None

    def append(self, time, breakdown, radius, clamps):
        if self.times and not time > self.times[-1]:
            raise ParameterDomainError('record times must increase strictly ({} after {})'.format(
                time, self.times[-1]))
        self.times.append(float(time))
        self.breakdowns.append(breakdown)
        self.support_radii.append(float(radius))
        self.clamps.append(int(clamps))

    def support_ok(self, index):
        return self.support_limit is None or self.support_radii[index] <= self.support_limit

    def __len__(self):
        return len(self.times)


@dataclass
class RunResult:
    series: TimeSeries
    initial_state: FluidState
    final_state: FluidState
    termination: str
    exit_time: float
    clamp_events: int
    steps: int
    snapshot_files: list = field(default_factory=list)

    @property
    def conservation_guaranteed(self):
        return self.clamp_events == 0


#-----------------------#
#-- RIGHT-HAND SIDES: --#
#-----------------------#

def _third_difference(values, axis):
    # Undivided difference at face i+1/2, stencil cells i-1 .. i+2.
    return (np.roll(values, -2, axis=axis) - 3.0 * np.roll(values, -1, axis=axis) + 3.0 * values
            - np.roll(values, 1, axis=axis))


def _open_faces(active, axis):
    return active & np.roll(active, -1, axis=axis) & np.roll(active, -2, axis=axis) & np.roll(active, 1, axis=axis)


def hyperdiffusion_term(values, grid, coefficient, speed, active=None):
    """
    −κ·a·h³ ∂⁴ per axis, written as a difference of face fluxes κ·a·Δ³/h so
    that it sums to zero over the box and vanishes as O(h³) for smooth fields.

    Parameters:
    - `values` - Array with the grid axes last.
    - `coefficient` - κ.
    - `speed` - Signal speed a.
    - `active` - Optional boolean cell mask. A face whose four-cell stencil
      leaves the mask carries no flux, so cells outside it are untouched.
    """

    lead = values.ndim - grid.n
    out = np.zeros_like(values)
    for j in range(grid.n):
        axis = j + lead
        face = _third_difference(values, axis)
        if active is not None:
            face = np.where(_open_faces(active, j), face, 0.0)
        out -= coefficient * speed * (face - np.roll(face, 1, axis=axis)) / grid.spacing[j]
    return out


def _signal_speed(rho, u, model, rho_floor):
    p = model.pressure
    cs = np.sqrt(p.gamma * p.A * np.maximum(rho, rho_floor) ** (p.gamma - 1.0))
    return float(np.max(np.sqrt(np.sum(u ** 2, axis=0)) + cs))


def _stress_flux(rho, u, model, grid):
    """Momentum flux −ρu⊗u + 𝕊 as an (n, n) + cells array."""

    flux = full_stress(model, ScalarField(grid, rho), VectorField(grid, u)).values
    for i in range(grid.n):
        for j in range(grid.n):
            flux[i, j] -= rho * u[i] * u[j]
    return flux


def _fluid_rates(rho, u, model, grid, filter_coefficient, rho_floor, vacuum_density=0.0):
    n = grid.n
    M = rho * u
    drho = -sum(partial(M[j], grid, j) for j in range(n))
    flux = _stress_flux(rho, u, model, grid)
    dM = np.array([sum(partial(flux[i, j], grid, j) for j in range(n)) for i in range(n)])
    if filter_coefficient > 0:
        # Only momentum is filtered, and only between fluid cells; drho stays −div(ρu).
        speed = _signal_speed(rho, u, model, rho_floor)
        dM = dM + hyperdiffusion_term(M, grid, filter_coefficient, speed, active=rho >= vacuum_density)
    return drho, dM


def rhs_fluid(state, model, params=None, filter_coefficient=0.0, rho_floor=0.0, vacuum_density=0.0):
    """
    Returns `(drho_dt, dmom_dt)`: −div(ρu) and Div(−ρu⊗u + 𝕊), with 𝕊 from
    `constitutive.full_stress`.

    Parameters:
    - `state` - `FluidState`.
    - `model` - `ConstitutiveModel`.
    - `params` - `ExponentParams` (kept for signature symmetry with `rhs_mhd`).
    - `filter_coefficient` - Momentum hyperdiffusion coefficient (0 disables).
    - `rho_floor` - Density used for the sound speed in vacuum.
    - `vacuum_density` - Cells below it are left out of the filter.
    """

    grid = state.grid
    drho, dM = _fluid_rates(state.rho.values, state.u.values, model, grid, filter_coefficient, rho_floor,
                            vacuum_density)
    return ScalarField(grid, drho), VectorField(grid, dM)


def lorentz_force(H):
    """Div(H⊗H − ½|H|²𝕀), equal to (curl H)×H when div H = 0."""

    grid = H.grid
    if grid.n != 3:
        raise GridMismatchError('the Lorentz force needs n = 3')
    h = H.values
    half_sq = 0.5 * np.sum(h ** 2, axis=0)
    force = np.zeros_like(h)
    for i in range(3):
        for j in range(3):
            maxwell = h[i] * h[j] - (half_sq if i == j else 0.0)
            force[i] += partial(maxwell, grid, j)
    return VectorField(grid, force)


def induction_rate(u, H, eta):
    """curl(u×H) − η curl(curl H)."""

    grid = H.grid
    emf = VectorField(grid, cross(u.values, H.values))
    rate = curl(emf).values
    if eta > 0:
        rate = rate - eta * curl(curl(H)).values
    return VectorField(grid, rate)


def electric_field(state, eta):
    """Induced electric field E = η curl H − u×H."""

    if state.H is None or state.grid.n != 3:
        raise GridMismatchError('the electric field needs a magnetic field and n = 3')
    return VectorField(state.grid, eta * curl(state.H).values - cross(state.u.values, state.H.values))


def rhs_mhd(state, model, params, eta, filter_coefficient=0.0, rho_floor=0.0, vacuum_density=0.0):
    """Fluid rates plus the Lorentz force, and the induction rate `dH_dt`."""

    grid = state.grid
    if grid.n != 3:
        raise GridMismatchError('MHD right-hand side needs n = 3, got n = {}'.format(grid.n))
    drho, dM = rhs_fluid(state, model, params, filter_coefficient, rho_floor, vacuum_density)
    if state.H is None:
        return drho, dM, VectorField(grid, np.zeros((3,) + grid.shape))
    dM = VectorField(grid, dM.values + lorentz_force(state.H).values)
    return drho, dM, induction_rate(state.u, state.H, eta)


#--------------------------#
#-- DIVERGENCE CLEANING: --#
#--------------------------#

def project_divergence_free(H):
    """
    Removes the discrete gradient part of H in Fourier space, using the symbol
    i·sin(k h)/h of the central difference, so the discrete divergence of the
    result vanishes to round-off.
    """

    grid = H.grid
    symbols = []
    for axis in range(grid.n):
        k = 2.0 * np.pi * np.fft.fftfreq(grid.cells[axis], d=grid.spacing[axis])
        symbols.append(np.sin(k * grid.spacing[axis]) / grid.spacing[axis])
    ks = np.meshgrid(*symbols, indexing='ij')
    k2 = sum(kk ** 2 for kk in ks)
    Hhat = np.array([np.fft.fftn(H.values[i]) for i in range(grid.n)])
    kdotH = sum(ks[i] * Hhat[i] for i in range(grid.n))
    with np.errstate(divide='ignore', invalid='ignore'):
        scale = np.where(k2 > 0, kdotH / k2, 0.0)
    cleaned = np.array([np.real(np.fft.ifftn(Hhat[i] - ks[i] * scale)) for i in range(grid.n)])
    return VectorField(grid, cleaned)


#----------------#
#-- TIME STEP: --#
#----------------#

def stable_dt(state, model, params, grid, cfl, rho_floor=0.0, vacuum_density=0.0):
    """
    cfl · min over cells of h/(|u| + c_s) and h²ρ/(2n μ_eff), plus h²/(2n η)
    when a magnetic field is present.
    """

    h = min(grid.spacing)
    n = grid.n
    rho = state.rho.values
    u = state.u.values
    p = model.pressure
    floor = rho_floor if rho_floor > 0 else 1e-10 * max(float(np.max(rho)), 1.0)
    limits = []

    speed = _signal_speed(rho, u, model, floor)
    if speed > 0:
        limits.append(h / speed)

    # Explicit diffusion limit h²/(2n·μ_eff/ρ); vacuum cells carry no velocity and are skipped
    mag = np.sqrt(np.sum(shear_rate(state.u).values ** 2, axis=(0, 1)))
    mu_eff = np.broadcast_to(model.law.effective_viscosity(rho, mag), rho.shape)
    active = (mu_eff > 0) & np.isfinite(mu_eff) & (rho >= vacuum_density)
    if np.any(active):
        limits.append(float(np.min(h * h * np.maximum(rho[active], floor) / (2.0 * n * mu_eff[active]))))

    # Resistive diffusion of H
    if state.H is not None and params.eta > 0:
        limits.append(h * h / (2.0 * n * params.eta))

    dt = cfl * min(limits) if limits else math.inf
    if not math.isfinite(dt) or dt <= 0:
        # Degenerate state: fall back on the acoustic limit at the floor density.
        cs = math.sqrt(p.gamma * max(p.A, 0.0) * floor ** (p.gamma - 1.0))
        dt = cfl * h / cs if cs > 0 else cfl * h
    return dt


#---------------#
#-- STEPPING: --#
#---------------#

class Integrator:
    """
    Midpoint Runge-Kutta stepper on the conserved variables (ρ, ρu, H).

    The momentum density is carried between steps; velocities are recovered
    only where ρ reaches the vacuum threshold and are zero elsewhere, so
    momentum parked in near-vacuum cells is kept rather than discarded.

    Parameters:
    - `config` - `SimConfig`.
    - `peak_density` - Initial maximum density, used for the floor and vacuum
      thresholds.
    """

    def __init__(self, config, peak_density):
        self.config = config
        self.grid = config.grid
        self.model = config.model
        self.params = config.params
        peak = max(float(peak_density), np.finfo(float).tiny)
        ratio = blowup_setting('RHO_FLOOR_RATIO')
        self.rho_floor = config.rho_floor if config.rho_floor is not None else ratio * peak
        self.vacuum_density = max(config.vacuum_ratio * peak, self.rho_floor)
        self.filter_coefficient = config.filter_coefficient
        self.clamp_events = 0

    def conserved(self, state):
        """`(rho, M, H)` arrays of a state, with the density lifted to the floor."""

        rho0 = state.rho.values
        H = None if state.H is None else state.H.values.copy()
        return np.maximum(rho0, self.rho_floor), rho0 * state.u.values, H

    def velocity(self, rho, M):
        # u = M/ρ on fluid cells; vacuum cells keep their momentum but move nothing
        active = rho >= self.vacuum_density
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(active, M / np.where(active, rho, 1.0), 0.0)

    def state_of(self, rho, M, H, time):
        return FluidState(rho=ScalarField(self.grid, rho), u=VectorField(self.grid, self.velocity(rho, M)),
                          H=None if H is None else VectorField(self.grid, H), time=time)

    def _clamp(self, rho):
        # Lifting a cell adds mass: each lifted cell is one clamp event
        low = rho < self.rho_floor
        count = int(np.count_nonzero(low))
        if count:
            self.clamp_events += count
            logger.warning('Density floor clamp on %d cells', count)
            rho = np.where(low, self.rho_floor, rho)
        return rho

    def rates(self, rho, M, H):
        u = self.velocity(rho, M)
        if self.config.induction_only:
            dH = induction_rate(VectorField(self.grid, u), VectorField(self.grid, H), self.params.eta).values
            return np.zeros_like(rho), np.zeros_like(M), dH
        drho, dM = _fluid_rates(rho, u, self.model, self.grid, self.filter_coefficient, self.rho_floor,
                                self.vacuum_density)
        if H is None:
            return drho, dM, None
        field = VectorField(self.grid, H)
        dM = dM + lorentz_force(field).values
        return drho, dM, induction_rate(VectorField(self.grid, u), field, self.params.eta).values

    def advance(self, rho0, M0, H0, dt):
        """One midpoint step; H is projected after the full step."""

        k_rho, k_M, k_H = self.rates(rho0, M0, H0)
        rho_half = self._clamp(rho0 + 0.5 * dt * k_rho)
        M_half = M0 + 0.5 * dt * k_M
        H_half = None if H0 is None else H0 + 0.5 * dt * k_H

        k_rho, k_M, k_H = self.rates(rho_half, M_half, H_half)
        rho1 = self._clamp(rho0 + dt * k_rho)
        M1 = M0 + dt * k_M
        H1 = None
        if H0 is not None:
            H1 = project_divergence_free(VectorField(self.grid, H0 + dt * k_H)).values
        return rho1, M1, H1

    def step(self, state, dt):
        rho, M, H = self.advance(*self.conserved(state), dt)
        return self.state_of(rho, M, H, state.time + dt)

    def stable_dt(self, state):
        return stable_dt(state, self.model, self.params, self.grid, self.config.cfl,
                         self.rho_floor, self.vacuum_density)


def step(state, config, dt=None):
    """One step from `state`; `dt` defaults to the stable step."""

    integrator = Integrator(config, np.max(state.rho.values))
    if dt is None:
        dt = integrator.stable_dt(integrator.state_of(*integrator.conserved(state), state.time))
    return integrator.step(state, dt)


def build_initial_state(config):
    """The configured initial data with the density lifted to the run's floor."""

    options = dict(config.initial_condition)
    state0 = initial_data(options.pop('name'), config.params, config.grid, **options)
    integrator = Integrator(config, np.max(state0.rho.values))
    return integrator.state_of(*integrator.conserved(state0), state0.time)


def _finite(*arrays):
    return all(a is None or bool(np.all(np.isfinite(a))) for a in arrays)


def run(config, state0=None, snapshot_dir=None, config_hash=None):
    """
    Integrates from the configured initial data to `t_end`.

    Records an EnergyBreakdown every `output_every` steps (and at the start
    and end); the recorded momentum is the integral of the carried momentum
    density. Stops early, without raising, on a non-finite state
    (`numerical-breakdown`), when the support radius exceeds
    `support_margin·L` (`domain-exhausted`, checked on every record including
    the initial one, never in induction-only mode) or after `max_steps` steps
    (`step-limit`).

    Parameters:
    - `config` - `SimConfig`.
    - `state0` - Initial state; built from `config.initial_condition` when omitted.
    - `snapshot_dir` - Directory for field snapshots (none written when omitted).
    - `config_hash` - Stored on the series so monitors can match certificates.
    """

    grid = config.grid
    params = config.params
    if state0 is None:
        state0 = build_initial_state(config)
    integrator = Integrator(config, np.max(state0.rho.values))
    rho, M, H = integrator.conserved(state0)
    state = integrator.state_of(rho, M, H, state0.time)
    initial = state

    # Frozen fluid: the field fills the box by construction, so no support gate.
    limit = None if config.induction_only else config.support_margin * grid.half_width
    series = TimeSeries(n=grid.n, config_hash=config_hash, support_limit=limit)
    snapshot_files = []

    def snapshot(current, index):
        files = write_snapshot(current.rho, snapshot_dir, 'rho_{:06d}'.format(index), current.time)
        files += write_snapshot(current.u, snapshot_dir, 'u_{:06d}'.format(index), current.time)
        if current.H is not None:
            files += write_snapshot(current.H, snapshot_dir, 'H_{:06d}'.format(index), current.time)
        return files

    def record(current, momentum):
        breakdown = replace(functionals(current, params),
                            P=tuple(integrate(momentum[i], grid) for i in range(grid.n)))
        series.append(current.time, breakdown, support_radius(current, config.support_threshold),
                      integrator.clamp_events)
        logger.debug('t=%.6g E=%.10g', current.time, breakdown.total)
        index = len(series) - 1
        if snapshot_dir and (index == 0 or (config.snapshot_every and index % config.snapshot_every == 0)):
            snapshot_files.extend(snapshot(current, index))

    logger.info('Run start: n=%d cells=%s model=%s t_end=%g', grid.n, grid.cells,
                config.model.law.kind, config.t_end)
    record(state, M)
    termination = Termination.COMPLETED
    exit_time = None
    steps = 0
    recorded_last = True
    # A truncation that is already too wide is never integrated:
    if limit is not None and series.support_radii[0] > limit:
        termination = Termination.DOMAIN_EXHAUSTED
        logger.info('Domain exhausted at start (support radius %.4g > %.4g)', series.support_radii[0], limit)
    while termination == Termination.COMPLETED and state.time < config.t_end:
        if config.max_steps is not None and steps >= config.max_steps:
            termination = Termination.STEP_LIMIT
            logger.warning('Step limit %d reached at t=%.6g', config.max_steps, state.time)
            break
        dt = integrator.stable_dt(state)
        if state.time + dt >= config.t_end * (1.0 - 1e-14):
            dt = config.t_end - state.time
        if not dt > 0:
            break
        candidate = integrator.advance(rho, M, H, dt)
        steps += 1
        if not _finite(*candidate):
            termination = Termination.NUMERICAL_BREAKDOWN
            exit_time = state.time + dt
            logger.info('Numerical breakdown at t=%.6g', exit_time)
            break
        rho, M, H = candidate
        state = integrator.state_of(rho, M, H, state.time + dt)
        recorded_last = False
        if steps % config.output_every == 0 or state.time >= config.t_end:
            record(state, M)
            recorded_last = True
            if limit is not None and series.support_radii[-1] > limit:
                termination = Termination.DOMAIN_EXHAUSTED
                logger.info('Domain exhausted at t=%.6g (support radius %.4g > %.4g)',
                            state.time, series.support_radii[-1], limit)
                break
    if not recorded_last:
        record(state, M)
    if exit_time is None:
        exit_time = state.time
    series.termination = termination
    series.exit_time = exit_time
    last = len(series) - 1
    if snapshot_dir and last > 0 and not (config.snapshot_every and last % config.snapshot_every == 0):
        snapshot_files.extend(snapshot(state, last))
    logger.info('Run end: %s at t=%.6g after %d steps, %d clamp events',
                termination, exit_time, steps, integrator.clamp_events)
    return RunResult(series=series, initial_state=initial, final_state=state, termination=termination,
                     exit_time=exit_time, clamp_events=integrator.clamp_events, steps=steps,
                     snapshot_files=snapshot_files)
