"""
Named initial-condition generators.

The profiles are our own choice: compactly supported bumps (cut below the
density floor) so the periodic box stands in for the whole space while the
support stays inside the margin.
"""

import logging

import numpy as np

from .exceptions import ParameterDomainError
from .grid_fields import FluidState, ScalarField, VectorField, curl

logger = logging.getLogger(__name__)


def _unit(grid, direction):
    if not 0 <= direction < grid.n:
        raise ParameterDomainError('direction must be an axis index below {}, got {}'.format(grid.n, direction))
    e = np.zeros(grid.n)
    e[direction] = 1.0
    return e


def _gaussian(x, centre, width):
    if not width > 0:
        raise ParameterDomainError('width must be positive, got {}'.format(width))
    shifted = x - np.asarray(centre, dtype=float).reshape((-1,) + (1,) * (x.ndim - 1))
    return np.exp(-np.sum(shifted ** 2, axis=0) / width ** 2)


def _cut(rho, rho_floor):
    rho = np.where(rho < rho_floor, 0.0, rho)
    return rho, rho > 0


def gaussian_drift(params, grid, rho_bar=1.0, width=1.0, U0=0.5, direction=0, u_width=None,
                   rho_floor_ratio=1e-10):
    """
    ρ = ρ̄ exp(−|x|²/w²) cut to 0 below the floor, u = U0 exp(−|x|²/w_u²) ê on the
    support of ρ. Net momentum is nonzero whenever U0 != 0.
    """

    if not rho_bar > 0:
        raise ParameterDomainError('rho_bar must be positive, got {}'.format(rho_bar))
    x = grid.coordinates()
    origin = np.zeros(grid.n)
    rho, support = _cut(rho_bar * _gaussian(x, origin, width), rho_floor_ratio * rho_bar)
    profile = _gaussian(x, origin, width if u_width is None else u_width) * support
    u = U0 * profile[np.newaxis] * _unit(grid, direction).reshape((-1,) + (1,) * grid.n)
    return FluidState(rho=ScalarField(grid, rho), u=VectorField(grid, u))


def colliding_bumps(params, grid, rho_bar=1.0, width=1.0, U0=0.5, offset=None, direction=0,
                    rho_floor_ratio=1e-10):
    """Two equal bumps at ±offset·ê moving towards each other; total momentum is zero."""

    if not rho_bar > 0:
        raise ParameterDomainError('rho_bar must be positive, got {}'.format(rho_bar))
    offset = 2.0 * width if offset is None else offset
    e = _unit(grid, direction)
    x = grid.coordinates()
    left = _gaussian(x, -offset * e, width)
    right = _gaussian(x, offset * e, width)
    rho, support = _cut(rho_bar * (left + right), rho_floor_ratio * rho_bar)
    speed = U0 * (left - right) * support
    u = speed[np.newaxis] * e.reshape((-1,) + (1,) * grid.n)
    return FluidState(rho=ScalarField(grid, rho), u=VectorField(grid, u))


def mhd_loop(params, grid, rho_bar=1.0, width=1.0, U0=0.5, direction=0, B0=0.5, loop_width=None,
             rho_floor_ratio=1e-10):
    """
    Drifting bump threaded by a field loop H = curl(0, 0, B0·w_A·exp(−|x|²/w_A²)),
    so the discrete divergence of H vanishes to round-off.
    """

    if grid.n != 3:
        raise ParameterDomainError('mhd_loop needs a three-dimensional grid')
    base = gaussian_drift(params, grid, rho_bar=rho_bar, width=width, U0=U0, direction=direction,
                          rho_floor_ratio=rho_floor_ratio)
    loop_width = width if loop_width is None else loop_width
    potential = np.zeros((3,) + grid.shape)
    potential[2] = B0 * loop_width * _gaussian(grid.coordinates(), np.zeros(3), loop_width)
    H = curl(VectorField(grid, potential))
    return base.with_fields(H=H)


def magnetic_mode(params, grid, rho_bar=1.0, B0=1.0, mode=1):
    """Uniform fluid at rest with H = (0, 0, B0 sin(kx)), k = π·mode/L."""

    if grid.n != 3:
        raise ParameterDomainError('magnetic_mode needs a three-dimensional grid')
    k = np.pi * mode / grid.half_width
    x = grid.coordinates()
    H = np.zeros((3,) + grid.shape)
    H[2] = B0 * np.sin(k * x[0])
    return FluidState(rho=ScalarField(grid, np.full(grid.shape, float(rho_bar))),
                      u=VectorField(grid, np.zeros((3,) + grid.shape)),
                      H=VectorField(grid, H))


def uniform(params, grid, rho_bar=1.0):
    """Constant density at rest: a steady state of the system."""

    return FluidState(rho=ScalarField(grid, np.full(grid.shape, float(rho_bar))),
                      u=VectorField(grid, np.zeros((grid.n,) + grid.shape)))


GENERATORS = {
    'gaussian_drift': gaussian_drift,
    'colliding_bumps': colliding_bumps,
    'mhd_loop': mhd_loop,
    'magnetic_mode': magnetic_mode,
    'uniform': uniform,
}

MAGNETIC = frozenset(['mhd_loop', 'magnetic_mode'])


def initial_data(name, params, grid, **options):
    """
    Builds the named initial state.

    Parameters:
    - `name` - One of `GENERATORS`.
    - `params` - `ExponentParams` of the run.
    - `grid` - Target grid.
    - `**options` - Generator parameters (see each generator).
    """

    try:
        generator = GENERATORS[name]
    except KeyError:
        raise ParameterDomainError('unknown initial condition {!r}; choose from {}'.format(
            name, ', '.join(sorted(GENERATORS))))
    try:
        state = generator(params, grid, **options)
    except TypeError as err:
        raise ParameterDomainError('bad parameters for {}: {}'.format(name, err))
    logger.debug('Initial data %s built on %s', name, grid.cells)
    return state
