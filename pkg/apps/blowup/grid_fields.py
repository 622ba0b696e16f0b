"""
Uniform periodic grids, discrete fields, central-difference operators and the
integral functionals (mass, momentum, energies, q-dissipation).

Layout: a scalar field is an array of shape `cells`; a vector field has shape
`(n,) + cells`; a tensor field `(n, n) + cells` with entry `[i, j]` holding the
(i, j) component. The whole space is replaced by the periodic box [−L, L)^n.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import GridMismatchError, ParameterDomainError

logger = logging.getLogger(__name__)

MIN_CELLS = 8


@dataclass(frozen=True)
class Grid:
    """
    Cell-centred periodic grid on [−L, L)^n.

    Parameters:
    - `n` - Dimension, 1 to 3.
    - `cells` - Cells per axis (tuple of n integers, each >= 8).
    - `half_width` - L.
    """

    n: int
    cells: tuple
    half_width: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ParameterDomainError('grid dimension must be 1, 2 or 3, got {}'.format(self.n))
        if len(self.cells) != self.n:
            raise ParameterDomainError('need {} cell counts, got {}'.format(self.n, len(self.cells)))
        if any(int(c) != c or c < MIN_CELLS for c in self.cells):
            raise ParameterDomainError('every axis needs at least {} cells, got {}'.format(MIN_CELLS, self.cells))
        if not self.half_width > 0:
            raise ParameterDomainError('half width must be positive, got {}'.format(self.half_width))

    @property
    def spacing(self):
        return tuple(2.0 * self.half_width / c for c in self.cells)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def volume(self):
        return (2.0 * self.half_width) ** self.n

    @property
    def shape(self):
        return tuple(self.cells)

    def axis_points(self, axis):
        h = self.spacing[axis]
        return -self.half_width + (np.arange(self.cells[axis]) + 0.5) * h

    def coordinates(self):
        """Cell-centre coordinates as an array of shape `(n,) + cells`."""

        return np.array(np.meshgrid(*[self.axis_points(a) for a in range(self.n)], indexing='ij'))

    def radius(self):
        return np.sqrt(np.sum(self.coordinates() ** 2, axis=0))


@dataclass(frozen=True)
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        _check_shape(self.grid, self.values, ())


@dataclass(frozen=True)
class VectorField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        _check_shape(self.grid, self.values, (self.grid.n,))

    def magnitude(self):
        return np.sqrt(np.sum(self.values ** 2, axis=0))


@dataclass(frozen=True)
class TensorField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        _check_shape(self.grid, self.values, (self.grid.n, self.grid.n))

    def is_symmetric(self, tol=1e-12):
        return bool(np.all(np.abs(self.values - np.swapaxes(self.values, 0, 1)) <= tol))


def _check_shape(grid, values, components):
    expected = components + grid.shape
    if np.shape(values) != expected:
        raise GridMismatchError('field values have shape {}, expected {}'.format(np.shape(values), expected))


@dataclass(frozen=True)
class FluidState:
    """
    Density, velocity and (optionally) magnetic field at one time.

    Parameters:
    - `rho` - `ScalarField`, nonnegative.
    - `u` - `VectorField`.
    - `H` - `VectorField` or `None`.
    - `time` - Physical time.
    """

    rho: ScalarField
    u: VectorField
    H: VectorField = None
    time: float = 0.0

    def __post_init__(self):
        if self.u.grid != self.rho.grid or (self.H is not None and self.H.grid != self.rho.grid):
            raise GridMismatchError('state fields live on different grids')
        if np.any(self.rho.values < 0):
            raise ParameterDomainError('density must be nonnegative')

    @property
    def grid(self):
        return self.rho.grid

    def with_fields(self, rho=None, u=None, H=None, time=None):
        return FluidState(
            rho=self.rho if rho is None else rho,
            u=self.u if u is None else u,
            H=self.H if H is None else H,
            time=self.time if time is None else time,
        )


@dataclass(frozen=True)
class EnergyBreakdown:
    """
    Integral functionals at one time. `ohmic` is ∫|curl H|², 0 without a field.
    """

    m: float
    P: tuple
    E_k: float
    E_i: float
    E_m: float
    total: float
    D_q: float
    ohmic: float = 0.0

    @property
    def momentum_norm(self):
        return float(np.linalg.norm(self.P))


#-----------------------#
#-- GRID AND SAMPLES: --#
#-----------------------#

def make_grid(n, cells, L):
    """Builds a `Grid`; `cells` may be one integer shared by every axis."""

    if np.isscalar(cells):
        cells = (int(cells),) * n
    return Grid(n=int(n), cells=tuple(int(c) for c in cells), half_width=float(L))


def sample(grid, f, components=None):
    """
    Samples `f(x)` at the cell centres.

    Parameters:
    - `grid` - Target grid.
    - `f` - Callable receiving the `(n,) + cells` coordinate array and
      returning an array of shape `cells` (scalar) or `(n,) + cells` (vector).
    - `components` - Force the field kind (`'scalar'` or `'vector'`); inferred
      from the returned shape when omitted.
    """

    values = np.asarray(f(grid.coordinates()), dtype=np.float64)
    values = np.broadcast_to(values, values.shape if values.ndim > grid.n else grid.shape).copy()
    if not np.all(np.isfinite(values)):
        raise ParameterDomainError('sampled function is not finite on the box')
    if components == 'vector' or (components is None and values.shape == (grid.n,) + grid.shape):
        return VectorField(grid, values)
    return ScalarField(grid, values)


def zeros_scalar(grid):
    return ScalarField(grid, np.zeros(grid.shape))


def zeros_vector(grid):
    return VectorField(grid, np.zeros((grid.n,) + grid.shape))


def integrate(values, grid):
    """∫ values dx by pairwise summation in fixed (C) cell order."""

    flat = np.ascontiguousarray(values, dtype=np.float64).ravel()
    return float(np.add.reduce(flat)) * grid.cell_volume


#-----------------------------#
#-- DIFFERENTIAL OPERATORS: --#
#-----------------------------#

def partial(values, grid, axis):
    """Second-order central difference along `axis` with periodic wrap."""

    h = grid.spacing[axis]
    return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2.0 * h)


def gradient(field):
    """Scalar → vector ∂_j f; vector → tensor G[i, j] = ∂_j u_i."""

    grid = field.grid
    v = field.values
    if isinstance(field, ScalarField):
        return VectorField(grid, np.array([partial(v, grid, j) for j in range(grid.n)]))
    if isinstance(field, VectorField):
        G = np.empty((grid.n, grid.n) + grid.shape)
        for i in range(grid.n):
            for j in range(grid.n):
                G[i, j] = partial(v[i], grid, j)
        return TensorField(grid, G)
    raise GridMismatchError('gradient takes a scalar or vector field')


def divergence(field):
    """Vector → scalar Σ_j ∂_j v_j; tensor → vector (Div T)_i = Σ_j ∂_j T_ij."""

    grid = field.grid
    v = field.values
    if isinstance(field, VectorField):
        return ScalarField(grid, sum(partial(v[j], grid, j) for j in range(grid.n)))
    if isinstance(field, TensorField):
        return VectorField(grid, np.array([
            sum(partial(v[i, j], grid, j) for j in range(grid.n)) for i in range(grid.n)
        ]))
    raise GridMismatchError('divergence takes a vector or tensor field')


def curl(field):
    """Curl of a three-dimensional vector field."""

    grid = field.grid
    if grid.n != 3 or not isinstance(field, VectorField):
        raise GridMismatchError('curl is defined for vector fields with n = 3, got n = {}'.format(grid.n))
    v = field.values
    d = lambda comp, axis: partial(v[comp], grid, axis)
    return VectorField(grid, np.array([
        d(2, 1) - d(1, 2),
        d(0, 2) - d(2, 0),
        d(1, 0) - d(0, 1),
    ]))


def laplacian(field):
    """div∘grad per component (wide central stencil, consistent with `partial`)."""

    grid = field.grid
    v = field.values
    lead = v.ndim - grid.n
    out = np.zeros_like(v)
    for j in range(grid.n):
        ax = j + lead
        h = grid.spacing[j]
        out += (np.roll(v, -2, axis=ax) - 2.0 * v + np.roll(v, 2, axis=ax)) / (4.0 * h * h)
    return type(field)(grid, out)


def shear_rate(u):
    """𝔻 = (∇u + ∇uᵀ)/2."""

    G = gradient(u).values
    return TensorField(u.grid, 0.5 * (G + np.swapaxes(G, 0, 1)))


def cross(a, b):
    """Cell-wise cross product of two 3-vectors stored component-first."""

    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


#----------------------------#
#-- NORMS AND FUNCTIONALS: --#
#----------------------------#

def tensor_magnitude(T):
    """|T| = sqrt(T:T) cell-wise (Frobenius)."""

    return ScalarField(T.grid, np.sqrt(np.sum(T.values ** 2, axis=(0, 1))))


def pointwise_magnitude(field):
    if isinstance(field, ScalarField):
        return np.abs(field.values)
    if isinstance(field, VectorField):
        return field.magnitude()
    return tensor_magnitude(field).values


def lp_norm(field, p):
    """(∫ |value|^p dx)^(1/p), with |·| Euclidean for vectors and Frobenius for tensors."""

    if not p >= 1:
        raise ParameterDomainError('p must be at least 1, got {}'.format(p))
    return integrate(pointwise_magnitude(field) ** p, field.grid) ** (1.0 / p)


def functionals(state, params):
    """
    Mass, momentum, kinetic/internal/magnetic energy and q-dissipation of a state.

    Parameters:
    - `state` - `FluidState`.
    - `params` - `ExponentParams` (uses `gamma`, `A`, `q`).
    """

    grid = state.grid
    rho = state.rho.values
    u = state.u.values
    m = integrate(rho, grid)
    P = tuple(integrate(rho * u[i], grid) for i in range(grid.n))
    E_k = integrate(0.5 * rho * np.sum(u ** 2, axis=0), grid)
    E_i = integrate(params.A * rho ** params.gamma / (params.gamma - 1.0), grid)
    if state.H is not None:
        E_m = integrate(0.5 * np.sum(state.H.values ** 2, axis=0), grid)
        ohmic = integrate(np.sum(curl(state.H).values ** 2, axis=0), grid) if grid.n == 3 else 0.0
    else:
        E_m = ohmic = 0.0
    # Symmetric part only: rotation dissipates nothing
    D_q = integrate(tensor_magnitude(shear_rate(state.u)).values ** params.q, grid)
    return EnergyBreakdown(
        m=m, P=P, E_k=E_k, E_i=E_i, E_m=E_m, total=E_k + E_i + E_m, D_q=D_q, ohmic=ohmic)


def support_radius(state, threshold):
    """
    Radius of the smallest origin-centred ball holding every cell where ρ, |u|
    or |H| exceeds `threshold` times its maximum.
    """

    if not threshold > 0:
        raise ParameterDomainError('threshold must be positive, got {}'.format(threshold))
    mask = np.zeros(state.grid.shape, dtype=bool)
    magnitudes = [state.rho.values, state.u.magnitude()]
    if state.H is not None:
        magnitudes.append(state.H.magnitude())
    for mag in magnitudes:
        peak = np.max(mag)
        if peak > 0:
            mask |= mag > threshold * peak
    if not mask.any():
        return 0.0
    return float(np.max(state.grid.radius()[mask]))


def divergence_residual(H):
    """max |div H| relative to max |H| (0 for a zero field)."""

    peak = np.max(H.magnitude())
    if peak == 0:
        return 0.0
    return float(np.max(np.abs(divergence(H).values)) / peak)
