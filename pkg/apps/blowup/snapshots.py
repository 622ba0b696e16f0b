"""
Field snapshot files.

Each snapshot is a pair: `<name>.json` holds the header
`{n, cells, L, components, time, field, dtype, order}` and `<name>.bin` holds
the raw little-endian float64 values, axis-major and component-minor (the
first grid axis varies slowest, the component index fastest).
"""

import json
import logging
import os

import numpy as np

from .grid_fields import Grid, ScalarField, VectorField
from .exceptions import GridMismatchError

logger = logging.getLogger(__name__)

DTYPE = '<f8'
ORDER = 'axis-major, component-minor'


def write_snapshot(field, directory, name, time):
    """
    Writes one field and returns the two file names.

    Parameters:
    - `field` - `ScalarField` or `VectorField`.
    - `directory` - Output directory (created when missing).
    - `name` - Base name, e.g. `rho_000040`.
    - `time` - Physical time of the field.
    """

    os.makedirs(directory, exist_ok=True)
    grid = field.grid
    if isinstance(field, VectorField):
        components = grid.n
        # Move components behind the cell axes so they vary fastest:
        data = np.moveaxis(field.values, 0, -1)
    else:
        components = 1
        data = field.values
    header = {
        'n': grid.n,
        'cells': list(grid.cells),
        'L': grid.half_width,
        'components': components,
        'time': time,
        'field': name.split('_')[0],
        'dtype': DTYPE,
        'order': ORDER,
    }
    header_path = os.path.join(directory, name + '.json')
    data_path = os.path.join(directory, name + '.bin')
    with open(header_path, 'w') as handle:
        json.dump(header, handle, indent=2, sort_keys=True)
    np.ascontiguousarray(data, dtype=DTYPE).tofile(data_path)
    logger.debug('Snapshot %s written at t=%.6g', name, time)
    return [header_path, data_path]


def read_snapshot(directory, name):
    """Reads a snapshot back; returns `(field, time)`."""

    with open(os.path.join(directory, name + '.json')) as handle:
        header = json.load(handle)
    grid = Grid(n=header['n'], cells=tuple(header['cells']), half_width=header['L'])
    flat = np.fromfile(os.path.join(directory, name + '.bin'), dtype=header['dtype'])
    components = header['components']
    if flat.size != int(np.prod(grid.shape)) * components:
        raise GridMismatchError('snapshot {} holds {} values, header promises {}'.format(
            name, flat.size, int(np.prod(grid.shape)) * components))
    if components == 1:
        return ScalarField(grid, flat.reshape(grid.shape).astype(np.float64)), header['time']
    values = np.moveaxis(flat.reshape(grid.shape + (components,)), -1, 0).astype(np.float64)
    return VectorField(grid, values), header['time']
