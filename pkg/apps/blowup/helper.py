"""Helper module for writing and reading run artifacts (series CSV, JSON files, manifests)."""

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from .exceptions import ParameterDomainError
from .grid_fields import EnergyBreakdown
from .solver import TimeSeries, Termination

logger = logging.getLogger(__name__)

AXES = ('x', 'y', 'z')
CSV_FORMAT = '%.17g'


@dataclass
class RunManifest:
    """
    What went into a run and what came out of it.

    Parameters:
    - `config` - Canonical config dict.
    - `version` - Toolkit version.
    - `config_hash` - Content hash of `config`.
    - `outputs` - Files written, relative to the output directory.
    - `duration` - Wall-clock seconds.
    - `disposition` - Run disposition, when known.
    """

    config: dict
    version: str
    config_hash: str
    outputs: list = field(default_factory=list)
    duration: float = 0.0
    disposition: str = None

    def to_dict(self):
        return asdict(self)


#-----------#
#-- JSON: --#
#-----------#

def canonical_json(data):
    """Key-sorted, whitespace-free JSON; NaN and infinities are refused."""

    return json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=True, allow_nan=False)


def config_hash(data):
    """
    Git-style blob SHA-1 of the canonical JSON of `data`, so the hash does not
    depend on key order.
    """

    payload = canonical_json(data).encode('utf-8')
    header = 'blob {}\0'.format(len(payload)).encode('ascii')
    return hashlib.sha1(header + payload).hexdigest()


def dump_json(data, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as handle:
        json.dump(data, handle, indent=2, sort_keys=True, allow_nan=False)
        handle.write('\n')
    logger.debug('Wrote %s', path)
    return path


def load_json(path):
    with open(path) as handle:
        return json.load(handle)


def write_manifest(manifest, directory):
    return dump_json(manifest.to_dict(), os.path.join(directory, 'manifest.json'))


#-----------------#
#-- SERIES CSV: --#
#-----------------#

def series_columns(n):
    return (['t', 'm'] + ['P' + AXES[i] for i in range(n)]
            + ['E_k', 'E_i', 'E_m', 'E_total', 'D_q', 'ohmic', 'support_radius', 'clamps'])


def write_series_csv(series, path):
    """
    Writes a `TimeSeries` with 17 significant digits per value, so re-reading
    it reproduces every float exactly.

    Parameters:
    - `series` - `TimeSeries`.
    - `path` - Target file.
    """

    rows = []
    for k, b in enumerate(series.breakdowns):
        rows.append([series.times[k], b.m] + list(b.P)
                    + [b.E_k, b.E_i, b.E_m, b.total, b.D_q, b.ohmic, series.support_radii[k], series.clamps[k]])
    # Metadata lines come first, the column names last:
    header = '\n'.join([
        'config_hash: {}'.format(series.config_hash or ''),
        'support_limit: {}'.format('' if series.support_limit is None else repr(float(series.support_limit))),
        'termination: {}'.format(series.termination),
        'exit_time: {}'.format('' if series.exit_time is None else repr(float(series.exit_time))),
        ','.join(series_columns(series.n)),
    ])
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    np.savetxt(path, np.array(rows, dtype=np.float64).reshape(len(rows), -1), fmt=CSV_FORMAT,
               delimiter=',', header=header, comments='# ')
    logger.debug('Wrote %d records to %s', len(rows), path)
    return path


def _optional_float(text):
    return float(text) if text else None


def read_series_csv(path):
    """Reads a file written by `write_series_csv` back into a `TimeSeries`."""

    meta = {}
    columns = None
    with open(path) as handle:
        for line in handle:
            if not line.startswith('#'):
                break
            body = line[1:].strip()
            if ': ' in body or body.endswith(':'):
                key, _, value = body.partition(':')
                meta[key.strip()] = value.strip()
            else:
                columns = body.split(',')
    if columns is None or columns[:2] != ['t', 'm']:
        raise ParameterDomainError('{} is not a series file (missing column header)'.format(path))
    n = len([c for c in columns if c.startswith('P')])
    if columns != series_columns(n):
        raise ParameterDomainError('{} has unexpected columns {}'.format(path, columns))

    data = np.loadtxt(path, delimiter=',', comments='#', ndmin=2)
    series = TimeSeries(
        n=n,
        config_hash=meta.get('config_hash') or None,
        support_limit=_optional_float(meta.get('support_limit')),
        termination=meta.get('termination') or Termination.COMPLETED,
        exit_time=_optional_float(meta.get('exit_time')),
    )
    for row in data:
        P = tuple(float(v) for v in row[2:2 + n])
        E_k, E_i, E_m, total, D_q, ohmic, radius, clamps = (float(v) for v in row[2 + n:])
        breakdown = EnergyBreakdown(m=float(row[1]), P=P, E_k=E_k, E_i=E_i, E_m=E_m, total=total,
                                    D_q=D_q, ohmic=ohmic)
        series.append(float(row[0]), breakdown, radius, int(clamps))
    return series
