"""Access to the `BLOWUP` settings dict with built-in defaults filled in."""

from django.conf import settings

DEFAULTS = {
    'CFL': 0.4,
    'SUPPORT_MARGIN': 0.4,
    'SUPPORT_THRESHOLD': 1e-3,
    'RHO_FLOOR_RATIO': 1e-10,
    'VACUUM_RATIO': 1e-6,
    'EPS_REG_SHEAR_THINNING': 1e-2,
    'REPORT_SCHEMA_VERSION': 1,
    'TOLERANCES': {
        'sobolev': 0.05,
        'algebraic': 1e-10,
        'composite': 0.10,
        'coercivity': 1e-10,
        'eq12_relative': 0.05,
        'eq12_absolute': 1e-8,
        'energy_monotone': 1e-10,
        'drift': 1e-6,
        'certified_line': 0.10,
        'eq12_pass_fraction': 0.99,
    },
}


def blowup_setting(name):
    """
    Returns one entry of `settings.BLOWUP`, falling back to `DEFAULTS`.

    Parameters:
    - `name` - Key such as `'CFL'` or `'TOLERANCES'`.
    """

    configured = getattr(settings, 'BLOWUP', {})
    if name == 'TOLERANCES':
        merged = dict(DEFAULTS['TOLERANCES'])
        merged.update(configured.get('TOLERANCES', {}))
        return merged
    return configured.get(name, DEFAULTS[name])


def tolerance(name, overrides=None):
    """Looks up a tolerance, letting a run config's `tolerances` dict win."""

    if overrides and name in overrides:
        return float(overrides[name])
    return float(blowup_setting('TOLERANCES')[name])
