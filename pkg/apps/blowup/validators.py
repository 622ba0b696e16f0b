"""
Validation of JSON run configs.

Errors are collected per dotted path (`grid.cells`, `params.gamma`, ...) and
raised together as one `django.core.exceptions.ValidationError`.
"""

import inspect
import logging
import numbers
from dataclasses import dataclass

from django.core.exceptions import ValidationError

from .conf import DEFAULTS, blowup_setting
from .constitutive import ConstitutiveModel, NewtonianLaw, PowerLawModel, PressureLaw
from .grid_fields import MIN_CELLS, make_grid
from .initial_data import GENERATORS, MAGNETIC
from .inequality_lab import GradientChoice
from .solver import SimConfig
from .thresholds import ExponentParams

logger = logging.getLogger(__name__)

PURPOSES = ('simulate', 'certify', 'verify')

TOP_LEVEL_KEYS = frozenset([
    'grid', 'params', 'model', 't_end', 'initial_condition', 'cfl', 'rho_floor', 'support_margin',
    'support_threshold', 'output_every', 'snapshot_every', 'induction_only', 'hyperdiffusion',
    'vacuum_ratio', 'max_steps', 'tolerances', 'sigma', 'gradient_choice',
])
GRID_KEYS = frozenset(['n', 'cells', 'L'])
PARAM_KEYS = frozenset(['gamma', 'A', 'nu', 'q', 'eta'])
MODEL_KEYS = {
    'power_law': frozenset(['type', 'nu', 'q', 'eps_reg']),
    'newtonian': frozenset(['type', 'lambda', 'mu']),
}
# Coefficients a flat config may give next to `"model": "<type>"`.
FLAT_MODEL_KEYS = frozenset(['nu', 'q', 'eps_reg', 'lambda', 'mu', 'A', 'gamma', 'eta'])


@dataclass(frozen=True)
class ParsedConfig:
    """A validated `SimConfig` plus the options only the `verify` command reads."""

    sim: SimConfig
    sigma: float = None
    gradient_choice: GradientChoice = GradientChoice.SYMMETRIC

    @property
    def params(self):
        return self.sim.params

    @property
    def model(self):
        return self.sim.model

    @property
    def is_mhd(self):
        return self.sim.initial_condition['name'] in MAGNETIC


def _is_number(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def _is_integer(value):
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


class ConfigValidator(object):
    """
    Runs validations on a decoded run config.

    Functions:
    - `validate(self, data, purpose)` - Either raises `ValidationError` holding
    every problem found, or returns the `ParsedConfig` with defaults filled in.
    """

    def __init__(self):
        self.errors = {}

    def error(self, path, message):
        self.errors.setdefault(path, []).append(message)

    def unknown_keys(self, section, allowed, prefix):
        for key in sorted(set(section) - set(allowed)):
            self.error(prefix + key, 'unknown key {!r}'.format(key))

    def number(self, section, key, prefix, default=None, required=False, check=None, message=None):
        """Fetches a numeric entry, recording a path-addressed error when it is missing or invalid."""

        if key not in section or section[key] is None:
            if required:
                self.error(prefix + key, 'this field is required')
            return default
        value = section[key]
        if not _is_number(value):
            self.error(prefix + key, 'must be a number, got {!r}'.format(value))
            return default
        if check is not None and not check(value):
            self.error(prefix + key, message)
            return default
        return value

    def section(self, data, key, required=True):
        value = data.get(key)
        if value is None:
            if required:
                self.error(key, 'this field is required')
            return {}
        if not isinstance(value, dict):
            self.error(key, 'must be an object')
            return {}
        return value

    def flat_model(self, data):
        """
        Rewrites the flat form `{"model": "power_law", "nu": ..., "gamma": ...}`
        into the nested `params` / `model` sections. Other configs are returned as is.
        """

        kind = data.get('model')
        if not isinstance(kind, str):
            return data
        data = dict(data)
        params = data.get('params')
        if params is None:
            params = {}
        elif isinstance(params, dict):
            params = dict(params)
        model = {'type': kind}
        allowed = MODEL_KEYS.get(kind, frozenset())
        for key in sorted(FLAT_MODEL_KEYS & set(data)):
            value = data.pop(key)
            if key in PARAM_KEYS and isinstance(params, dict):
                if key in params and params[key] != value:
                    self.error(key, 'conflicts with params.{}'.format(key))
                params.setdefault(key, value)
            if key in allowed:
                model[key] = value
            elif key not in PARAM_KEYS:
                self.error(key, 'not a coefficient of a {!r} model'.format(kind))
        data['params'] = params
        data['model'] = model
        return data

    def validate(self, data, purpose='simulate'):
        """
        Validates `data` for one of the `PURPOSES`.

        Parameters:
        - `data` - Decoded JSON object.
        - `purpose` - `certify` additionally requires n >= 2 and q < n.

        Validations:
        - Unknown keys - Rejected at every level, initial-condition options included
        - Grid - n in 1..3; one cell count >= 8 per axis; L > 0
        - Params - gamma > 1; A > 0; nu > 0; q > 1; eta >= 0
        - Model - power_law or newtonian with valid coefficients, nested or flat
        - Run controls - t_end > 0; cfl in (0, 0.9]; support_margin in (0, 1); positive output_every
        - Magnetic runs - n = 3
        """

        if purpose not in PURPOSES:
            raise ValueError('purpose must be one of {}'.format(', '.join(PURPOSES)))
        self.errors = {}
        if not isinstance(data, dict):
            raise ValidationError({'__all__': ['config must be a JSON object']})
        data = self.flat_model(data)
        self.unknown_keys(data, TOP_LEVEL_KEYS, '')

        #-----------#
        #-- GRID: --#
        #-----------#
        grid_data = self.section(data, 'grid')
        self.unknown_keys(grid_data, GRID_KEYS, 'grid.')
        n = grid_data.get('n')
        if not _is_integer(n) or not 1 <= n <= 3:
            self.error('grid.n', 'must be 1, 2 or 3')
            n = None
        cells = grid_data.get('cells')
        if _is_integer(cells) and n is not None:
            cells = [cells] * n
        if not isinstance(cells, list) or not all(_is_integer(c) for c in cells):
            self.error('grid.cells', 'must be an integer or a list of integers')
            cells = None
        elif n is not None and len(cells) != n:
            self.error('grid.cells', 'needs {} entries, got {}'.format(n, len(cells)))
            cells = None
        elif any(c < MIN_CELLS for c in cells):
            self.error('grid.cells', 'every axis needs at least {} cells'.format(MIN_CELLS))
            cells = None
        L = self.number(grid_data, 'L', 'grid.', required=True, check=lambda v: v > 0,
                        message='L must be positive')

        #-------------#
        #-- PARAMS: --#
        #-------------#
        params_data = self.section(data, 'params')
        self.unknown_keys(params_data, PARAM_KEYS, 'params.')
        gamma = self.number(params_data, 'gamma', 'params.', required=True, check=lambda v: v > 1,
                            message='gamma must exceed 1')
        A = self.number(params_data, 'A', 'params.', 1.0, check=lambda v: v > 0, message='A must be positive')
        nu = self.number(params_data, 'nu', 'params.', 1.0, check=lambda v: v > 0, message='nu must be positive')
        q = self.number(params_data, 'q', 'params.', 2.0, check=lambda v: v > 1, message='q must exceed 1')
        eta = self.number(params_data, 'eta', 'params.', 0.0, check=lambda v: v >= 0,
                          message='eta must be nonnegative')

        # The Sobolev constant only exists below the dimension:
        if purpose == 'certify' and n is not None and q is not None:
            if n < 2:
                self.error('grid.n', 'certify needs n >= 2')
            elif not q < n:
                self.error('params.q', 'certify needs q < n = {} (Sobolev constant undefined)'.format(n))
        elif n is not None and q is not None and n >= 2 and not q < n:
            logger.warning('q = %s is not below n = %s: no theorem quantities for this config', q, n)

        #------------#
        #-- MODEL: --#
        #------------#
        model_data = self.section(data, 'model', required=False) or {'type': 'power_law'}
        kind = model_data.get('type', 'power_law')
        law = None
        if kind not in MODEL_KEYS:
            self.error('model.type', 'must be one of {}'.format(', '.join(sorted(MODEL_KEYS))))
        else:
            self.unknown_keys(model_data, MODEL_KEYS[kind], 'model.')
        if kind == 'power_law':
            law_nu = self.number(model_data, 'nu', 'model.', nu, check=lambda v: v > 0, message='nu must be positive')
            law_q = self.number(model_data, 'q', 'model.', q, check=lambda v: v > 1, message='q must exceed 1')
            default_eps = 0.0 if law_q is None or law_q >= 2 else blowup_setting('EPS_REG_SHEAR_THINNING')
            eps = self.number(model_data, 'eps_reg', 'model.', default_eps, check=lambda v: v >= 0,
                              message='eps_reg must be nonnegative')
            if None not in (law_nu, law_q, eps):
                law = PowerLawModel(nu=float(law_nu), q=float(law_q), eps_reg=float(eps))
        elif kind == 'newtonian':
            lam = self.number(model_data, 'lambda', 'model.', 0.0)
            mu = self.number(model_data, 'mu', 'model.', required=True, check=lambda v: v > 0,
                             message='mu must be positive')
            if q is not None and q != 2:
                self.error('params.q', 'a Newtonian model needs q = 2')
            if None not in (lam, mu, n) and not lam + 2.0 * mu / n > 0:
                self.error('model.lambda', 'lambda + (2/n) mu must be positive')
            elif None not in (lam, mu):
                law = NewtonianLaw(lam=float(lam), mu=float(mu))

        #------------------------#
        #-- INITIAL CONDITION: --#
        #------------------------#
        initial = self.section(data, 'initial_condition')
        name = initial.get('name')
        if initial and name not in GENERATORS:
            self.error('initial_condition.name', 'must be one of {}'.format(', '.join(sorted(GENERATORS))))
        elif initial:
            accepted = set(inspect.signature(GENERATORS[name]).parameters) - {'params', 'grid'}
            self.unknown_keys(initial, accepted | {'name'}, 'initial_condition.')
            if name in MAGNETIC and n is not None and n != 3:
                self.error('initial_condition.name', '{} needs n = 3'.format(name))

        #-------------------#
        #-- RUN CONTROLS: --#
        #-------------------#
        t_end = self.number(data, 't_end', '', required=True, check=lambda v: v > 0, message='t_end must be positive')
        cfl = self.number(data, 'cfl', '', blowup_setting('CFL'), check=lambda v: 0 < v <= 0.9,
                          message='cfl must lie in (0, 0.9]')
        margin = self.number(data, 'support_margin', '', blowup_setting('SUPPORT_MARGIN'),
                             check=lambda v: 0 < v < 1, message='support_margin must lie in (0, 1)')
        threshold = self.number(data, 'support_threshold', '', blowup_setting('SUPPORT_THRESHOLD'),
                                check=lambda v: 0 < v < 1, message='support_threshold must lie in (0, 1)')
        rho_floor = self.number(data, 'rho_floor', '', None, check=lambda v: v > 0,
                                message='rho_floor must be positive')
        vacuum = self.number(data, 'vacuum_ratio', '', blowup_setting('VACUUM_RATIO'),
                             check=lambda v: 0 <= v < 1, message='vacuum_ratio must lie in [0, 1)')
        hyper = self.number(data, 'hyperdiffusion', '', None, check=lambda v: v >= 0,
                            message='hyperdiffusion must be nonnegative')
        output_every = self.count(data, 'output_every', 10, minimum=1)
        snapshot_every = self.count(data, 'snapshot_every', 0, minimum=0)
        max_steps = self.count(data, 'max_steps', None, minimum=1)
        induction_only = data.get('induction_only', False)
        if not isinstance(induction_only, bool):
            self.error('induction_only', 'must be true or false')
        elif induction_only and name not in MAGNETIC:
            self.error('induction_only', 'needs a magnetic initial condition')

        tolerances = data.get('tolerances') or {}
        if not isinstance(tolerances, dict):
            self.error('tolerances', 'must be an object')
            tolerances = {}
        self.unknown_keys(tolerances, DEFAULTS['TOLERANCES'], 'tolerances.')
        for key in sorted(set(tolerances) & set(DEFAULTS['TOLERANCES'])):
            self.number(tolerances, key, 'tolerances.', check=lambda v: v > 0, message='tolerances must be positive')

        sigma = self.number(data, 'sigma', '', None, check=lambda v: v > 1, message='sigma must exceed 1')
        choice = data.get('gradient_choice', GradientChoice.SYMMETRIC.value)
        try:
            choice = GradientChoice(choice)
        except ValueError:
            self.error('gradient_choice', 'must be Full or Symmetric')

        if self.errors:
            for path, messages in sorted(self.errors.items()):
                logger.warning('Config error at %s: %s', path or '<root>', '; '.join(messages))
            raise ValidationError(self.errors)

        grid = make_grid(n, cells, float(L))
        params = ExponentParams(n=n, gamma=float(gamma), A=float(A), nu=float(nu), q=float(q), eta=float(eta))
        model = ConstitutiveModel(law=law, pressure=PressureLaw(A=float(A), gamma=float(gamma)))
        sim = SimConfig(
            grid=grid, model=model, params=params, t_end=float(t_end), initial_condition=dict(initial),
            cfl=float(cfl), rho_floor=None if rho_floor is None else float(rho_floor),
            support_margin=float(margin), support_threshold=float(threshold), output_every=output_every,
            snapshot_every=snapshot_every, induction_only=induction_only,
            hyperdiffusion=None if hyper is None else float(hyper), vacuum_ratio=float(vacuum),
            max_steps=max_steps, tolerances={k: float(v) for k, v in tolerances.items()},
        )
        return ParsedConfig(sim=sim, sigma=None if sigma is None else float(sigma), gradient_choice=choice)

    def count(self, data, key, default, minimum):
        value = data.get(key)
        if value is None:
            return default
        if not _is_integer(value) or value < minimum:
            self.error(key, 'must be an integer >= {}'.format(minimum))
            return default
        return int(value)


def serialize_config(sim):
    """Canonical dict of a `SimConfig`; `ConfigValidator().validate` inverts it."""

    law = sim.model.law
    if isinstance(law, NewtonianLaw):
        model = {'type': 'newtonian', 'lambda': law.lam, 'mu': law.mu}
    else:
        model = {'type': 'power_law', 'nu': law.nu, 'q': law.q, 'eps_reg': law.eps_reg}
    params = sim.params
    return {
        'grid': {'n': sim.grid.n, 'cells': list(sim.grid.cells), 'L': sim.grid.half_width},
        'params': {'gamma': params.gamma, 'A': params.A, 'nu': params.nu, 'q': params.q, 'eta': params.eta},
        'model': model,
        't_end': sim.t_end,
        'initial_condition': dict(sim.initial_condition),
        'cfl': sim.cfl,
        'rho_floor': sim.rho_floor,
        'support_margin': sim.support_margin,
        'support_threshold': sim.support_threshold,
        'output_every': sim.output_every,
        'snapshot_every': sim.snapshot_every,
        'induction_only': sim.induction_only,
        'hyperdiffusion': sim.hyperdiffusion,
        'vacuum_ratio': sim.vacuum_ratio,
        'max_steps': sim.max_steps,
        'tolerances': dict(sim.tolerances),
    }
