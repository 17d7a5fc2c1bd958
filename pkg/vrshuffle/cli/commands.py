#!/usr/bin/env python
"""
Implementations of the vr subcommands.

Each cmd_* function takes the parsed arguments, the VRConfig and a
DebugTimer, and returns a Report (or None when it wrote its own output).
"""
import math
import logging

import numpy as np

from ..errors import ParameterError
from ..params import (VariationRatioParams, AsymmetricParams, MechanismSpec,
                      CATALOG, catalog, with_users, derive_variation_ratio,
                      derive_lower_params)
from ..bounds import (BoundRequest, upper_bound, upper_bound_batch, lower_bound,
                      oracle_bound, analytic_bound, asymptotic_bound,
                      amplification_ratio)
from ..accountant import CompositionPlan, compose_params
from .output import Report, write_report

logger = logging.getLogger(__name__)

MECHANISM_ARGS = sorted({a for row in CATALOG.values() for a in row.args})


def _arg_pairs(pairs):
    "--arg name=value entries as a dict of floats"
    out = {}
    for pair in pairs or []:
        name, sep, val = pair.partition('=')
        if not sep or not name:
            raise ParameterError(f"--arg expects name=value, got '{pair}'")
        try:
            out[name.strip()] = float(val)
        except ValueError:
            raise ParameterError(f"--arg {name}: '{val}' is not a number")
    return out


def mechanism_kws(args):
    """catalog arguments given on the command line"""
    kws = {}
    for name in MECHANISM_ARGS:
        val = getattr(args, f'mech_{name}', None)
        if val is not None:
            kws[name] = val
    kws.update(_arg_pairs(getattr(args, 'arg', None)))
    return kws


def _mechanism(args):
    return getattr(args, 'mechanism', None)


def _raw_given(args):
    return any(getattr(args, a, None) is not None for a in ('p', 'beta', 'q', 'q0', 'q1'))


def _sources(args):
    given = []
    if _mechanism(args) is not None:
        given.append('--mechanism')
    if _raw_given(args):
        given.append('--p/--beta/--q')
    if getattr(args, 'matrix_file', None) is not None:
        given.append('--matrix-file')
    if len(given) > 1:
        raise ParameterError(f"conflicting parameter sources: {' and '.join(given)}")
    if len(given) == 0:
        raise ParameterError("give --mechanism, --p/--beta/--q or --matrix-file")
    if _mechanism(args) is None and mechanism_kws(args):
        raise ParameterError("mechanism arguments need --mechanism")
    return given[0]


def _apply_users(params, args):
    n, n_blanket = getattr(args, 'n', None), getattr(args, 'n_blanket', None)
    if n is not None and n_blanket is not None:
        raise ParameterError("give either --n or --n-blanket, not both")
    if n_blanket is not None:
        return params.with_blanket(n_blanket)
    if n is not None:
        return with_users(params, n, messages=getattr(args, 'messages', None))
    return params


def _require_raw(args, names):
    missing = [f'--{a}' for a in names if getattr(args, a, None) is None]
    if missing:
        raise ParameterError(f"missing {', '.join(missing)}")


def resolve_params(args, asymmetric=False):
    """VariationRatioParams (or AsymmetricParams when asymmetric is allowed)
    from exactly one of: catalog mechanism, raw values, matrix file"""
    source = _sources(args)
    if source == '--mechanism':
        n, n_blanket = getattr(args, 'n', None), getattr(args, 'n_blanket', None)
        if n is not None and n_blanket is not None:
            raise ParameterError("give either --n or --n-blanket, not both")
        params = catalog(_mechanism(args), n=n, messages=getattr(args, 'messages', None),
                         **mechanism_kws(args))
        if n_blanket is not None:
            params = params.with_blanket(n_blanket)
        return params

    if source == '--matrix-file':
        spec = MechanismSpec.from_file(args.matrix_file)
        if asymmetric:
            if spec.matrix.shape[0] < 2:
                raise ParameterError("the lower bound needs a matrix with at least 2 rows")
            params = derive_lower_params(spec.matrix[0], spec.matrix[1], spec.blankets)
        else:
            params = derive_variation_ratio(spec)
        return _apply_users(params, args)

    has_q01 = getattr(args, 'q0', None) is not None or getattr(args, 'q1', None) is not None
    if has_q01:
        if not asymmetric:
            raise ParameterError("--q0/--q1 are only accepted by lower and oracle")
        if getattr(args, 'q', None) is not None:
            raise ParameterError("give either --q or --q0/--q1, not both")
        _require_raw(args, ('p', 'beta', 'q0', 'q1'))
        params = AsymmetricParams(args.p, args.beta, args.q0, args.q1)
    else:
        _require_raw(args, ('p', 'beta', 'q'))
        params = VariationRatioParams(args.p, args.beta, args.q)
    return _apply_users(params, args)


def _symmetric(args):
    params = resolve_params(args)
    if not isinstance(params, VariationRatioParams):
        raise ParameterError("this command needs symmetric (p, beta, q) parameters")
    return params


def _param_fields(params):
    fields = {'p': float(params.p), 'beta': float(params.beta)}
    if isinstance(params, AsymmetricParams):
        fields.update({'q0': float(params.q0), 'q1': float(params.q1),
                       'r0': float(params.r0), 'r1': float(params.r1)})
    else:
        fields.update({'q': float(params.q), 'r': float(params.r)})
    fields.update({'alpha': float(params.alpha), 'n_blanket': int(params.n_blanket)})
    if params.degenerate:
        fields['degenerate'] = True
    return fields


def _iters(args, conf, section=None):
    if getattr(args, 'iters', None) is not None:
        return args.iters
    if section is not None:
        return int(conf.section(section).get('iters', conf.config['iters']))
    return int(conf.config['iters'])


def _single_delta(args):
    deltas = getattr(args, 'delta', None)
    if not deltas:
        raise ParameterError("--delta is required")
    if len(deltas) > 1:
        raise ParameterError("this command takes a single --delta")
    return deltas[0]


BOUND_COLUMNS = ['delta', 'eps', 'eps_low', 'eps_high', 'resolution', 'evaluations']


def _bound_row(delta, res):
    return [float(delta), float(res.eps), float(res.eps_low), float(res.eps_high),
            float(res.resolution), int(res.evaluations)]


def _bound_report(title, params, deltas, results, kind):
    fields = _param_fields(params)
    fields['kind'] = kind
    if len(results) == 1:
        fields.update(zip(BOUND_COLUMNS, _bound_row(deltas[0], results[0])))
        return Report(title, fields)
    rows = [_bound_row(d, r) for d, r in zip(deltas, results)]
    return Report(title, fields, BOUND_COLUMNS, rows)


def cmd_params(args, conf, timer):
    if args.list:
        rows = [[name, ' '.join(row.args) or '-',
                 'multi' if row.multi_message else 'single', row.description]
                for name, row in CATALOG.items()]
        return Report('params', columns=['mechanism', 'arguments', 'messages',
                                         'description'], rows=rows)
    if args.mechanism_pos is not None:
        if args.mechanism is not None and args.mechanism != args.mechanism_pos:
            raise ParameterError("mechanism given twice with different values")
        args.mechanism = args.mechanism_pos
    params = _symmetric(args)
    timer.add('params')
    fields = {}
    if args.mechanism is not None:
        fields['mechanism'] = args.mechanism
    fields.update(_param_fields(params))
    return Report('params', fields)


def cmd_upper(args, conf, timer):
    params = _symmetric(args)
    deltas = args.delta or []
    if len(deltas) == 0:
        raise ParameterError("--delta is required")
    timer.add('params')
    options = conf.divergence_options()
    results = upper_bound_batch(params, deltas, iters=_iters(args, conf), options=options)
    timer.add('search')
    logger.info("upper: %d target(s), %d evaluations", len(results),
                sum(r.evaluations for r in results))
    return _bound_report('upper', params, deltas, results, 'upper')


def cmd_lower(args, conf, timer):
    params = resolve_params(args, asymmetric=True)
    delta = _single_delta(args)
    timer.add('params')
    res = lower_bound(BoundRequest(params, delta, _iters(args, conf)), mode=args.mode,
                      options=conf.divergence_options())
    timer.add('search')
    return _bound_report('lower', params, [delta], [res], args.mode)


def cmd_oracle(args, conf, timer):
    params = resolve_params(args, asymmetric=True)
    delta = _single_delta(args)
    max_n = args.max_n if args.max_n is not None else int(conf.config['oracle_max_n'])
    timer.add('params')
    res = oracle_bound(BoundRequest(params, delta, _iters(args, conf)), max_n=max_n)
    timer.add('search')
    return _bound_report('oracle', params, [delta], [res], 'upper')


def cmd_closed_form(args, conf, timer):
    params = _symmetric(args)
    delta = _single_delta(args)
    func = analytic_bound if args.form == 'analytic' else asymptotic_bound
    res = func(params, delta)
    timer.add(args.form)
    fields = _param_fields(params)
    fields.update({'form': args.form, 'delta': float(delta)})
    if res.holds:
        fields['eps'] = float(res.eps)
    else:
        fields['eps'] = None
        fields['status'] = f"precondition failed: {res.failed}"
    return Report('closed-form', fields)


def _composition_plan(args, conf):
    section = conf.section('compose')

    def pick(flag, key):
        val = getattr(args, flag, None)
        return section.get(key) if val is None else val

    gamma = args.gamma
    return CompositionPlan(K=args.k, eps_error=float(pick('eps_error', 'eps_error')),
                           delta_error=float(pick('delta_error', 'delta_error')),
                           gamma=gamma, homogeneous=not args.generic,
                           mesh=args.mesh, eps_upper=args.eps_upper,
                           points=int(pick('points', 'points')))


def cmd_compose(args, conf, timer):
    params = _symmetric(args)
    plan = _composition_plan(args, conf)
    timer.add('params')
    result = compose_params([params], plan, options=conf.divergence_options())
    timer.add('compose')
    fields = _param_fields(params)
    fields.update({'k': int(plan.K), 'mesh': float(result.forward.mesh),
                   'gamma': 1.0 if plan.gamma is None else float(plan.gamma),
                   'delta_error': float(plan.delta_error)})
    if args.target_delta is not None:
        fields['target_delta'] = float(args.target_delta)
        fields['eps'] = float(result.epsilon(args.target_delta))
        return Report('compose', fields)
    rows = [[e, f, b] for e, f, b in result.curve.rows()]
    return Report('compose', fields, ['eps', 'delta_forward', 'delta_backward'], rows)


def parse_range(text, integer=False, log=False):
    """'a:b:steps' as a list of values"""
    parts = text.split(':')
    if len(parts) != 3:
        raise ParameterError(f"range must be a:b:steps, got '{text}'")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParameterError(f"range must be a:b:steps, got '{text}'")
    if steps < 1:
        raise ParameterError(f"range needs at least 1 step, got {steps}")
    if steps == 1 and start != stop:
        raise ParameterError("a range with 1 step needs a == b")
    if log:
        if start <= 0 or stop <= 0:
            raise ParameterError("a log range needs positive end points")
        vals = np.geomspace(start, stop, steps)
    else:
        vals = np.linspace(start, stop, steps)
    if integer:
        return [int(round(v)) for v in vals]
    return [float(v) for v in vals]


SWEEP_COLUMNS = ['param', 'eps_numeric', 'eps_analytic', 'eps_asymptotic',
                 'amplification_ratio', 'log2_ratio']


def _sweep_params(args, value):
    """params for one sweep point, and the local budget eps0"""
    sweep_args = replace_namespace(args)
    if args.vary == 'n':
        sweep_args.n = value
    if args.vary == 'eps0':
        if _mechanism(args) is None:
            raise ParameterError("--vary eps0 needs --mechanism")
        sweep_args.mech_eps0 = value
    if args.vary == 'beta':
        if _mechanism(args) is not None or not _raw_given(args):
            raise ParameterError("--vary beta needs raw --p/--beta/--q parameters")
        sweep_args.beta = value
    params = _symmetric(sweep_args)
    eps0 = mechanism_kws(sweep_args).get('eps0', None)
    if eps0 is None:
        eps0 = math.log(params.p) if params.finite else math.inf
    return params, eps0


def replace_namespace(args):
    "shallow copy of an argparse Namespace"
    return type(args)(**vars(args))


def _log2(val):
    if math.isnan(val) or val <= 0:
        return math.nan
    return math.log2(val)


def cmd_sweep(args, conf, timer):
    values = parse_range(args.range, integer=(args.vary == 'n'), log=args.log)
    iters = _iters(args, conf, section='sweep')
    options = conf.divergence_options()
    deltas = args.delta or []
    if len(deltas) > 1:
        raise ParameterError("sweep takes a single --delta")
    rows = []
    for value in values:
        params, eps0 = _sweep_params(args, value)
        delta = deltas[0] if deltas else 0.01/params.n_users
        eps = upper_bound(BoundRequest(params, delta, iters), options).eps
        analytic = analytic_bound(params, delta).eps
        asymptotic = asymptotic_bound(params, delta).eps
        ratio = amplification_ratio(eps0, eps)
        rows.append([value, float(eps), analytic, asymptotic, float(ratio), _log2(ratio)])
        logger.info("sweep %s=%g: eps=%.6g", args.vary, value, eps)
    timer.add('sweep')
    report = Report('sweep', {'vary': args.vary}, SWEEP_COLUMNS, rows)
    if args.out is not None:
        write_report(report, 'csv', out=args.out)
        print(f"wrote {len(rows)} rows to {args.out}")
        return None
    return report


COMMANDS = {'params': cmd_params, 'upper': cmd_upper, 'lower': cmd_lower,
            'closed-form': cmd_closed_form, 'compose': cmd_compose,
            'sweep': cmd_sweep, 'oracle': cmd_oracle}
