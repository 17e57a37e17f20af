# MIT License

# Copyright (c) 2026 acvar developers

# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.

# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.



"""
Batch driver: acvar {verify,classify,functional,flow,probe} --config FILE
Exit codes: 0 pass, 1 computational failure, 2 usage or config error
Author: acvar developers
"""

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile

import numba

import acvar
from acvar.config import RunConfig, COMMANDS, SUITES
from acvar.core.exceptions import (ConfigError, IntegrationUnsupportedError, FlowDivergenceError, ProbePathError,
                                   ProjectionError, NotAlmostComplexError)
from acvar.core.variational import classify, functional_value, restrict_domain, flow, stability_probe
from acvar.verify import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

THREADS_ENV = 'ACVAR_NUM_THREADS'

_COMPUTATIONAL_ERRORS = (FlowDivergenceError, ProbePathError, ProjectionError, NotAlmostComplexError)


def _atomic_write_text(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix='.' + os.path.basename(path) + '.', suffix='.tmp', dir=directory)
    try:
        with os.fdopen(fd, 'w', newline='\n') as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _atomic_write_json(path, obj):
    _atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + '\n')


def _atomic_write_csv(path, header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    _atomic_write_text(path, buffer.getvalue())


def _output_path(config, name):
    return os.path.join(config['output.dir'], config['output.prefix'] + name)


def _provenance(config):
    return {
        'version': acvar.__version__,
        'command': config.command,
        'config': config.to_text(),
    }


def cmd_verify(config):
    checks = run_suite(config.suite, config)
    passed = all(check.passed for check in checks)
    report = {
        'suite': config.suite,
        'passed': passed,
        'checks': [check.to_dict() for check in checks],
        'provenance': _provenance(config),
    }
    path = _output_path(config, 'verify_{}.json'.format(config.suite))
    _atomic_write_json(path, report)
    failed = [check.name for check in checks if not check.passed]
    print('verify {}: {} of {} checks passed -> {}'.format(config.suite, len(checks) - len(failed), len(checks), path))
    for name in failed:
        print('  FAIL {}'.format(name))
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_classify(config):
    geom = config.build_geometry()
    A = config.build_structure(geom)
    report = classify(A, config.build_alpha(geom), tol_scale=config['tolerances.scale'])
    out = report.to_dict()
    out['provenance'] = _provenance(config)
    path = _output_path(config, 'classify.json')
    _atomic_write_json(path, out)
    print('classify: {} -> {}'.format(', '.join(name for name, ok in sorted(report.verdicts.items()) if ok) or 'none',
                                      path))
    return EXIT_OK


def _initial_field(config):
    geom = config.build_geometry()
    A = config.build_structure(geom)
    variant = config.build_variant(config.build_alpha(geom))
    return config.build_extension(A), variant


def cmd_functional(config):
    gamma, variant = _initial_field(config)
    gamma = restrict_domain(gamma, variant, tol=config['tolerances.projection'])
    value = functional_value(gamma, variant)
    record = {
        'variant': variant.label,
        'value': value,
        'geometry': gamma.geometry.name,
        'nodes': gamma.geometry.num_nodes,
        'provenance': _provenance(config),
    }
    path = _output_path(config, 'functional.json')
    _atomic_write_json(path, record)
    print('functional {} = {!r} -> {}'.format(variant.label, value, path))
    return EXIT_OK


def cmd_flow(config):
    gamma, variant = _initial_field(config)
    steps = config['flow.steps']
    path = _output_path(config, 'flow.csv')
    header = ('step', 'functional', 'gradient_norm', 'sup_norm')
    if steps == 0:
        _atomic_write_csv(path, header, [])
        print('flow: no steps -> {}'.format(path))
        return EXIT_OK
    trace = flow(gamma, variant, config['flow.dt'], steps)
    rows = [(state.step, float(state.value), float(state.residual), float(state.field.sup_norm())) for state in trace]
    _atomic_write_csv(path, header, rows)
    print('flow {}: {} steps, functional {!r} -> {!r} -> {}'.format(variant.label, steps, trace[0].value,
                                                                    trace[-1].value, path))
    return EXIT_OK


def cmd_probe(config):
    geom = config.build_geometry()
    variant = config.build_variant(config.build_alpha(geom))
    table = stability_probe(config.build_path(geom), variant, config['probe.t'],
                            extension=config['structure.extension'], seed=config['structure.seed'],
                            scale=config['structure.extension_scale'], ac_tol=config['tolerances.ac'])
    path = _output_path(config, 'probe.csv')
    _atomic_write_csv(path, ('t', 'functional', 'derivative'), table.rows())
    _atomic_write_json(_output_path(config, 'probe.json'), {
        'variant': variant.label,
        'path': config['probe.path'],
        'trend': table.trend,
        'nonnegative_tail': bool(table.nonnegative_tail),
        'provenance': _provenance(config),
    })
    print('probe {} along {}: tail trend {} -> {}'.format(variant.label, config['probe.path'], table.trend, path))
    return EXIT_OK


_HANDLERS = {
    'verify': cmd_verify,
    'classify': cmd_classify,
    'functional': cmd_functional,
    'flow': cmd_flow,
    'probe': cmd_probe,
}


def build_parser():
    parser = argparse.ArgumentParser(prog='acvar', description='Bundle-valued forms and almost-complex structures.')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='More log output, repeat for debug.')
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True
    for command in COMMANDS:
        p = sub.add_parser(command, help='Run {}.'.format(command))
        p.add_argument('--config', type=str, required=True, help='Path to the YAML or JSON run config.')
        if command == 'verify':
            p.add_argument('--suite', type=str, required=True, choices=SUITES, help='Verification suite to run.')
    return parser


def _configure_threads():
    text = os.environ.get(THREADS_ENV)
    if not text:
        return
    try:
        numba.set_num_threads(int(text))
    except ValueError as ex:
        raise ConfigError('invalid {}={!r}: {}'.format(THREADS_ENV, text, ex))


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return EXIT_OK if ex.code == 0 else EXIT_USAGE
    logging.basicConfig(level=max(logging.DEBUG, logging.WARNING - 10*args.verbose),
                        format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    try:
        _configure_threads()
        config = RunConfig.from_file(args.config, args.command, getattr(args, 'suite', None))
    except (ConfigError, IntegrationUnsupportedError) as ex:
        print('acvar: error: {}'.format(ex), file=sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[args.command](config)
    except _COMPUTATIONAL_ERRORS as ex:
        print('acvar: {} failed: {}'.format(args.command, ex), file=sys.stderr)
        return EXIT_FAILURE
    except (ConfigError, IntegrationUnsupportedError) as ex:
        print('acvar: error: {}'.format(ex), file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
