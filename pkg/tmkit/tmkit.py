import sys
import logging
import argparse
from pathlib import Path

import plaster

# local imports
from .core import objectify
from .diagnostics import Diagnostic, PathError, ProfileError, UnknownEvent
from .dsl import parse, serialize
from .events import occurrences, derive_behavior, check_behavior, format_occurrences, format_behavior
from .events import format_violations
from .export import export_dot, export_trace_json
from .models import StaticModel
from .params import Corpus
from .settings import settings, SETTINGS_SECTION
from .sim import simulate, trace_diagnostics
from .validate import RuleProfile, Strictness, default_rule_profile, load_rule_profile, validate

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERRORS = 1
EXIT_USAGE = 2


class CommandFailure(Exception):
    """Command cannot run: unreadable input or an unknown name"""
    def __init__(self, message: str, status: int = EXIT_USAGE):
        super().__init__(message)
        self.status = status


def print_diagnostics(diagnostics: list[Diagnostic] | tuple[Diagnostic, ...]):
    for x in diagnostics:
        print(x, file=sys.stderr)


def read_text(filename: str) -> str:
    try:
        return Path(filename).read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise CommandFailure(f'cannot read {filename}: {e}') from e


def load_model(filename: str) -> StaticModel | None:
    """Parse a model file; diagnostics go to standard error and None is returned on errors"""
    result = parse(read_text(filename), filename)
    print_diagnostics(result.diagnostics)
    if not result.ok:
        log.info(f'{filename}: {len(result.diagnostics)} diagnostics, model rejected')
    return result.model


def resolve_profile(name: str | None) -> RuleProfile:
    """Built-in profile by name, or a profile file; the configured default if no name given"""
    name = name or settings.default_profile
    if name in (x.value for x in Strictness):
        return default_rule_profile(Strictness(name))
    try:
        return load_rule_profile(read_text(name), name)
    except ProfileError as e:
        print_diagnostics(e.diagnostics)
        raise CommandFailure(f'invalid rule profile {name}') from e


def cmd_check(args) -> int:
    profile = resolve_profile(args.profile)
    model = load_model(args.file)
    if model is None:
        return EXIT_ERRORS
    report = validate(model, profile)
    print_diagnostics(report.diagnostics)
    print(f'{args.file}\t{profile.strictness}\t{"ok" if report.passed else "failed"}')
    return EXIT_OK if report.passed else EXIT_ERRORS


def _run(args):
    """Model and trace of the requested scenario, or None if the model was rejected"""
    model = load_model(args.file)
    if model is None:
        return None, None
    try:
        trace = simulate(model, args.scenario, args.max_steps)
    except PathError as e:
        raise CommandFailure(str(e)) from e
    print_diagnostics(trace_diagnostics(trace))
    return model, trace


def cmd_simulate(args) -> int:
    model, trace = _run(args)
    if model is None:
        return EXIT_ERRORS
    sys.stdout.write(str(trace))
    return EXIT_ERRORS if trace.step_limited else EXIT_OK


def cmd_events(args) -> int:
    model, trace = _run(args)
    if model is None:
        return EXIT_ERRORS
    table = occurrences(trace)
    sys.stdout.write(format_occurrences(table))
    if len(table):
        sys.stdout.write('\n' + format_behavior(derive_behavior(table)))
    return EXIT_ERRORS if trace.step_limited else EXIT_OK


def cmd_conform(args) -> int:
    model, trace = _run(args)
    if model is None:
        return EXIT_ERRORS
    try:
        violated = check_behavior(model.behavior(args.behavior), occurrences(trace))
    except (PathError, UnknownEvent) as e:
        raise CommandFailure(str(e)) from e
    sys.stdout.write(format_violations(violated))
    return EXIT_ERRORS if violated or trace.step_limited else EXIT_OK


def cmd_objectify(args) -> int:
    model = load_model(args.file)
    if model is None:
        return EXIT_ERRORS
    try:
        sys.stdout.write(serialize(objectify(model, args.thimac)))
    except PathError as e:
        raise CommandFailure(str(e)) from e
    return EXIT_OK


def cmd_export(args) -> int:
    if args.format == 'dot':
        model = load_model(args.file)
        if model is None:
            return EXIT_ERRORS
        sys.stdout.write(export_dot(model))
        return EXIT_OK

    model, trace = _run(args)
    if model is None:
        return EXIT_ERRORS
    sys.stdout.write(export_trace_json(trace) if args.format == 'trace-json' else str(trace))
    return EXIT_ERRORS if trace.step_limited else EXIT_OK


def cmd_corpus(args) -> int:
    try:
        corpus = Corpus(args.directory)
    except (OSError, ValueError) as e:
        raise CommandFailure(f'cannot load corpus manifest: {e}') from e

    failed = 0
    for entry in corpus.entries:
        result = parse(read_text(str(corpus.path(entry))), entry.file)
        print_diagnostics(result.diagnostics)
        passed = result.ok
        if passed:
            report = validate(result.model, default_rule_profile(entry.profile))
            print_diagnostics(report.diagnostics)
            passed = report.passed
        if not passed:
            failed += 1
        print(f'{entry.file}\t{entry.profile}\t{"ok" if passed else "failed"}')

    log.info(f'corpus {corpus.directory}: {len(corpus.entries) - failed} ok, {failed} failed')
    return EXIT_ERRORS if failed else EXIT_OK


def load_config(config_uri: str):
    """Set up logging and global settings from the config file"""
    try:
        plaster.setup_logging(config_uri)
        settings.init(plaster.get_settings(config_uri, SETTINGS_SECTION))
        settings.check()
    except (OSError, ValueError, KeyError, plaster.PlasterError) as e:
        settings.reset()
        raise CommandFailure(f'cannot load config {config_uri}: {e}') from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='tmkit', description='Thinging machine models toolkit.')
    parser.add_argument('--config', help='The URI to the configuration file.')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('check', help='parse and validate a model')
    p.add_argument('file')
    p.add_argument('--profile', help='strict, lenient or a rule profile file')
    p.set_defaults(handler=cmd_check)

    def _scenario_parser(name: str, help_: str, handler, required: bool = True) -> argparse.ArgumentParser:
        sp = commands.add_parser(name, help=help_)
        sp.add_argument('file')
        sp.add_argument('--scenario', required=required)
        sp.add_argument('--max-steps', type=int, default=None, dest='max_steps')
        sp.set_defaults(handler=handler)
        return sp

    _scenario_parser('simulate', 'print the trace of a scenario', cmd_simulate)
    _scenario_parser('events', 'print event occurrences and the derived behavior', cmd_events)
    p = _scenario_parser('conform', 'check a declared behavior against a scenario run', cmd_conform)
    p.add_argument('--behavior', required=True)

    p = commands.add_parser('objectify', help='print the model with a thimac turned into an object')
    p.add_argument('file')
    p.add_argument('--thimac', required=True)
    p.set_defaults(handler=cmd_objectify)

    p = _scenario_parser('export', 'print a diagram or a trace', cmd_export, required=False)
    p.add_argument('--format', choices=('dot', 'trace', 'trace-json'), required=True)

    p = commands.add_parser('corpus', help='check every model of a corpus under its manifest profile')
    p.add_argument('directory', nargs='?', default=None)
    p.set_defaults(handler=cmd_corpus)

    return parser


def main(argv: list[str] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == 'export' and args.format != 'dot' and not args.scenario:
            parser.error(f'export --format {args.format} requires --scenario')
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        if args.config:
            load_config(args.config)
        else:
            logging.basicConfig(
                stream=sys.stderr, level=logging.WARNING, format='%(levelname)s %(name)s: %(message)s'
            )
        if getattr(args, 'max_steps', None) is not None and args.max_steps < 1:
            raise CommandFailure(f'--max-steps must be positive: {args.max_steps}')
        return args.handler(args)
    except CommandFailure as e:
        print(f'tmkit: {e}', file=sys.stderr)
        return e.status


if __name__ == '__main__':
    sys.exit(main())
