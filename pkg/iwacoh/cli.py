"""Command line: one subcommand per task kind, reading a workspace file."""
import dataclasses
import functools
import logging
import pathlib
import sys

import click

from .config import make_config
from .errors import ConfigError, ParseError, ValidationError
from .workspace import SCHEMA, Report, Workspace, load_workspace, parse_workspace, run

logger = logging.getLogger(__name__)

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def _degree_range(ctx, param, value):
    if value is None:
        return None
    try:
        lo, hi = (int(x) for x in value.split(".."))
    except ValueError:
        raise click.BadParameter("expected a..b, got %r" % value)
    return lo, hi


def _inline_workspace(group: str, p: int, e: int, exps: str, kind: str) -> Workspace:
    """A one-task workspace for trivial coefficients over a builtin group."""
    doc = {
        "schema": SCHEMA,
        "ring": {"p": p, "e": e},
        "groups": {"G": group},
        "modules": {"M": {"group": "G", "exps": [int(a) for a in exps.split(",")]}},
        "tasks": [{"kind": kind, "module": "M"}],
    }
    return load_workspace(doc)


def _emit(report: Report, report_path):
    click.echo(report.to_text(), nl=False)
    if report_path:
        pathlib.Path(report_path).write_text(report.to_json(), encoding="utf-8")
    sys.exit(report.exit_code)


def _load(input_path, kind: str, degrees, inline=None) -> Workspace:
    if input_path is not None:
        w = parse_workspace(input_path)
    elif inline is not None and inline[0] is not None:
        w = _inline_workspace(*inline, kind)
    else:
        raise click.UsageError("%s needs --input (or --group for trivial coefficients)" % kind)
    w = w.select([kind])
    if degrees is not None:
        w = w.with_degrees(*degrees)
    return w


def _guarded(fn):
    """Map workspace errors to exit code 2."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ParseError, ValidationError, ConfigError) as exc:
            click.echo("error: %s" % exc, err=True)
            sys.exit(2)
    return wrapper


def common_options(fn):
    fn = click.option("--parallel", is_flag=True, help="Run tasks in worker processes.")(fn)
    fn = click.option("--report", "report_path", type=click.Path(dir_okay=False),
                      help="Write the JSON report here.")(fn)
    fn = click.option("--degree-range", "degrees", callback=_degree_range, help="Override degrees, as a..b.")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True)(fn)
    fn = click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
                      help="Workspace JSON file.")(fn)
    return fn


def inline_options(fn):
    fn = click.option("--exps", default="1", show_default=True, help="Cyclic exponents of M, comma separated.")(fn)
    fn = click.option("-e", "--exponent", "e", type=int, default=1, show_default=True)(fn)
    fn = click.option("-p", "--prime", "p", type=int, default=2, show_default=True)(fn)
    fn = click.option("--group", help="Builtin group for trivial coefficients, e.g. cyclic:2.")(fn)
    return fn


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG.")
def main(verbose):
    logging.basicConfig(level=LOG_LEVELS[min(verbose, 2)], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _task_command(kind: str, help_text: str, inline: bool = False):
    def command(input_path, seed, degrees, report_path, parallel, group=None, p=2, e=1, exps="1"):
        w = _load(input_path, kind, degrees, (group, p, e, exps) if inline else None)
        _emit(run(w, seed, parallel), report_path)
    command.__doc__ = help_text
    command = _guarded(command)
    if inline:
        command = inline_options(command)
    return main.command(name=kind)(common_options(command))


_task_command("cohomology", "Group cohomology H^i(G, M) of the workspace's cohomology tasks.", inline=True)
_task_command("tate", "Tate cohomology, including negative degrees.", inline=True)
_task_command("shapiro", "Shapiro comparisons H(G, M_U) -> H(U, M).")
_task_command("duality", "Finite duality checks and compact duality triangles.")
_task_command("tower", "Limits over towers of finite quotients.")
_task_command("compact", "Compactly supported cohomology and its long exact sequence.")


@main.command()
@common_options
@click.option("--suite", "suites", multiple=True, help="Suite to run; repeat for several. Default: all.")
@click.option("--cases", type=int, help="Cases per suite, overriding the configured counts.")
@_guarded
def verify(input_path, seed, degrees, report_path, parallel, suites, cases):
    """Randomized identity checks, from --suite options or the workspace's verify tasks."""
    from .verify import SUITES, verify_suite
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ValidationError("unknown suites %s, expected some of %s" % (unknown, list(SUITES)), "--suite")
    w = parse_workspace(input_path) if input_path is not None else Workspace.empty()
    if cases is not None:
        w = dataclasses.replace(w, config=make_config(w.config, random_cases={s: cases for s in SUITES}))
    declared = w.select(["verify"])
    if input_path is not None and declared.tasks and not suites and cases is None:
        report = run(declared, seed, parallel)
    else:
        report = verify_suite(w, list(suites) or list(SUITES), seed)
    _emit(report, report_path)
