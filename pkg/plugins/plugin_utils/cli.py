"""
contexture command line

  contexture gen bell|pbr [-o FILE]
  contexture gen born SPEC [-o FILE] [--max-denominator N] [--tolerance T]
  contexture validate [MODEL]
  contexture check ns|measurement|prep-compat|preparation|forbidden [MODEL]

MODEL defaults to "-" (stdin), so `contexture gen pbr | contexture check preparation` works.
JSON goes to stdout. verbose messages, warnings and --pretty summaries go to stderr.

exit codes: 0 ran, 1 --fail-on matched, 2 usage error, 3 input or model error
"""

import sys
import json
import time
import argparse
from dataclasses import replace

from ansible import constants as C
from ansible.utils.display import Display

from ansible_collections.unity.contexture.plugins.plugin_utils.compat import (
    no_signalling,
    prep_compatible,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.errors import ContextureError
from ansible_collections.unity.contexture.plugins.plugin_utils.incext import (
    family_from_data,
    uniform_family,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.models import (
    MeasurementEmpiricalModel,
    PreparationEmpiricalModel,
    dump_model,
    load_model,
    possibilistic_reduce,
    read_source,
    validate,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.quantum import (
    BUILTINS,
    MAX_DENOMINATOR,
    TOLERANCE,
    born,
    load_spec,
)
from ansible_collections.unity.contexture.plugins.plugin_utils.summary import decolorize, summarize
from ansible_collections.unity.contexture.plugins.plugin_utils.verdict import (
    Mode,
    SupportPattern,
    check_measurement,
    check_preparation,
    forbidden_map,
    parity_profile,
    parse_mode,
)

display = Display()

EXIT_OK = 0
EXIT_FAIL_ON = 1
EXIT_USAGE = 2
EXIT_INPUT = 3

CHECKS = ("ns", "measurement", "prep-compat", "preparation", "forbidden")
# the statuses each check can report, so the --fail-on values that can ever match
FAIL_ON = {
    "ns": ("incompatible",),
    "measurement": ("contextual", "incompatible"),
    "prep-compat": ("incompatible",),
    "preparation": ("contextual",),
    "forbidden": (),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="repeat for more detail on stderr")
    common.add_argument("--pretty", action="store_true", help="also write a human summary to stderr")

    parser = argparse.ArgumentParser(prog="contexture", description="exact contextuality checks")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", parents=[common], help="write a model generated by the Born rule")
    gen.add_argument("source", choices=[*BUILTINS, "born"])
    gen.add_argument("spec", nargs="?", help="quantum spec JSON file, for born")
    gen.add_argument("-o", "--output", default="-")
    gen.add_argument("--max-denominator", type=int, default=MAX_DENOMINATOR)
    gen.add_argument("--tolerance", type=float, default=TOLERANCE)

    validate_parser = commands.add_parser("validate", parents=[common], help="check a model file")
    validate_parser.add_argument("model", nargs="?", default="-")

    check = commands.add_parser("check", parents=[common], help="run a compatibility or contextuality check")
    check.add_argument("check", choices=CHECKS)
    check.add_argument("model", nargs="?", default="-")
    check.add_argument("--mode", help="prob or poss for measurement models, also auto for preparation models")
    check.add_argument(
        "--mu",
        action="append",
        default=[],
        help='"uniform" or a JSON file {"mu": {source: [weights]}}. preparation accepts it more than once',
    )
    check.add_argument("--max-sweep", type=int, help="support-pattern sweep limit, overrides CONTEXTURE_MAX_SWEEP")
    check.add_argument("--stats", action="store_true", help="add elapsed seconds to the verdict stats")
    check.add_argument(
        "--fail-on",
        choices=("contextual", "incompatible"),
        help="exit 1 when the status matches. preparation verdicts are never incompatible, see check prep-compat",
    )
    return parser


def _mu_strategy(items: list[str], model: PreparationEmpiricalModel) -> list:
    strategy = []
    for item in items:
        if item == "uniform":
            strategy.append(item)
            continue
        try:
            data = json.loads(read_source(item))
        except ValueError as e:
            raise ContextureError(f'"{item}" is not valid JSON: {e}') from e
        strategy.append(family_from_data(data, model.scenario))
    return strategy


def _require(model, kind: type, check: str):
    if not isinstance(model, kind):
        raise ContextureError(f'check {check} takes a {kind.kind} model, got a {model.kind} model')


def _check_arguments(parser: argparse.ArgumentParser, args):
    """combinations argparse cannot express, reported as usage errors"""
    if args.mode is not None:
        if args.check not in ("measurement", "preparation"):
            parser.error(f"check {args.check} takes no --mode")
        try:
            mode = parse_mode(args.mode)
        except ContextureError as e:
            parser.error(e.reason)
        if args.check == "measurement" and mode == Mode.AUTO:
            parser.error("check measurement takes --mode prob or poss")
    if args.mu and args.check not in ("prep-compat", "preparation"):
        parser.error(f"check {args.check} takes no --mu")
    if args.max_sweep is not None and args.check != "preparation":
        parser.error(f"check {args.check} takes no --max-sweep")
    if args.fail_on is not None and args.fail_on not in FAIL_ON[args.check]:
        parser.error(
            f"check {args.check} never reports {args.fail_on.upper()}, so --fail-on {args.fail_on} cannot match"
        )


def _run_check(args) -> tuple[dict, bool]:
    """the JSON document to print, and whether --fail-on matched"""
    model = load_model(args.model)
    if args.check == "ns":
        _require(model, MeasurementEmpiricalModel, args.check)
        report = no_signalling(model)
        return report.to_json(), args.fail_on == "incompatible" and not report.ok
    if args.check == "prep-compat":
        _require(model, PreparationEmpiricalModel, args.check)
        if len(args.mu) > 1:
            raise ContextureError("check prep-compat takes a single --mu")
        strategy = _mu_strategy(args.mu or ["uniform"], model)
        fam = strategy[0]
        if fam == "uniform":
            fam = uniform_family(model.scenario.sources, model.scenario.instances)
        report = prep_compatible(model, fam)
        return report.to_json(), args.fail_on == "incompatible" and not report.ok
    if args.check == "forbidden":
        _require(model, PreparationEmpiricalModel, args.check)
        pmodel = possibilistic_reduce(model)
        scenario = model.scenario
        profile = parity_profile(pmodel, SupportPattern.full(scenario.sources, scenario.instances))
        output = {
            "forbidden": forbidden_map(pmodel).to_json(),
            "parity": [entry.to_json(scenario) for entry in profile],
        }
        return output, False

    start = time.perf_counter()
    if args.check == "measurement":
        _require(model, MeasurementEmpiricalModel, args.check)
        verdict = check_measurement(model, args.mode or "prob")
    else:
        _require(model, PreparationEmpiricalModel, args.check)
        mode = args.mode or "auto"
        # probabilistic mode with no --mu falls back to the uniform family
        strategy = _mu_strategy(args.mu or (["uniform"] if mode in ("prob", "probabilistic") else []), model)
        verdict = check_preparation(model, mode, strategy, args.max_sweep)
    if args.stats:
        verdict = replace(verdict, stats=replace(verdict.stats, elapsed=time.perf_counter() - start))
    output = verdict.to_json()
    return output, args.fail_on is not None and verdict.status.value == args.fail_on.upper()


def _pretty(output: dict):
    # ansible decides on color by looking at stdout, which is usually piped JSON
    summary = summarize(output)
    if not sys.stderr.isatty():
        summary = decolorize(summary)
    display.display(summary, stderr=True)


def _print(output: dict, pretty: bool):
    sys.stdout.write(json.dumps(output, indent=2, ensure_ascii=False) + "\n")
    sys.stdout.flush()
    if pretty:
        _pretty(output)


def _error(e: ContextureError) -> dict:
    return {"error": type(e).__name__, "msg": e.reason, "path": getattr(e, "path", None)}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    C.VERBOSE_TO_STDERR = True
    display.verbosity = args.verbose
    try:
        if args.command == "gen":
            if args.source == "born":
                if args.spec is None:
                    parser.error("gen born needs a quantum spec file")
                model = born(load_spec(read_source(args.spec)), args.max_denominator, args.tolerance)
            else:
                if args.spec is not None:
                    parser.error(f"gen {args.source} takes no spec file")
                model = BUILTINS[args.source]()
            dump_model(model, args.output)
            if args.pretty:
                _pretty(validate(model).to_json())
            return EXIT_OK
        if args.command == "validate":
            _print(validate(load_model(args.model)).to_json(), args.pretty)
            return EXIT_OK
        _check_arguments(parser, args)
        output, failed = _run_check(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except ContextureError as e:
        _print(_error(e), False)
        display.vvv(f"{type(e).__name__}: {e}")
        return EXIT_INPUT
    _print(output, args.pretty)
    return EXIT_FAIL_ON if failed else EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
