"""
VGDL Forge command line: compose prompts, run trials, validate, solve and report
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

# Add utils to path
sys.path.append(os.path.join(os.path.dirname(__file__), 'utils'))

from dotenv import load_dotenv

from llm_client import ProviderConfigError
from prompt_composer import ConfigError, GrammarStyle, PRESET_IDS, build, load_prompt_config, preset
from provider_manager import ProviderManager, load_provider_configs, providers_file
from response_extractor import ExtractionError, extract_candidates
from trial_harness import JOURNAL_NAME, HarnessAbort, load_journal, render, run_trials, tabulate
from vgdl_engine import DEFAULT_MAX_STEPS, EngineError, GridEngine, SolveVerdict
from vgdl_parser import ParseError, ParserOptions, parse_game, parse_level
from vgdl_validator import ValidatorOptions, validate, validate_candidate

load_dotenv()
logger = logging.getLogger('vgdl_forge')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def setup_logging(verbose=False):
    level = 'DEBUG' if verbose else os.getenv('VGDL_FORGE_LOG_LEVEL', 'INFO').upper()
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def _read(path):
    return Path(path).read_text(encoding='utf-8')


def _write(data):
    sys.stdout.buffer.write(data)
    sys.stdout.flush()


def _validator_options(args):
    parser_options = ParserOptions(
        strict_block_order=getattr(args, 'strict_order', False),
        strict_ontology=getattr(args, 'strict_ontology', False),
    )
    alphabet = None if getattr(args, 'no_alphabet', False) else ValidatorOptions().level_alphabet
    return ValidatorOptions(level_alphabet=alphabet, parser_options=parser_options)


def _print_report(report):
    print(f"Outcome:  {report.outcome.value}")
    print(f"Parsable: {report.parsable}")
    print(f"Logical:  {report.logical if report.parsable else '-'}")
    print(f"Mappable: {report.mappable}")
    for error in report.errors:
        location = f" at {error.location[0]}:{error.location[1]}" if error.location else ''
        print(f"  [{error.code.value}] {error.detail}{location}")


def cmd_generate(args):
    if args.config:
        config = load_prompt_config(args.config)
    else:
        config = preset(args.preset, args.game)
    if args.grammar_style:
        config = replace(config, grammar_style=GrammarStyle(args.grammar_style))
    prompt = build(config)

    if args.print_prompt:
        print(prompt.text)
        return EXIT_OK

    manager = ProviderManager.from_file(args.providers) if args.providers else ProviderManager.from_file()
    if args.provider:
        manager.set_provider(args.provider)
    response = manager.complete(prompt, args.provider)
    if response is None:
        return EXIT_ERROR
    print(response)

    try:
        candidates = extract_candidates(response)
    except ExtractionError as e:
        print(f"\nOutcome:  W ({e})")
        return EXIT_FAILED
    print()
    report = validate_candidate(candidates[0])
    _print_report(report)
    return EXIT_OK if report.correct else EXIT_FAILED


def cmd_run(args):
    path = args.providers or providers_file()
    try:
        configs = load_provider_configs(path)
    except ProviderConfigError as e:
        logger.error(str(e))
        return EXIT_ERROR
    if args.provider:
        configs = [config for config in configs if config.name in args.provider]
    if not configs:
        logger.error(f"No providers selected from {path}")
        return EXIT_ERROR

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    journal = out / JOURNAL_NAME

    try:
        records = run_trials(
            args.presets,
            configs,
            args.trials,
            game_name=args.game,
            journal_path=journal,
            resume=args.resume,
            max_workers=args.workers,
            max_steps=args.max_steps,
        )
    except HarnessAbort as e:
        logger.error(str(e))
        return EXIT_ERROR

    table = tabulate(records)
    for fmt, suffix in (('text', 'txt'), ('tsv', 'tsv'), ('jsonl', 'jsonl')):
        (out / f"report.{suffix}").write_bytes(render(table, fmt))
    logger.info(f"Wrote {len(records)} records to {journal}")
    _write(render(table, 'text'))
    return EXIT_OK


def cmd_validate(args):
    options = _validator_options(args)
    text = _read(args.rules)

    if args.extract:
        try:
            candidate = extract_candidates(text)[0]
        except ExtractionError as e:
            print(f"Outcome:  W ({e})")
            return EXIT_FAILED
        if args.level:
            candidate = replace(candidate, level_text=_read(args.level))
        report = validate_candidate(candidate, options)
    else:
        level_text = _read(args.level) if args.level else None
        report = validate(text, level_text, options=options)

    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        _print_report(report)
    return EXIT_OK if report.correct else EXIT_FAILED


def cmd_solve(args):
    try:
        spec = parse_game(_read(args.rules))
        level = parse_level(_read(args.level))
        engine = GridEngine(spec)
        result = engine.solve(level, args.max_steps, args.workers)
    except (ParseError, EngineError) as e:
        logger.error(str(e))
        return EXIT_ERROR

    print(str(result))
    if result.verdict is SolveVerdict.WINNABLE:
        print(' '.join(action.value for action in result.actions))
        if args.trace:
            _, trace = engine.run_actions(level, result.actions)
            print('\n'.join(trace))
        return EXIT_OK
    return EXIT_FAILED


def cmd_report(args):
    records = load_journal(args.journal)
    _write(render(tabulate(records), args.format))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog='vgdl-forge', description='Generate and check VGDL games with LLMs')
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', help='Compose a prompt and obtain a game')
    gen.add_argument('--preset', default='P7', type=str.upper, choices=PRESET_IDS)
    gen.add_argument('--game', default='a maze game', help='Game named in the instruction')
    gen.add_argument('--config', help='YAML file with a prompt section')
    gen.add_argument('--grammar-style', choices=[style.value for style in GrammarStyle])
    gen.add_argument('--print-prompt', action='store_true', help='Print the prompt and stop')
    gen.add_argument('--providers', help='Providers YAML file')
    gen.add_argument('--provider', help='Provider name')
    gen.set_defaults(func=cmd_generate)

    run = sub.add_parser('run', help='Run trials and write journal and reports')
    run.add_argument('--providers', help='Providers YAML file')
    run.add_argument('--provider', action='append', help='Restrict to these providers')
    run.add_argument('--presets', default='all', help="'all' or a comma list such as P1,P7")
    run.add_argument('--trials', type=int, default=10)
    run.add_argument('--game', default='a maze game')
    run.add_argument('--out', required=True, help='Output directory')
    run.add_argument('--resume', action='store_true', help='Skip trials already in the journal')
    run.add_argument('--workers', type=int, default=1)
    run.add_argument('--max-steps', type=int, default=DEFAULT_MAX_STEPS)
    run.set_defaults(func=cmd_run)

    val = sub.add_parser('validate', help='Validate rules and level files')
    val.add_argument('rules')
    val.add_argument('level', nargs='?')
    val.add_argument('--extract', action='store_true', help='Treat the rules file as a raw model response')
    val.add_argument('--strict-order', action='store_true', help='Reject blocks out of grammar order')
    val.add_argument('--strict-ontology', action='store_true', help='Reject names outside the ontology')
    val.add_argument('--no-alphabet', action='store_true', help='Skip the W/A/G level alphabet check')
    val.add_argument('--json', action='store_true')
    val.set_defaults(func=cmd_validate)

    slv = sub.add_parser('solve', help='Decide winnability of a game')
    slv.add_argument('rules')
    slv.add_argument('level')
    slv.add_argument('--max-steps', type=int, default=DEFAULT_MAX_STEPS)
    slv.add_argument('--workers', type=int, default=1)
    slv.add_argument('--trace', action='store_true', help='Print the step trace of the solution')
    slv.set_defaults(func=cmd_solve)

    rep = sub.add_parser('report', help='Tabulate a journal')
    rep.add_argument('journal')
    rep.add_argument('--format', choices=['text', 'tsv', 'jsonl'], default='text')
    rep.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except (ConfigError, OSError) as e:
        logger.error(str(e))
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
