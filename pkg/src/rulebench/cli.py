"""Command-line interface.

Subcommands: ``parse``, ``translate``, ``eval``, ``monitor``, ``serve``.
Exit codes: 0 success, 1 usage or parse errors, 2 rule violation (monitor),
3 provider or fixture errors.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from .defaults import default_prompt_config, default_swap_rules, default_vocabulary
from .equivalence import canonicalize, load_swap_rules
from .evaluation import DatasetFormatError, evaluate_dataset, render_report
from .formula import print_formula
from .llm import GatewayError, SamplingConfig, http_provider, replay_provider
from .parser import ParseError, parse_formula
from .pipeline import translate as run_translate
from .prompting import COT, PLAIN, ConfigInvalid
from .semantics import TraceFormatError, first_violation, load_trace, monitor
from .store import ReviewStore

__all__ = ["cli", "cli_run", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_PROVIDER = 3


@click.group()
def cli():
    """Translate traffic rules to MTL, monitor traces, and score translations."""


def _swaps(swaps_path: Optional[str]):
    return load_swap_rules(swaps_path) if swaps_path else default_swap_rules()


@cli.command("parse")
@click.argument("text")
@click.option("--ast", "show_ast", is_flag=True, help="Print the AST instead of the canonical form.")
@click.option("--swaps", "swaps_path", type=click.Path(exists=True), default=None,
              help="Swap-rule JSON file (defaults to the shipped rules).")
def cmd_parse(text: str, show_ast: bool, swaps_path: Optional[str]) -> int:
    """Parse one formula and print its canonical form."""

    try:
        f = parse_formula(text)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        return EXIT_USAGE
    if show_ast:
        click.echo(repr(f))
    else:
        click.echo(print_formula(canonicalize(f, _swaps(swaps_path))))
    return EXIT_OK


def _provider_from_options(provider, fixtures, endpoint, model, credential_env):
    if provider == "replay":
        if not fixtures:
            raise click.UsageError("--provider replay requires --fixtures")
        return replay_provider(fixtures)
    if not endpoint or not model:
        raise click.UsageError("--provider http requires --endpoint and --model")
    return http_provider(endpoint, model, credential_env=credential_env)


@cli.command("translate")
@click.option("--rule", required=True, help="Natural-language rule text.")
@click.option("--mode", type=click.Choice([PLAIN, COT]), default=COT, show_default=True)
@click.option("--samples", type=int, default=5, show_default=True)
@click.option("--provider", type=click.Choice(["replay", "http"]), default="replay",
              show_default=True)
@click.option("--fixtures", type=click.Path(exists=True), default=None,
              help="Replay fixture file (replay provider).")
@click.option("--rule-id", default=None, help="Fixture key; derived from the rule text if omitted.")
@click.option("--endpoint", default=None, help="Chat-completion URL (http provider).")
@click.option("--model", default=None, help="Model name (http provider).")
@click.option("--credential-env", default=None,
              help="Environment variable holding the provider credential.")
@click.option("--prompts-dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--swaps", "swaps_path", type=click.Path(exists=True), default=None)
def cmd_translate(rule, mode, samples, provider, fixtures, rule_id, endpoint, model,
                  credential_env, prompts_dir, swaps_path) -> int:
    """Translate one rule and print every candidate plus the winner."""

    spec = _provider_from_options(provider, fixtures, endpoint, model, credential_env)
    sampling = SamplingConfig(samples_per_rule=samples)
    prompt_config = default_prompt_config(
        mode, Path(prompts_dir) if prompts_dir else None
    )
    try:
        result = run_translate(rule, prompt_config, spec, sampling, _swaps(swaps_path),
                               rule_id=rule_id)
    except ConfigInvalid as exc:
        click.echo(f"invalid configuration: {exc}", err=True)
        return EXIT_USAGE
    except GatewayError as exc:
        click.echo(f"provider error: {exc}", err=True)
        return EXIT_PROVIDER

    for cand in result.candidates:
        if cand.formula is not None:
            line = f"  [{cand.sample_index}] {print_formula(cand.formula)}"
            if cand.vocab_violations:
                names = ", ".join(f"{n}/{a}" for n, a in cand.vocab_violations)
                line += f"  (outside vocabulary: {names})"
        else:
            line = f"  [{cand.sample_index}] unparseable: {cand.parse_error}"
        click.echo(line)
    for form, count in sorted(result.vote_tally.items(), key=lambda kv: (-kv[1], kv[0])):
        click.echo(f"  votes {count}: {form}")
    if result.winner is not None:
        click.echo(f"winner: {print_formula(result.winner.formula)}")
    else:
        click.echo("winner: none (no sample parsed)")
    return EXIT_OK


@cli.command("eval")
@click.option("--dataset", required=True, type=click.Path(exists=True))
@click.option("--fixtures", required=True, type=click.Path(exists=True))
@click.option("--exclude", type=click.Path(exists=True), default=None,
              help="File with one rule id per line to leave out of scoring.")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Write the structured report to this path.")
@click.option("--mode", type=click.Choice([PLAIN, COT]), default=COT, show_default=True)
@click.option("--samples", type=int, default=5, show_default=True)
@click.option("--prompts-dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--swaps", "swaps_path", type=click.Path(exists=True), default=None)
def cmd_eval(dataset, fixtures, exclude, report_path, mode, samples, prompts_dir,
             swaps_path) -> int:
    """Score a rule dataset against recorded translations and print the report."""

    try:
        report = evaluate_dataset(
            dataset,
            fixtures,
            exclude,
            prompt_config=default_prompt_config(mode, Path(prompts_dir) if prompts_dir else None),
            sampling=SamplingConfig(samples_per_rule=samples),
            swaps=_swaps(swaps_path),
        )
    except DatasetFormatError as exc:
        click.echo(f"dataset error: {exc}", err=True)
        return EXIT_USAGE
    except GatewayError as exc:
        click.echo(f"provider error: {exc}", err=True)
        return EXIT_PROVIDER
    click.echo(render_report(report, "text"), nl=False)
    if report_path:
        Path(report_path).write_text(render_report(report, "structured"), encoding="utf-8")
        click.echo(f"report written to {report_path}")
    return EXIT_OK


@cli.command("monitor")
@click.option("--formula", required=True, help="MTL formula text.")
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True),
              help="Trace file (JSON document with a 'states' array).")
def cmd_monitor(formula: str, trace_path: str) -> int:
    """Check one formula against a recorded trace; exit 2 if violated."""

    try:
        f = parse_formula(formula)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        return EXIT_USAGE
    try:
        trace = load_trace(trace_path)
    except TraceFormatError as exc:
        click.echo(f"trace error: {exc}", err=True)
        return EXIT_USAGE
    verdict = monitor(f, trace)
    if verdict.holds:
        click.echo(f"holds: {print_formula(f)} over {len(trace)} states")
        return EXIT_OK
    position = first_violation(f, trace)
    click.echo(f"violated at position {position}: {print_formula(f)}")
    return EXIT_VIOLATION


@cli.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False),
              help="Directory for the review store.")
@click.option("--provider", type=click.Choice(["replay", "http"]), default="replay",
              show_default=True)
@click.option("--fixtures", type=click.Path(exists=True), default=None)
@click.option("--endpoint", default=None)
@click.option("--model", default=None)
@click.option("--credential-env", default=None)
@click.option("--ui-dir", type=click.Path(file_okay=False), default=None,
              help="Directory with built review UI assets to serve statically.")
@click.option("--prompts-dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--swaps", "swaps_path", type=click.Path(exists=True), default=None)
def cmd_serve(port, host, store_dir, provider, fixtures, endpoint, model, credential_env,
              ui_dir, prompts_dir, swaps_path) -> int:
    """Start the HTTP service (and the review UI, when built assets are given)."""

    import uvicorn

    from .service import ServiceConfig, create_app

    spec = _provider_from_options(provider, fixtures, endpoint, model, credential_env)
    store = ReviewStore(store_dir)
    store.compact()
    config = ServiceConfig(
        store=store,
        provider=spec,
        swaps=_swaps(swaps_path),
        vocabulary=default_vocabulary(),
        prompts_dir=Path(prompts_dir) if prompts_dir else None,
        ui_dir=Path(ui_dir) if ui_dir else None,
    )
    app = create_app(config)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return EXIT_OK


def cli_run(argv: Sequence[str]) -> int:
    """Run the CLI programmatically and return its exit code."""

    try:
        result = cli.main(args=list(argv), prog_name="rulebench", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except SystemExit as exc:  # --help and friends
        code = exc.code
        return int(code) if isinstance(code, int) else EXIT_OK
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(cli_run(sys.argv[1:]))


if __name__ == "__main__":
    main()
