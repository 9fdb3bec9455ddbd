import functools
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from common.config import Settings
from common.convolution import convolve
from common.data import RunReport, default_pairs, module_to_json
from common.errors import KLRError, SymmetryError
from common.util import dump_json
from data_setup import initialise_corpus
from views.pairs import hexagon_view, make_pair_view
from views.summary import summary_text
from views.typing import PairStatus

logger = logging.getLogger(__name__)

DEFAULT_CORPUS = Path("data/corpus/c2_two_vertex.json")


def reports_errors(command):
    """Turn library errors into a message on stderr and their exit code."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except KLRError as err:
            click.echo(f"error: {err}", err=True)
            raise click.exceptions.Exit(err.exit_code)

    return wrapper


def emit(data, out: Optional[str]):
    text = dump_json(data)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("wrote %s", out)
    else:
        click.echo(text, nl=False)


def _finish(passed: bool):
    if not passed:
        raise click.exceptions.Exit(1)


@click.group()
@click.option(
    "--corpus",
    "corpus_path",
    type=click.Path(dir_okay=False),
    default=str(DEFAULT_CORPUS),
    show_default=True,
    help="Corpus JSON file.",
)
@click.option(
    "--out", type=click.Path(dir_okay=False), help="Write the report here."
)
@click.option("--verbose", is_flag=True, help="Debug logging on stderr.")
@click.pass_context
def cli(ctx, corpus_path, out, verbose):
    """Modules over quiver Hecke algebras: convolutions, R-matrices and
    the simple head and socle of M o N."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = {
        "corpus_path": corpus_path,
        "out": out,
        "settings": Settings.from_env(),
    }


def _corpus(ctx, strict: bool = True):
    return initialise_corpus(
        ctx.obj["corpus_path"], ctx.obj["settings"], strict=strict
    )


def _check_entries(corpus):
    return [
        {
            "module": name,
            "passed": report.passed,
            "violations": list(report.violations),
        }
        for name, report in corpus.validation.items()
    ]


@cli.command()
@click.pass_context
@reports_errors
def check(ctx):
    """Check the defining relations on every corpus module."""
    corpus = _corpus(ctx, strict=False)
    run = RunReport(corpus.name, corpus.digest)
    run.add("check", _check_entries(corpus), corpus.passed)
    emit(run.to_json(), ctx.obj["out"])
    _finish(run.passed)


@cli.command()
@click.argument("first")
@click.argument("second")
@click.pass_context
@reports_errors
def conv(ctx, first, second):
    """Write the convolution FIRST o SECOND."""
    corpus = _corpus(ctx)
    product = convolve(
        corpus.module(first), corpus.module(second), ctx.obj["settings"]
    )
    emit(module_to_json(product), ctx.obj["out"])


@cli.command()
@click.argument("first")
@click.argument("second")
@click.pass_context
@reports_errors
def rmatrix(ctx, first, second):
    """Renormalized R-matrix r_{FIRST,SECOND}."""
    corpus = _corpus(ctx)
    view = make_pair_view("rmatrix", ctx.obj["settings"])
    report = view(corpus.module(first), corpus.module(second))
    emit(report.to_json(), ctx.obj["out"])


def _verify_entries(corpus, pairs, settings):
    view = make_pair_view("verify", settings)
    statuses = [
        view(corpus.module(a), corpus.module(b)) for a, b in sorted(pairs)
    ]
    passed = not any(status.is_failure for status in statuses)
    return [status.to_json() for status in statuses], passed


@cli.command()
@click.argument("first", required=False)
@click.argument("second", required=False)
@click.option("--all-pairs", is_flag=True, help="Every listed corpus pair.")
@click.pass_context
@reports_errors
def verify(ctx, first, second, all_pairs):
    """Verify the head and socle statements for M=FIRST, N=SECOND."""
    corpus = _corpus(ctx)
    if all_pairs:
        pairs = default_pairs(corpus)
    elif first and second:
        pairs = [(first, second)]
    else:
        raise click.UsageError("give two module names or --all-pairs")
    entries, passed = _verify_entries(corpus, pairs, ctx.obj["settings"])
    run = RunReport(corpus.name, corpus.digest)
    run.add("verify", entries, passed)
    emit(run.to_json(), ctx.obj["out"])
    _finish(run.passed)


@cli.command()
@click.pass_context
@reports_errors
def report(ctx):
    """Relations, R-matrices, verification and hexagons for a corpus."""
    settings = ctx.obj["settings"]
    corpus = _corpus(ctx)
    run = RunReport(corpus.name, corpus.digest)
    run.add("check", _check_entries(corpus), corpus.passed)

    pairs = sorted(default_pairs(corpus))
    rmatrix_view = make_pair_view("rmatrix", settings)
    entries = []
    for a, b in pairs:
        try:
            entries.append(
                rmatrix_view(corpus.module(a), corpus.module(b)).to_json()
            )
        except SymmetryError as err:
            entries.append(
                PairStatus(
                    (a, b), PairStatus.NOT_SYMMETRIC, message=str(err)
                ).to_json()
            )
    run.add("rmatrix", entries, True)

    entries, passed = _verify_entries(corpus, pairs, settings)
    run.add("verify", entries, passed)

    statuses = [
        hexagon_view(tuple(corpus.module(name) for name in triple))
        for triple in corpus.triples
    ]
    run.add(
        "hexagons",
        [status.to_json() for status in statuses],
        not any(status.is_failure for status in statuses),
    )

    emit(run.to_json(), ctx.obj["out"])
    click.echo(summary_text(run), err=True)
    _finish(run.passed)


def main():
    cli()


if __name__ == "__main__":
    main()
