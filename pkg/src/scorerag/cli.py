"""Command-line entry points: ingest, index, generate, evaluate, serve, demo.

Exit codes by failure class: 2 for input/config problems, 3 for backend
failures, 4 for data errors, 1 for anything unexpected.  ``--json`` switches
error reporting to machine-readable ``{"error", "message"}`` objects.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import click

from . import errors as E
from .config import load_config
from .corpus import CorpusStore, ingest_directory
from .embedding import backend_from_config as embedding_backend_from_config
from .evaluation import compare, load_scores_csv
from .pipeline import Pipeline, build_index

logger = logging.getLogger(__name__)

_EXIT_INPUT = 2
_EXIT_BACKEND = 3
_EXIT_DATA = 4

_INPUT_ERRORS = (E.InvalidInput, E.InvalidConfig, E.EmptyCorpus, E.EmptyAfterCleaning)
_BACKEND_ERRORS = (E.BackendUnreachable, E.BackendRefused, E.BackendTimeout, E.GenerationBackendError)


def _exit_code_for(exc: E.ScoreRAGError) -> int:
    if isinstance(exc, E.PipelineStageError):
        return _exit_code_for(exc.cause) if isinstance(exc.cause, E.ScoreRAGError) else 1
    if isinstance(exc, _INPUT_ERRORS):
        return _EXIT_INPUT
    if isinstance(exc, _BACKEND_ERRORS):
        return _EXIT_BACKEND
    return _EXIT_DATA


def handles_errors(fn):
    """Convert package errors into exit codes and readable messages."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        as_json = kwargs.get("as_json", False)
        try:
            return fn(*args, **kwargs)
        except E.ScoreRAGError as exc:
            payload = {"error": type(exc).__name__, "message": str(exc)}
            if isinstance(exc, E.PipelineStageError):
                payload["error"] = type(exc.cause).__name__
                payload["stage"] = exc.stage
            if as_json:
                click.echo(json.dumps(payload, ensure_ascii=False))
            else:
                click.echo(f"error: {payload['error']}: {payload['message']}", err=True)
            sys.exit(_exit_code_for(exc))

    return wrapper


@click.group()
@click.option(
    "--config", "config_path", type=click.Path(), default=None, envvar="SCORERAG_CONFIG",
    help="Path to the pipeline config file (YAML or JSON).",
)
@click.pass_context
def main(ctx, config_path):
    """Retrieval-augmented news generation with consistency scoring."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = config_path


@main.command()
@click.argument("raw_dir", type=click.Path(exists=True, file_okay=False))
@click.pass_obj
@handles_errors
def ingest(config_path, raw_dir):
    """Clean raw articles from RAW_DIR and store them as year partitions."""
    config = load_config(config_path)
    store = ingest_directory(raw_dir)
    if len(store) == 0:
        raise E.EmptyCorpus(f"no articles found in {raw_dir}")
    store.save(config.corpus_dir)
    click.echo(f"ingested {len(store)} articles into {config.corpus_dir} "
               f"(years {', '.join(map(str, store.years()))})")


@main.command()
@click.pass_obj
@handles_errors
def index(config_path):
    """Chunk and embed the stored corpus, then build the vector index."""
    config = load_config(config_path)
    corpus = CorpusStore.load(config.corpus_dir)
    if len(corpus) == 0:
        raise E.EmptyCorpus(f"corpus at {config.corpus_dir} is empty; run ingest first")
    backend = embedding_backend_from_config(config.embedding, config.embedding_backend)
    built = build_index(
        corpus,
        config.chunker,
        backend,
        batch_size=config.embedding.batch_size,
        passage_prefix=config.embedding.passage_prefix,
    )
    built.save(config.index_dir)
    click.echo(f"indexed {len(built)} chunks from {len(corpus)} articles into {config.index_dir}")


@main.command()
@click.argument("query")
@click.option("--k", type=int, default=None, help="Chunks to retrieve (1-50).")
@click.option("--threshold", type=float, default=None, help="Score filter threshold (0-100).")
@click.option("--json", "as_json", is_flag=True, help="Emit the full response as JSON.")
@click.pass_obj
@handles_errors
def generate(config_path, query, k, threshold, as_json):
    """Run the full pipeline for QUERY and print the generated article."""
    config = load_config(config_path)
    pipeline = Pipeline.from_config(config)
    response = pipeline.run(query, k=k, threshold=threshold)
    if as_json:
        click.echo(json.dumps(response.to_dict(), ensure_ascii=False))
        return
    article = response.article
    click.echo(article.body)
    if article.references:
        click.echo("\n--- references ---")
        for ref in article.references:
            click.echo(
                f"[Reference {ref.ref_number}] {ref.published_date.isoformat()} "
                f"{ref.title} (score {ref.consistency_score:.2f})"
            )
    for warning in article.warnings:
        click.echo(f"warning: {warning}", err=True)


@main.command()
@click.option("--scores", "scores_csv", required=True, type=click.Path(exists=True, dir_okay=False),
              help="CSV of per-article criterion scores.")
@click.option("--compare", "systems", nargs=2, required=True, metavar="A B",
              help="Two system labels to compare.")
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Write the report JSON to this path.")
@click.option("--plots", "plots_dir", type=click.Path(), default=None,
              help="Write boxplot/bar-chart PNGs into this directory.")
@handles_errors
def evaluate(scores_csv, systems, as_json, report_path, plots_dir):
    """Compare two systems' evaluation scores from a CSV."""
    label_a, label_b = systems
    scores = load_scores_csv(scores_csv)
    by_label = {}
    for score in scores:
        by_label.setdefault(score.system_label, []).append(score)
    for label in (label_a, label_b):
        if label not in by_label:
            raise E.InvalidInput(f"system {label!r} not present in {scores_csv}")
    report = compare(by_label[label_a], by_label[label_b])
    payload = report.to_dict()
    if report_path:
        Path(report_path).write_text(
            json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8"
        )
    if plots_dir:
        from .plotting import write_plots

        for path in write_plots(payload, plots_dir):
            click.echo(f"wrote {path}", err=True)
    if as_json:
        click.echo(json.dumps(payload, ensure_ascii=False))
        return
    click.echo(f"compared {report.n_articles} paired articles")
    click.echo(f"{label_a} mean total {report.means_a['total']:.2f}")
    click.echo(f"{label_b} mean total {report.means_b['total']:.2f}")
    for name in ("coherence", "accuracy", "professionalism", "informativeness", "total"):
        click.echo(
            f"  {name}: {report.means_a[name]:.2f} vs {report.means_b[name]:.2f} "
            f"(p={report.p_values[name]:.4g})"
        )


@main.command()
@click.option("--port", type=int, default=None, help="Listening port (default from config).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_obj
@handles_errors
def serve(config_path, port, host):
    """Start the HTTP API for the demo frontend."""
    import uvicorn

    from .service import create_app

    config = load_config(config_path)
    pipeline = Pipeline.from_config(config)
    app = create_app(pipeline)
    click.echo(f"serving on http://{host}:{port or config.port} "
               f"({len(pipeline.corpus)} articles, {len(pipeline.index)} chunks)")
    uvicorn.run(app, host=host, port=port or config.port, log_level="info")


@main.command()
@click.argument("target_dir", type=click.Path(file_okay=False))
@handles_errors
def demo(target_dir):
    """Materialize the bundled offline demo (raw articles, stub script, config)."""
    target = Path(target_dir)
    (target / "raw").mkdir(parents=True, exist_ok=True)
    data = resources.files("scorerag").joinpath("data/demo")
    (target / "raw" / "articles.jsonl").write_text(
        data.joinpath("raw_articles.jsonl").read_text(encoding="utf-8"), encoding="utf-8"
    )
    for name in ("stub_script.json", "config.yaml"):
        (target / name).write_text(
            data.joinpath(name).read_text(encoding="utf-8"), encoding="utf-8"
        )
    click.echo(f"demo files written to {target}; next:")
    click.echo(f"  scorerag --config {target / 'config.yaml'} ingest {target / 'raw'}")
    click.echo(f"  scorerag --config {target / 'config.yaml'} index")
    click.echo(f'  scorerag --config {target / "config.yaml"} generate "美中官員會晤" --json')


if __name__ == "__main__":
    main()
