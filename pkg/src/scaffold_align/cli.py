"""Command-line pipeline: summarize, align, analyze, simulate, export-golden.

Configuration comes from flags plus an optional JSON config file given
with --config; explicit flags override file values. Outputs are written
atomically (temp file + rename) so a crashed run never leaves a partial
artifact. Exit codes: 0 success, 2 input, 3 store, 4 network, 5 modeling.
"""

from __future__ import annotations

import io
import json
import os
import sys
import tempfile
from importlib import resources
from pathlib import Path

import click
from click.core import ParameterSource

from .alignment import (
    compute_alignment,
    read_records_csv,
    records_csv_text,
    role_density,
    write_density_csv,
    write_records_csv,
)
from .corpus import filter_min_messages, load_corpus, parse_corpus, serialize_corpus, summarize
from .embedding import (
    EmbeddingStore,
    HashingTextEmbedder,
    build_store,
    corpus_text_items,
    http_embed,
    read_store,
    write_store,
)
from .errors import CorpusError, ScaffoldAlignError
from .lmm import build_design, comparison_report, fit_lmm, fit_report, lrt
from .simulate import SimulationConfig, generate_corpus
from .temporal import smooth_trajectory, write_trajectory_csv

ANCHOR_ROLES = [("problem", "tutor"), ("problem", "student"), ("solution", "tutor"), ("solution", "student")]


def _atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_text(path: str | Path, text: str) -> None:
    _atomic_write_bytes(path, text.encode("utf-8"))


def _atomic_write_json(path: str | Path, obj) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def _apply_config(ctx: click.Context, merged: dict) -> dict:
    """Overlay config-file values onto params the user left at default."""
    config_path = merged.pop("config", None)
    if not config_path:
        return merged
    try:
        raw = Path(config_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read config file {config_path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"config file {config_path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise CorpusError(f"config file {config_path} must hold a JSON object")
    for key, value in data.items():
        if key not in merged:
            raise CorpusError(f"unknown config key {key!r} for command {ctx.command.name!r}")
        if ctx.get_parameter_source(key) in (ParameterSource.DEFAULT, ParameterSource.DEFAULT_MAP):
            merged[key] = value
    return merged


def _parse_models(value) -> list[int]:
    if isinstance(value, str):
        parts = [p for p in value.replace(" ", "").split(",") if p]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise CorpusError(f"cannot parse models selection {value!r}")
    try:
        models = sorted({int(p) for p in parts})
    except (TypeError, ValueError) as exc:
        raise CorpusError(f"cannot parse models selection {value!r}") from exc
    if not models or any(m not in (0, 1, 2, 3) for m in models):
        raise CorpusError(f"models must be a non-empty subset of 0,1,2,3, got {value!r}")
    return models


def _parse_range(value) -> tuple[float, float]:
    if isinstance(value, str):
        parts = [p for p in value.replace(" ", "").split(",") if p]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise CorpusError(f"cannot parse histogram range {value!r}")
    if len(parts) != 2:
        raise CorpusError(f"histogram range needs exactly two values, got {value!r}")
    try:
        low, high = float(parts[0]), float(parts[1])
    except (TypeError, ValueError) as exc:
        raise CorpusError(f"cannot parse histogram range {value!r}") from exc
    if not low < high:
        raise CorpusError(f"histogram range low must be < high, got {value!r}")
    return low, high


def _load_filtered_corpus(corpus_path: str, min_messages: int):
    corpus = load_corpus(corpus_path)
    if min_messages > 1:
        corpus = filter_min_messages(corpus, min_messages)
    if not corpus.dialogues:
        raise CorpusError("no dialogues left after filtering")
    return corpus


def _build_provider_store(corpus, provider: str, dim: int, store_path, endpoint, batch_size: int) -> EmbeddingStore:
    if provider == "deterministic":
        embedder = HashingTextEmbedder(dim=dim)
        return build_store(corpus, embedder.embed, dim=dim)
    if provider == "store":
        if not store_path:
            raise CorpusError("provider 'store' requires --store PATH")
        return read_store(store_path)
    if provider == "http":
        if not endpoint:
            raise CorpusError("provider 'http' requires --endpoint URL")
        items = list(corpus_text_items(corpus))
        vectors = http_embed(endpoint, [text for _, text in items], batch_size=batch_size)
        store = EmbeddingStore(dim=int(vectors[0].shape[0]))
        for (key, _), vec in zip(items, vectors):
            store.put(key, vec)
        return store
    raise CorpusError(f"unknown provider {provider!r}")


def _store_bytes(store: EmbeddingStore) -> bytes:
    buf = io.BytesIO()
    write_store(store, buf)
    return buf.getvalue()


def _toy_corpus_text() -> str:
    return (resources.files("scaffold_align") / "data" / "toy_corpus.jsonl").read_text(encoding="utf-8")


def _provider_options(fn):
    fn = click.option("--provider", type=click.Choice(["deterministic", "store", "http"]),
                      default="deterministic", show_default=True,
                      help="Embedding source for corpus texts.")(fn)
    fn = click.option("--dim", type=int, default=384, show_default=True,
                      help="Vector width for the deterministic provider.")(fn)
    fn = click.option("--store", "store_path", type=str, default=None,
                      help="EMB1 store path (provider 'store').")(fn)
    fn = click.option("--endpoint", type=str, default=None,
                      help="Embedding service URL (provider 'http').")(fn)
    fn = click.option("--batch-size", type=int, default=64, show_default=True,
                      help="Texts per HTTP request (provider 'http').")(fn)
    return fn


def _config_option(fn):
    return click.option("--config", type=str, default=None,
                        help="JSON config file; explicit flags take precedence.")(fn)


@click.group(name="scaffold-align")
@click.version_option(package_name="scaffold-align")
def cli() -> None:
    """Alignment analytics for tutoring dialogues."""


@cli.command("summarize")
@click.option("--corpus", "corpus_path", type=str, required=True, help="Corpus JSONL path.")
@click.option("--out", "out_path", type=str, default=None, help="Summary JSON path (default: stdout).")
@click.option("--min-messages", type=int, default=1, show_default=True,
              help="Drop dialogues with fewer messages before summarizing.")
@_config_option
@click.pass_context
def cmd_summarize(ctx: click.Context, **params) -> None:
    """Write descriptive statistics for a corpus."""
    p = _apply_config(ctx, params)
    corpus = _load_filtered_corpus(p["corpus_path"], p["min_messages"])
    payload = summarize(corpus).to_dict()
    if p["out_path"]:
        _atomic_write_json(p["out_path"], payload)
        click.echo(f"wrote {p['out_path']}")
    else:
        click.echo(json.dumps(payload, indent=2))


@cli.command("align")
@click.option("--corpus", "corpus_path", type=str, required=True, help="Corpus JSONL path.")
@click.option("--out", "out_path", type=str, required=True, help="Alignment records CSV path.")
@click.option("--min-messages", type=int, default=1, show_default=True)
@_provider_options
@_config_option
@click.pass_context
def cmd_align(ctx: click.Context, **params) -> None:
    """Compute per-message alignment records and write them as CSV."""
    p = _apply_config(ctx, params)
    corpus = _load_filtered_corpus(p["corpus_path"], p["min_messages"])
    store = _build_provider_store(corpus, p["provider"], p["dim"], p["store_path"], p["endpoint"], p["batch_size"])
    records = compute_alignment(corpus, store)
    _atomic_write_text(p["out_path"], records_csv_text(records))
    click.echo(f"wrote {p['out_path']} ({len(records)} records)")


@cli.command("analyze")
@click.option("--corpus", "corpus_path", type=str, default=None,
              help="Corpus JSONL path (required unless --records is given).")
@click.option("--records", "records_path", type=str, default=None,
              help="Existing alignment CSV to reuse instead of embedding the corpus.")
@click.option("--out-dir", type=str, required=True, help="Directory for all reports.")
@click.option("--models", type=str, default="0,1,2,3", show_default=True,
              help="Comma-separated subset of models 0-3 to fit.")
@click.option("--bandwidth", type=float, default=0.05, show_default=True)
@click.option("--grid-points", type=int, default=101, show_default=True)
@click.option("--bins", type=int, default=50, show_default=True)
@click.option("--range", "hist_range", type=str, default="-0.2,1.0", show_default=True,
              help="Histogram range as LOW,HIGH.")
@click.option("--min-messages", type=int, default=1, show_default=True)
@_provider_options
@_config_option
@click.pass_context
def cmd_analyze(ctx: click.Context, **params) -> None:
    """Fit the model ladder and write trajectory/density/fit reports."""
    p = _apply_config(ctx, params)
    models = _parse_models(p["models"])
    hist_range = _parse_range(p["hist_range"])
    out_dir = Path(p["out_dir"])

    if p["records_path"]:
        records = read_records_csv(p["records_path"])
    else:
        if not p["corpus_path"]:
            raise CorpusError("analyze needs --corpus when --records is not given")
        corpus = _load_filtered_corpus(p["corpus_path"], p["min_messages"])
        store = _build_provider_store(
            corpus, p["provider"], p["dim"], p["store_path"], p["endpoint"], p["batch_size"]
        )
        records = compute_alignment(corpus, store)
        _atomic_write_text(out_dir / "records.csv", records_csv_text(records))
    if not records:
        raise CorpusError("no alignment records to analyze")

    for anchor, role in ANCHOR_ROLES:
        curve = smooth_trajectory(
            records, anchor=anchor, role_filter=role,
            bandwidth=p["bandwidth"], grid_points=p["grid_points"],
        )
        buf = io.StringIO()
        write_trajectory_csv(curve, buf)
        _atomic_write_text(out_dir / f"trajectory_{anchor}_{role}.csv", buf.getvalue())

        hist = role_density(records, anchor=anchor, role=role, bins=p["bins"], value_range=hist_range)
        buf = io.StringIO()
        write_density_csv(hist, buf)
        _atomic_write_text(out_dir / f"density_{anchor}_{role}.csv", buf.getvalue())

    fits = {}
    for model_id in models:
        design = build_design(records, model_id)
        fit = fit_lmm(design)
        fits[model_id] = fit
        _atomic_write_json(out_dir / f"fit_model_{model_id}.json", fit_report(fit, design))

    for reduced_id, full_id in zip(models, models[1:]):
        result = lrt(fits[full_id], fits[reduced_id])
        _atomic_write_json(
            out_dir / f"comparison_model_{full_id}_vs_{reduced_id}.json",
            comparison_report(result, full_id, reduced_id),
        )

    click.echo(f"wrote reports for models {models} to {out_dir}")


@cli.command("simulate")
@click.option("--seed", type=int, required=True, help="PRNG seed; same seed, same corpus.")
@click.option("--out", "out_path", type=str, required=True, help="Synthetic corpus JSONL path.")
@click.option("--truth-out", type=str, default=None,
              help="Ground-truth JSON path (default: OUT.truth.json).")
@click.option("--dialogues", type=int, default=SimulationConfig.n_dialogues, show_default=True)
@click.option("--tutors", type=int, default=SimulationConfig.n_tutors, show_default=True)
@click.option("--base-length", type=int, default=SimulationConfig.base_length, show_default=True)
@click.option("--length-jitter", type=int, default=SimulationConfig.length_jitter, show_default=True)
@click.option("--tutor-spread", type=int, default=SimulationConfig.tutor_spread, show_default=True,
              help="Per-tutor dialogue-length offset range; 0 plants no tutor variance.")
@click.option("--slope-problem-tutor", type=float, default=SimulationConfig.slope_problem_tutor, show_default=True)
@click.option("--slope-problem-student", type=float, default=SimulationConfig.slope_problem_student, show_default=True)
@click.option("--slope-solution-tutor", type=float, default=SimulationConfig.slope_solution_tutor, show_default=True)
@click.option("--slope-solution-student", type=float, default=SimulationConfig.slope_solution_student, show_default=True)
@_config_option
@click.pass_context
def cmd_simulate(ctx: click.Context, **params) -> None:
    """Generate a synthetic corpus with known planted effects."""
    p = _apply_config(ctx, params)
    config = SimulationConfig(
        seed=p["seed"],
        n_dialogues=p["dialogues"],
        n_tutors=p["tutors"],
        base_length=p["base_length"],
        length_jitter=p["length_jitter"],
        tutor_spread=p["tutor_spread"],
        slope_problem_tutor=p["slope_problem_tutor"],
        slope_problem_student=p["slope_problem_student"],
        slope_solution_tutor=p["slope_solution_tutor"],
        slope_solution_student=p["slope_solution_student"],
    )
    corpus, truth = generate_corpus(config)
    _atomic_write_text(p["out_path"], serialize_corpus(corpus))
    truth_path = p["truth_out"] or f"{p['out_path']}.truth.json"
    _atomic_write_json(truth_path, truth.to_dict())
    click.echo(f"wrote {p['out_path']} ({len(corpus.dialogues)} dialogues, "
               f"{corpus.message_count} messages) and {truth_path}")


@cli.command("export-golden")
@click.option("--out-dir", type=str, required=True, help="Directory for the golden artifacts.")
@click.option("--dim", type=int, default=384, show_default=True)
@_config_option
@click.pass_context
def cmd_export_golden(ctx: click.Context, **params) -> None:
    """Write the deterministic reference artifacts for the bundled toy corpus."""
    p = _apply_config(ctx, params)
    out_dir = Path(p["out_dir"])
    corpus = parse_corpus(_toy_corpus_text())
    embedder = HashingTextEmbedder(dim=p["dim"])
    store = build_store(corpus, embedder.embed, dim=p["dim"])
    records = compute_alignment(corpus, store)

    _atomic_write_text(out_dir / "corpus.jsonl", serialize_corpus(corpus))
    _atomic_write_bytes(out_dir / "store.emb", _store_bytes(store))
    _atomic_write_text(out_dir / "records.csv", records_csv_text(records))
    _atomic_write_json(out_dir / "summary.json", summarize(corpus).to_dict())
    click.echo(f"wrote golden artifacts to {out_dir}")


def main(argv=None) -> int:
    """Console entry point with the stable exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except ScaffoldAlignError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 130
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
