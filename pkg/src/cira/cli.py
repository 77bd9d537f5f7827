"""Command-line entry point orchestrating the analysis pipeline.

Subcommands: analyze, train, evaluate, classify, serve. Every mutating
command writes a ``manifest.json`` beside its reports recording the
command, arguments, seeds, and input fingerprints, which is enough to
replay the run. Exit codes are stable: 0 success, 1 usage error, 2 data
error, 3 internal error.
"""

from __future__ import annotations

import datetime as _dt
import json
import sys
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .corpus import (ALL_CATEGORIES, category_distribution, corpus_fingerprint,
                     load_corpus, undersample)
from .errors import CiraError, DataError
from .evaluation import compare, comparison_to_text, cross_validate, report_to_csv
from .lexicon import af_table, default_lexicon, load_lexicon
from .systems import make_system
from .subword import WordPieceTokenizer

COVERAGE_LENGTHS = (64, 128, 256, 384, 512)


def _write_manifest(out_dir: Path, command: str, arguments: dict,
                    seeds: dict, inputs: dict, started: str) -> None:
    manifest = {
        "command": command,
        "arguments": arguments,
        "seeds": seeds,
        "inputs": inputs,
        "tool_version": __version__,
        "started_at": started,
        "finished_at": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def _load(corpus_path: str, corpus_format: str):
    return load_corpus(corpus_path, format=corpus_format)


def _maybe_balance(dataset, auto_balance: bool, seed: int):
    causal, non_causal = dataset.class_ids()
    if len(causal) == len(non_causal):
        return dataset
    if not auto_balance:
        raise DataError(
            f"corpus is unbalanced ({len(causal)} causal vs "
            f"{len(non_causal)} non-causal); pass --auto-balance to "
            f"undersample"
        )
    return undersample(dataset, seed)


@click.group()
@click.version_option(version=__version__, prog_name="cira")
def cli():
    """Causality detection workbench for requirements text."""


@cli.command("analyze")
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "corpus_format",
              type=click.Choice(["jsonl", "csv"]), default="jsonl")
@click.option("--lexicon", "lexicon_path",
              type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out-dir", required=True,
              type=click.Path(file_okay=False, path_type=Path))
def cmd_analyze(corpus_path, corpus_format, lexicon_path, out_dir: Path):
    """Distribution report, ambiguity-factor table, and token-length
    coverage for a labeled corpus."""
    started = _now()
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = _load(corpus_path, corpus_format)
    lexicon = load_lexicon(lexicon_path) if lexicon_path else default_lexicon()

    lines = ["category,label,count,proportion"]
    for category in ALL_CATEGORIES:
        try:
            distribution = category_distribution(dataset, category)
        except DataError:
            continue
        for label, (count, proportion) in distribution.items():
            lines.append(f"{category},{label},{count},{proportion:.6f}")
    (out_dir / "distribution.csv").write_text("\n".join(lines) + "\n")

    stats = af_table(dataset, lexicon)
    af_lines = ["phrase,grammatical_type,relation_group,causal,not_causal,"
                "af,non_ambiguous"]
    for stat in stats:
        entry = stat.entry
        af = f"{stat.af:.2f}" if stat.defined else "undefined"
        af_lines.append(
            f"\"{entry.phrase}\",{entry.grammatical_type},"
            f"{entry.relation_group or ''},{stat.causal_count},"
            f"{stat.non_causal_count},{af},{int(stat.non_ambiguous)}"
        )
    (out_dir / "af_table.csv").write_text("\n".join(af_lines) + "\n")

    texts = [s.text for s in dataset.sentences]
    tokenizer = WordPieceTokenizer.train(texts)
    from .features import token_length_coverage
    coverage_lines = ["max_len,coverage"]
    for length in COVERAGE_LENGTHS:
        coverage_lines.append(
            f"{length},{token_length_coverage(texts, tokenizer, length):.6f}"
        )
    (out_dir / "length_coverage.csv").write_text(
        "\n".join(coverage_lines) + "\n")

    _write_manifest(
        out_dir, "analyze",
        {"corpus": corpus_path, "format": corpus_format,
         "lexicon": lexicon_path},
        {}, {"corpus": corpus_fingerprint(corpus_path)}, started,
    )
    click.echo(f"reports written to {out_dir}")


@cli.command("train")
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "corpus_format",
              type=click.Choice(["jsonl", "csv"]), default="jsonl")
@click.option("--system", "system_name", required=True)
@click.option("--seed", type=int, default=0)
@click.option("--grid", "grid_path",
              type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--test-fraction", type=float, default=0.1)
@click.option("--folds", type=int, default=10)
@click.option("--auto-balance", is_flag=True, default=False)
@click.option("--encoder-checkpoint", default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--out-dir", required=True,
              type=click.Path(file_okay=False, path_type=Path))
def cmd_train(corpus_path, corpus_format, system_name, seed, grid_path,
              test_fraction, folds, auto_balance, encoder_checkpoint,
              epochs, out_dir: Path):
    """Fit one system and save its model artifact."""
    from .corpus import split as split_dataset

    started = _now()
    out_dir.mkdir(parents=True, exist_ok=True)
    if system_name in ("rule", "dummy_causal", "dummy_not_causal"):
        raise DataError(f"system {system_name!r} has no trainable parameters")
    dataset = _load(corpus_path, corpus_format)
    dataset = _maybe_balance(dataset, auto_balance, seed)
    grid = None
    if grid_path:
        from .shallow import load_grid_file
        grid = load_grid_file(grid_path)
    try:
        system = make_system(system_name, grid=grid,
                             encoder_checkpoint=encoder_checkpoint,
                             epochs=epochs)
    except DataError as e:
        raise click.UsageError(str(e)) from None
    parts = split_dataset(dataset, test_fraction=test_fraction, k=folds,
                          seed=seed)
    system.fit(parts.folds, seed)

    artifact: dict = {"system": system_name,
                      "best_hyperparameters": system.best_hyperparameters}
    if system_name.startswith("transformer:"):
        from .transformer import save_model
        checkpoint_dir = out_dir / "checkpoint"
        save_model(system.model, checkpoint_dir, training_data=dataset)
        artifact["checkpoint"] = str(checkpoint_dir)
        artifact["variant"] = system.config.variant
        artifact["max_len"] = system.config.max_len
    else:
        import joblib
        from .shallow import grid_results_csv
        model_path = out_dir / "model.joblib"
        joblib.dump(system._model, model_path)
        artifact["model"] = str(model_path)
        if system.grid_result is not None:
            (out_dir / "grid_results.csv").write_text(
                grid_results_csv(system.grid_result))
    (out_dir / "artifact.json").write_text(json.dumps(artifact, indent=2,
                                                      default=str))

    inputs = {"corpus": corpus_fingerprint(corpus_path)}
    if grid_path:
        inputs["grid"] = corpus_fingerprint(grid_path)
    _write_manifest(
        out_dir, "train",
        {"corpus": corpus_path, "format": corpus_format,
         "system": system_name, "test_fraction": test_fraction,
         "folds": folds, "auto_balance": auto_balance,
         "encoder_checkpoint": encoder_checkpoint, "epochs": epochs},
        {"seed": seed}, inputs, started,
    )
    click.echo(f"artifact written to {out_dir}")


@cli.command("evaluate")
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "corpus_format",
              type=click.Choice(["jsonl", "csv"]), default="jsonl")
@click.option("--system", "system_names", required=True, multiple=True)
@click.option("--seed", type=int, default=0)
@click.option("--grid", "grid_path",
              type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--test-fraction", type=float, default=0.1)
@click.option("--folds", type=int, default=10)
@click.option("--repetitions", type=int, default=5)
@click.option("--auto-balance", is_flag=True, default=False)
@click.option("--encoder-checkpoint", default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--out-dir", required=True,
              type=click.Path(file_okay=False, path_type=Path))
def cmd_evaluate(corpus_path, corpus_format, system_names, seed, grid_path,
                 test_fraction, folds, repetitions, auto_balance,
                 encoder_checkpoint, epochs, out_dir: Path):
    """Cross-validated comparison of one or more systems."""
    started = _now()
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = _load(corpus_path, corpus_format)
    dataset = _maybe_balance(dataset, auto_balance, seed)
    grid = None
    if grid_path:
        from .shallow import load_grid_file
        grid = load_grid_file(grid_path)

    rows = []
    for name in system_names:
        try:
            system = make_system(name, grid=grid,
                                 encoder_checkpoint=encoder_checkpoint,
                                 epochs=epochs)
        except DataError as e:
            raise click.UsageError(str(e)) from None
        click.echo(f"evaluating {name} ...")
        rows.append(cross_validate(
            system, dataset, k=folds, repetitions=repetitions, seed=seed,
            test_fraction=test_fraction,
        ))
    (out_dir / "evaluation.csv").write_text(report_to_csv(rows))
    if len(rows) >= 2:
        comparison = compare(rows)
        (out_dir / "comparison.txt").write_text(comparison_to_text(comparison))
        click.echo(comparison_to_text(comparison))

    inputs = {"corpus": corpus_fingerprint(corpus_path)}
    if grid_path:
        inputs["grid"] = corpus_fingerprint(grid_path)
    _write_manifest(
        out_dir, "evaluate",
        {"corpus": corpus_path, "format": corpus_format,
         "systems": list(system_names), "test_fraction": test_fraction,
         "folds": folds, "repetitions": repetitions,
         "auto_balance": auto_balance},
        {"seed": seed}, inputs, started,
    )
    click.echo(f"reports written to {out_dir}")


@cli.command("classify")
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--input", "input_path", type=click.Path(), default="-")
@click.option("--lexicon", "lexicon_path",
              type=click.Path(exists=True, dir_okay=False), default=None)
def cmd_classify(model_path, input_path, lexicon_path):
    """Label sentences from a file or standard input, one JSON object per
    line, in input order."""
    from .lexicon import build_matcher

    model_path = Path(model_path)
    if not model_path.exists():
        raise DataError(f"model artifact not found: {model_path}")
    lexicon = load_lexicon(lexicon_path) if lexicon_path else default_lexicon()
    matcher = build_matcher(lexicon)

    if model_path.is_dir():
        from .transformer import load_model
        model = load_model(model_path)

        def classify_batch(lines):
            return [
                ("causal" if p_causal > p_not else "not_causal", p_causal)
                for p_causal, p_not in model.predict_proba(lines)
            ]
    else:
        import joblib
        from .shallow import predict_texts
        shallow_model = joblib.load(model_path)

        def classify_batch(lines):
            labels = predict_texts(shallow_model, lines)
            return [("causal" if y == 1 else "not_causal", None)
                    for y in labels]

    stream = sys.stdin if input_path == "-" else open(input_path, "r",
                                                      encoding="utf-8")
    try:
        lines = [line.rstrip("\n") for line in stream if line.strip()]
    finally:
        if stream is not sys.stdin:
            stream.close()
    results = classify_batch(lines) if lines else []
    for text, (label, p_causal) in zip(lines, results):
        click.echo(json.dumps({
            "text": text,
            "label": label,
            "p_causal": p_causal,
            "cues": sorted({entry.phrase for entry, _ in matcher.match(text)}),
        }, ensure_ascii=False))


@cli.command("serve")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def cmd_serve(config_path):
    """Run the annotation/classification HTTP service."""
    import uvicorn

    from .service import build_app, load_config

    config = load_config(config_path)
    app = build_app(config)
    uvicorn.run(app, host=config.host, port=config.port)


def main(argv: Optional[list[str]] = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as e:
        return int(e.exit_code)
    except click.UsageError as e:
        e.show(file=sys.stderr)
        return 1
    except click.ClickException as e:
        e.show(file=sys.stderr)
        return 1
    except click.Abort:
        return 1
    except DataError as e:
        click.echo(f"data error: {e}", err=True)
        return 2
    except CiraError as e:
        click.echo(f"error: {e}", err=True)
        return 3
    except Exception as e:  # pragma: no cover - defensive
        click.echo(f"internal error: {type(e).__name__}: {e}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
