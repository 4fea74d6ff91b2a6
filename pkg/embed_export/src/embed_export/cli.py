"""Command-line front end: ``embed-export export --corpus ... --out ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from .encoders import DEFAULT_MODEL
from .errors import ExportError
from .export import ExportJob, export


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Embed every text of a corpus JSONL into an EMB1 vector store.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("export", help="run one export job")
    run.add_argument("--corpus", required=True, help="corpus JSONL path")
    run.add_argument("--out", required=True, help="output EMB1 store path")
    run.add_argument("--model", default=DEFAULT_MODEL,
                     help=f"model name (default: {DEFAULT_MODEL}); "
                          "debug-hash-N selects the offline stub encoder")
    run.add_argument("--batch-size", type=int, default=64)
    run.add_argument("--device", default=None,
                     help="inference device hint, e.g. cpu or cuda")
    run.add_argument("--quiet", action="store_true", help="suppress progress logging")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        export(ExportJob(
            corpus_path=args.corpus,
            output_path=args.out,
            model_name=args.model,
            batch_size=args.batch_size,
            device=args.device,
        ))
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
