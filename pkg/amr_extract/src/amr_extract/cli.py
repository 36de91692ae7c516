"""Command-line entry point: manifest in, triplet file out."""

import argparse
import sys

from amr_extract.backend import get_backend
from amr_extract.extract import run_manifest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amr-extract",
        description="Extract predicate-ARG0-ARG1 triplets from the articles "
                    "a manifest lists and write the shared triplet file.",
    )
    parser.add_argument("--manifest", required=True,
                        help="TSV manifest: platform, domain, page, path")
    parser.add_argument("--out", required=True,
                        help="triplet file to write")
    parser.add_argument("--backend", default="stub",
                        help="parser backend name (default: stub)")
    parser.add_argument("--table", default=None,
                        help="frame table for the stub backend "
                             "(default: the bundled fixture table)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        parser_backend = get_backend(args.backend, table=args.table)
        summary = run_manifest(args.manifest, parser_backend, args.out)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"extracted {summary.n_records} triplets from {summary.n_pages} pages "
          f"({summary.n_sentences} sentences, {summary.n_parse_failures} parse "
          f"failures, {summary.n_dropped_frames} frames dropped) -> {args.out}")
    for platform, entity in summary.tie_flagged:
        print(f"type tie (curate): {platform}/{entity}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
