"""Command-line interface.

Subcommands: ingest, verify, evaluate, serve, export. Exit codes: 0 on
success, 1 on pipeline/data errors, 2 on usage errors (argparse default).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from citecheck import __version__
from citecheck.config import ConfigError, PipelineConfig
from citecheck.export import export_markdown
from citecheck.ingest import BiblioMetadata, IngestError
from citecheck.llm_gateway import ProviderError
from citecheck.metrics import RecordsFileError, evaluate_dataset, load_records, render_table
from citecheck.pipeline import Pipeline, PipelineError, RequestShapeError, VerificationRequest
from citecheck.verifier import VerificationResult

logger = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citecheck",
        description="Verify citation claims against their reference documents.",
    )
    parser.add_argument("--version", action="version", version=f"citecheck {__version__}")
    parser.add_argument("--config", help="path to a JSON config file")
    parser.add_argument("--store-dir", help="override the store directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="ingest a reference document from a path or URL")
    p_ingest.add_argument("source", help="file path or http(s) URL")
    p_ingest.add_argument("--metadata", help="path to a JSON metadata file")
    p_ingest.add_argument("--format", choices=["pdf", "txt", "markdown"], help="format hint")

    p_verify = sub.add_parser("verify", help="verify a citation against a document")
    p_verify.add_argument("--citation", required=True, help="the citation sentence to verify")
    p_verify.add_argument("--doc", required=True, help="document id, file path, or URL")
    p_verify.add_argument("--metadata", help="path to a JSON metadata file")
    p_verify.add_argument("--out", choices=["md", "json"], default="json", help="output format")

    p_eval = sub.add_parser("evaluate", help="score a labeled records file")
    p_eval.add_argument("--records", required=True, help="line-delimited JSON records file")
    p_eval.add_argument("--out", choices=["table", "json"], default="table")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8100)

    p_export = sub.add_parser("export", help="export a stored verification as markdown")
    p_export.add_argument("--id", required=True, dest="verification_id")
    p_export.add_argument("--out", required=True, help="output file path")

    return parser


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    path = args.config or os.environ.get("CITECHECK_CONFIG")
    flags = {}
    if args.store_dir:
        flags["store_dir"] = args.store_dir
    return PipelineConfig.load(path, flag_overrides=flags)


def _load_metadata(path: str | None) -> BiblioMetadata | None:
    if not path:
        return None
    with open(path, encoding="utf-8") as fh:
        return BiblioMetadata.from_dict(json.load(fh))


def _cmd_ingest(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    pipeline = Pipeline(cfg)
    doc = pipeline.ingest(args.source, format_hint=args.format, metadata=_load_metadata(args.metadata))
    print(json.dumps({
        "doc_id": doc.doc_id,
        "format": doc.format,
        "chars": len(doc.text),
        "abstract_only": doc.abstract_only,
    }))
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    pipeline = Pipeline(cfg)
    doc_id = args.doc if args.doc in pipeline.documents else None
    request = VerificationRequest(
        citation=args.citation,
        doc_id=doc_id,
        source=None if doc_id else args.doc,
        metadata=_load_metadata(args.metadata),
    )
    verification_id, result = pipeline.run(request)
    if args.out == "md":
        sys.stdout.write(export_markdown(result, verification_id))
    else:
        print(json.dumps(pipeline.verifications.get(verification_id), indent=2))
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    records = load_records(args.records)
    report = evaluate_dataset(records)
    if args.out == "json":
        print(json.dumps(report.to_dict(), indent=2))
    else:
        sys.stdout.write(render_table(report))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from citecheck.service import serve

    cfg = _load_config(args)
    serve(cfg, host=args.host, port=args.port)
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    pipeline = Pipeline(cfg)
    record = pipeline.verifications.get(args.verification_id)
    result = VerificationResult.from_dict(record["result"])
    Path(args.out).write_bytes(export_markdown(result, args.verification_id).encode("utf-8"))
    print(f"wrote {args.out}")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "verify": _cmd_verify,
    "evaluate": _cmd_evaluate,
    "serve": _cmd_serve,
    "export": _cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (PipelineError, IngestError, ProviderError, RequestShapeError,
            RecordsFileError, ConfigError, KeyError, FileNotFoundError, ValueError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
