"""HTTP service exposing the verification pipeline.

Endpoints: POST /documents (multipart upload or {"url": ...}),
GET /documents/{id}, POST /verify, GET /verifications/{id},
GET /verifications/{id}/markdown, GET /health, GET /config.
Request-shape problems return 400 with the offending field named; API
keys never appear in any response.
"""

from __future__ import annotations

import json
import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from citecheck import __version__
from citecheck.claims import PreprocessError
from citecheck.config import PipelineConfig
from citecheck.ingest import BiblioMetadata, FetchError, FormatError, IngestError
from citecheck.llm_gateway import ProviderError
from citecheck.pipeline import Pipeline, PipelineError, RequestShapeError, VerificationRequest
from citecheck.export import export_markdown
from citecheck.verifier import VerificationResult

logger = logging.getLogger(__name__)


class VerifyBody(BaseModel):
    citation: str
    doc_id: str | None = None
    source: str | None = None
    metadata: dict | None = None
    overrides: dict | None = None


def _metadata_from_dict(data: dict | None) -> BiblioMetadata | None:
    if not data:
        return None
    return BiblioMetadata.from_dict(data)


def create_app(pipeline: Pipeline) -> FastAPI:
    app = FastAPI(title="citecheck", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        fields = [".".join(str(part) for part in err["loc"] if part != "body") for err in exc.errors()]
        return JSONResponse(
            status_code=400,
            content={"error": "invalid request", "fields": fields},
        )

    @app.exception_handler(RequestShapeError)
    async def shape_handler(request: Request, exc: RequestShapeError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(KeyError)
    async def not_found_handler(request: Request, exc: KeyError):
        return JSONResponse(status_code=404, content={"error": str(exc.args[0]) if exc.args else "not found"})

    @app.exception_handler(PipelineError)
    async def pipeline_handler(request: Request, exc: PipelineError):
        if isinstance(exc.cause, KeyError):
            return JSONResponse(status_code=404, content={"error": str(exc), "stage": exc.stage})
        status = 502 if isinstance(exc.cause, (ProviderError, PreprocessError)) else 500
        return JSONResponse(status_code=status, content={"error": str(exc), "stage": exc.stage})

    @app.exception_handler(IngestError)
    async def ingest_handler(request: Request, exc: IngestError):
        status = 400 if isinstance(exc, (FormatError, FetchError)) else 500
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.get("/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.get("/config")
    async def config():
        return pipeline.cfg.redacted()

    @app.post("/documents")
    async def post_document(request: Request):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("file")
            if upload is None:
                return JSONResponse(
                    status_code=400, content={"error": "invalid request", "fields": ["file"]}
                )
            metadata = None
            if form.get("metadata"):
                metadata = _metadata_from_dict(json.loads(form["metadata"]))
            data = await upload.read()
            doc = pipeline.ingest_bytes(upload.filename, data, metadata=metadata)
        else:
            body = await request.json()
            url = body.get("url")
            if not url:
                return JSONResponse(
                    status_code=400, content={"error": "invalid request", "fields": ["url"]}
                )
            metadata = _metadata_from_dict(body.get("metadata"))
            doc = pipeline.ingest(url, format_hint=body.get("format"), metadata=metadata)
        return {
            "doc_id": doc.doc_id,
            "source": doc.source,
            "format": doc.format,
            "chars": len(doc.text),
            "abstract_only": doc.abstract_only,
        }

    @app.get("/documents/{doc_id}")
    async def get_document(doc_id: str):
        return pipeline.documents.get(doc_id).to_dict()

    @app.post("/verify")
    async def post_verify(body: VerifyBody):
        request = VerificationRequest(
            citation=body.citation,
            doc_id=body.doc_id,
            source=body.source,
            metadata=_metadata_from_dict(body.metadata),
            overrides=body.overrides,
        )
        verification_id, _ = pipeline.run(request)
        return pipeline.verifications.get(verification_id)

    @app.get("/verifications/{verification_id}")
    async def get_verification(verification_id: str):
        return pipeline.verifications.get(verification_id)

    @app.get("/verifications/{verification_id}/markdown")
    async def get_verification_markdown(verification_id: str):
        record = pipeline.verifications.get(verification_id)
        result = VerificationResult.from_dict(record["result"])
        return PlainTextResponse(
            export_markdown(result, verification_id), media_type="text/markdown"
        )

    return app


def serve(cfg: PipelineConfig, host: str = "127.0.0.1", port: int = 8100) -> None:
    """Run the HTTP service until interrupted."""
    import uvicorn

    app = create_app(Pipeline(cfg))
    uvicorn.run(app, host=host, port=port)
