// Thin typed client over the verification service HTTP API. All network
// traffic of the UI flows through this module.

import type {
  BiblioMetadata,
  DocumentSummary,
  VerificationRecord,
  VerifyRequestBody,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly stage?: string;
  readonly fields?: string[];

  constructor(status: number, message: string, stage?: string, fields?: string[]) {
    super(message);
    this.status = status;
    this.stage = stage;
    this.fields = fields;
  }
}

export class ConnectionError extends Error {}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let message = `request failed with status ${response.status}`;
  let stage: string | undefined;
  let fields: string[] | undefined;
  try {
    const body = await response.json();
    if (typeof body.error === "string") message = body.error;
    if (typeof body.stage === "string") stage = body.stage;
    if (Array.isArray(body.fields)) fields = body.fields;
  } catch {
    // non-JSON error body; keep the status message
  }
  throw new ApiError(response.status, message, stage, fields);
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new ConnectionError(`cannot reach the verification service: ${err}`);
    }
    await raiseForStatus(response);
    return response;
  }

  async health(): Promise<{ status: string; version: string }> {
    return (await this.request("/health")).json();
  }

  async getConfig(): Promise<Record<string, unknown>> {
    return (await this.request("/config")).json();
  }

  async uploadDocument(file: File, metadata?: BiblioMetadata): Promise<DocumentSummary> {
    const form = new FormData();
    form.append("file", file);
    if (metadata) form.append("metadata", JSON.stringify(metadata));
    return (await this.request("/documents", { method: "POST", body: form })).json();
  }

  async addDocumentByUrl(url: string, metadata?: BiblioMetadata): Promise<DocumentSummary> {
    return (
      await this.request("/documents", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ url, metadata }),
      })
    ).json();
  }

  async verify(body: VerifyRequestBody): Promise<VerificationRecord> {
    return (
      await this.request("/verify", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      })
    ).json();
  }

  async getVerification(id: string): Promise<VerificationRecord> {
    return (await this.request(`/verifications/${id}`)).json();
  }

  // Raw markdown bytes; the caller must pass them through unchanged.
  async fetchMarkdown(id: string): Promise<Blob> {
    return (await this.request(`/verifications/${id}/markdown`)).blob();
  }
}
