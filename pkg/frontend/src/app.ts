// Application shell: form wiring, the submit -> render loop, markdown
// export, provider settings, and session history.

import { ApiClient, ApiError, ConnectionError } from "./api.js";
import { SessionHistory } from "./history.js";
import { loadOverrides, resetToServerDefaults, saveOverrides } from "./settings.js";
import type { VerificationRecord, VerifyRequestBody } from "./types.js";
import { renderVerification } from "./view.js";

export type DownloadFn = (filename: string, blob: Blob) => void;

function defaultDownload(filename: string, blob: Blob): void {
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export class App {
  readonly history = new SessionHistory();
  private inFlight = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly download: DownloadFn = defaultDownload,
    private readonly storage: Storage = sessionStorage,
  ) {
    this.root.innerHTML = this.template();
    this.bind();
  }

  private template(): string {
    return `
      <div class="layout">
        <main>
          <h1>citecheck</h1>
          <p class="tagline">Verify a citation sentence against its reference document.</p>
          <form id="verify-form" novalidate>
            <label for="citation">Citation sentence</label>
            <textarea id="citation" rows="3"
              placeholder="Smith et al. (2020) found that exercise reduces cardiovascular risk by 30%"></textarea>
            <div id="citation-error" class="field-error" hidden></div>

            <fieldset id="source-mode">
              <legend>Reference document</legend>
              <label><input type="radio" name="mode" value="file" checked> Upload file</label>
              <label><input type="radio" name="mode" value="url"> Download from URL</label>
              <label><input type="radio" name="mode" value="doc"> Existing document id</label>
            </fieldset>
            <input type="file" id="source-file" accept=".pdf,.txt,.md,.markdown">
            <input type="url" id="source-url" placeholder="https://example.org/paper.pdf" hidden>
            <input type="text" id="source-doc" placeholder="doc-0123abcd4567" hidden>
            <div id="source-error" class="field-error" hidden></div>

            <button type="submit" id="submit">Verify</button>
          </form>
          <div id="banner" class="banner" hidden></div>
          <section id="result"></section>
          <section id="history-section">
            <h2>Session history</h2>
            <div id="history"></div>
          </section>
        </main>
        <aside id="sidebar">
          <h2>Providers</h2>
          <p class="note">API keys are configured on the server only and are never entered
          in the browser.</p>
          <label for="override-reranker">Reranker</label>
          <select id="override-reranker">
            <option value="">server default</option>
            <option value="lexical">lexical (offline)</option>
            <option value="remote">remote cross-encoder</option>
          </select>
          <label for="override-embedding">Embedding model</label>
          <input type="text" id="override-embedding" placeholder="server default">
          <label for="override-chat">Chat model</label>
          <input type="text" id="override-chat" placeholder="server default">
          <button type="button" id="reset-overrides">Reset to server defaults</button>
        </aside>
      </div>`;
  }

  private query<T extends HTMLElement>(selector: string): T {
    const node = this.root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  }

  private bind(): void {
    const form = this.query<HTMLFormElement>("#verify-form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitVerification();
    });

    for (const radio of this.root.querySelectorAll<HTMLInputElement>('input[name="mode"]')) {
      radio.addEventListener("change", () => this.updateSourceVisibility());
    }

    const sidebarInputs = ["#override-reranker", "#override-embedding", "#override-chat"];
    for (const selector of sidebarInputs) {
      this.query<HTMLElement>(selector).addEventListener("change", () => this.persistOverrides());
    }
    this.query<HTMLButtonElement>("#reset-overrides").addEventListener("click", () => {
      void this.resetOverrides();
    });
    this.restoreOverrides();
  }

  private updateSourceVisibility(): void {
    const mode = this.sourceMode();
    this.query<HTMLInputElement>("#source-file").hidden = mode !== "file";
    this.query<HTMLInputElement>("#source-url").hidden = mode !== "url";
    this.query<HTMLInputElement>("#source-doc").hidden = mode !== "doc";
  }

  private sourceMode(): string {
    const checked = this.root.querySelector<HTMLInputElement>('input[name="mode"]:checked');
    return checked ? checked.value : "file";
  }

  // --- provider overrides ---------------------------------------------

  currentOverrides(): Record<string, unknown> {
    const overrides: Record<string, unknown> = {};
    const reranker = this.query<HTMLSelectElement>("#override-reranker").value;
    if (reranker) overrides.reranker = { type: reranker };
    const embedding = this.query<HTMLInputElement>("#override-embedding").value.trim();
    if (embedding) overrides.embedding = { model: embedding };
    const chat = this.query<HTMLInputElement>("#override-chat").value.trim();
    if (chat) overrides.chat = { model: chat };
    return overrides;
  }

  private persistOverrides(): void {
    saveOverrides(this.currentOverrides(), this.storage);
  }

  private restoreOverrides(): void {
    const overrides = loadOverrides(this.storage) as {
      reranker?: { type?: string };
      embedding?: { model?: string };
      chat?: { model?: string };
    };
    if (overrides.reranker?.type) {
      this.query<HTMLSelectElement>("#override-reranker").value = overrides.reranker.type;
    }
    if (overrides.embedding?.model) {
      this.query<HTMLInputElement>("#override-embedding").value = overrides.embedding.model;
    }
    if (overrides.chat?.model) {
      this.query<HTMLInputElement>("#override-chat").value = overrides.chat.model;
    }
  }

  private async resetOverrides(): Promise<void> {
    this.query<HTMLSelectElement>("#override-reranker").value = "";
    this.query<HTMLInputElement>("#override-embedding").value = "";
    this.query<HTMLInputElement>("#override-chat").value = "";
    try {
      await resetToServerDefaults(this.api, this.storage);
    } catch (err) {
      this.showBanner(`could not load server defaults: ${(err as Error).message}`);
    }
  }

  // --- submit flow -------------------------------------------------------

  private fieldError(selector: string, message: string | null): void {
    const node = this.query<HTMLElement>(selector);
    node.hidden = message === null;
    node.textContent = message ?? "";
  }

  private showBanner(message: string | null): void {
    const banner = this.query<HTMLElement>("#banner");
    banner.hidden = message === null;
    banner.textContent = message ?? "";
  }

  async submitVerification(): Promise<void> {
    if (this.inFlight) return;
    this.fieldError("#citation-error", null);
    this.fieldError("#source-error", null);
    this.showBanner(null);

    // Client-side validation happens before any network traffic.
    const citation = this.query<HTMLTextAreaElement>("#citation").value.trim();
    if (!citation) {
      this.fieldError("#citation-error", "Enter the citation sentence to verify.");
      return;
    }

    const mode = this.sourceMode();
    const body: VerifyRequestBody = { citation };
    const overrides = this.currentOverrides();
    if (Object.keys(overrides).length > 0) body.overrides = overrides;

    const fileInput = this.query<HTMLInputElement>("#source-file");
    const url = this.query<HTMLInputElement>("#source-url").value.trim();
    const docId = this.query<HTMLInputElement>("#source-doc").value.trim();

    const submit = this.query<HTMLButtonElement>("#submit");
    this.inFlight = true;
    submit.disabled = true;
    try {
      if (mode === "file") {
        const file = fileInput.files?.[0];
        if (!file) {
          this.fieldError("#source-error", "Choose a reference file to upload.");
          return;
        }
        const doc = await this.api.uploadDocument(file);
        body.doc_id = doc.doc_id;
      } else if (mode === "url") {
        if (!url) {
          this.fieldError("#source-error", "Enter the URL of the reference document.");
          return;
        }
        const doc = await this.api.addDocumentByUrl(url);
        body.doc_id = doc.doc_id;
      } else {
        if (!docId) {
          this.fieldError("#source-error", "Enter an existing document id.");
          return;
        }
        body.doc_id = docId;
      }

      const record = await this.api.verify(body);
      this.history.add(record);
      this.showRecord(record);
      this.renderHistory();
    } catch (err) {
      if (err instanceof ConnectionError) {
        this.showBanner(err.message);
      } else if (err instanceof ApiError) {
        const stage = err.stage ? ` (stage: ${err.stage})` : "";
        const fields = err.fields?.length ? ` [${err.fields.join(", ")}]` : "";
        this.showBanner(`verification failed: ${err.message}${stage}${fields}`);
      } else {
        this.showBanner(`unexpected error: ${(err as Error).message}`);
      }
    } finally {
      this.inFlight = false;
      submit.disabled = false;
    }
  }

  showRecord(record: VerificationRecord): void {
    const container = this.query<HTMLElement>("#result");
    container.innerHTML = "";
    container.appendChild(
      renderVerification(record, (id) => void this.exportReport(id)),
    );
  }

  private renderHistory(): void {
    const container = this.query<HTMLElement>("#history");
    container.innerHTML = "";
    container.appendChild(this.history.render((record) => this.showRecord(record)));
  }

  // Downloads the server's markdown bytes unchanged.
  async exportReport(verificationId: string): Promise<void> {
    try {
      const blob = await this.api.fetchMarkdown(verificationId);
      this.download(`${verificationId}.md`, blob);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.showBanner(`verification ${verificationId} was not found on the server`);
      } else {
        this.showBanner(`export failed: ${(err as Error).message}`);
      }
    }
  }
}
