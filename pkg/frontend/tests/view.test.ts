import { describe, expect, it } from "vitest";

import { renderVerification } from "../src/view.js";
import { goldenRecord } from "./helpers.js";

describe("verification view", () => {
  it("renders the verdict verbatim from the payload", () => {
    const record = goldenRecord();
    const node = renderVerification(record, () => {});

    const badge = node.querySelector(".badge")!;
    expect(badge.textContent).toBe("SUPPORTED");
    expect(badge.className).toBe("badge badge-green");

    expect(node.querySelector(".confidence")!.textContent).toContain("0.93");
    expect(node.querySelector(".guidance")!.textContent).toBe(record.result.guidance);
    expect(node.querySelector(".reasoning-summary")!.textContent).toBe(
      record.result.reasoning.summary,
    );

    const snippets = [...node.querySelectorAll(".snippet-text")];
    expect(snippets).toHaveLength(3);
    record.result.evidence.forEach((snippet, i) => {
      expect(snippets[i].textContent).toBe(snippet.text);
    });
  });

  it("echoes the request and shows chunk locations", () => {
    const record = goldenRecord();
    const node = renderVerification(record, () => {});
    expect(node.querySelector(".echo-citation")!.textContent).toContain(record.citation);
    expect(node.querySelector(".echo-doc")!.textContent).toContain(record.doc_id);
    const locations = [...node.querySelectorAll(".snippet-location")];
    expect(locations[0].textContent).toContain("chunk 1");
    expect(locations[0].textContent).toContain("relevance 0.950");
  });

  it("shows an explicit message when there is no evidence", () => {
    const record = goldenRecord();
    record.result.evidence = [];
    const node = renderVerification(record, () => {});
    expect(node.querySelector(".no-evidence")!.textContent).toBe("No evidence snippets.");
  });

  it("wires the export button to the verification id", () => {
    const record = goldenRecord();
    let exported: string | null = null;
    const node = renderVerification(record, (id) => {
      exported = id;
    });
    (node.querySelector(".export-button") as HTMLButtonElement).click();
    expect(exported).toBe(record.verification_id);
  });
});
