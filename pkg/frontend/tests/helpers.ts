import fs from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import type { VerificationRecord } from "../src/types.js";

const here = path.dirname(fileURLToPath(import.meta.url));

export function goldenRecord(): VerificationRecord {
  return JSON.parse(
    fs.readFileSync(path.join(here, "fixtures", "golden_record.json"), "utf-8"),
  );
}

export function goldenReportBytes(): Uint8Array {
  return new Uint8Array(fs.readFileSync(path.join(here, "fixtures", "golden_report.md")));
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export class MemoryStorage implements Storage {
  private map = new Map<string, string>();

  get length(): number {
    return this.map.size;
  }

  clear(): void {
    this.map.clear();
  }

  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }

  key(index: number): string | null {
    return [...this.map.keys()][index] ?? null;
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
}
