// Session-local list of completed verifications, newest first, so
// successive revisions of the same citation can be compared.

import { badgeClass } from "./badges.js";
import type { VerificationRecord } from "./types.js";

export interface HistoryEntry {
  record: VerificationRecord;
  submittedAt: number;
}

export class SessionHistory {
  private entries: HistoryEntry[] = [];

  add(record: VerificationRecord, submittedAt: number = Date.now()): void {
    this.entries.unshift({ record, submittedAt });
  }

  list(): readonly HistoryEntry[] {
    return this.entries;
  }

  render(onSelect: (record: VerificationRecord) => void): HTMLElement {
    const list = document.createElement("ol");
    list.className = "history";
    for (const entry of this.entries) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.type = "button";
      button.className = "history-entry";
      const badge = document.createElement("span");
      badge.className = badgeClass(entry.record.result.label);
      badge.textContent = entry.record.result.label;
      button.appendChild(badge);
      const text = document.createElement("span");
      text.textContent = ` ${entry.record.citation.slice(0, 60)}`;
      button.appendChild(text);
      button.addEventListener("click", () => onSelect(entry.record));
      item.appendChild(button);
      list.appendChild(item);
    }
    return list;
  }
}
