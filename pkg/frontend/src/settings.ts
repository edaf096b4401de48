// Provider overrides live in browser session storage and ride along with
// each verification request. API keys stay on the server (referenced by
// environment-variable name in server config); the sidebar says so.

import type { ApiClient } from "./api.js";
import type { ProviderOverrides } from "./types.js";

const STORAGE_KEY = "citecheck-overrides";

export function loadOverrides(storage: Storage = sessionStorage): ProviderOverrides {
  const raw = storage.getItem(STORAGE_KEY);
  if (!raw) return {};
  try {
    const parsed = JSON.parse(raw);
    return typeof parsed === "object" && parsed !== null ? parsed : {};
  } catch {
    return {};
  }
}

export function saveOverrides(
  overrides: ProviderOverrides,
  storage: Storage = sessionStorage,
): void {
  if (Object.keys(overrides).length === 0) {
    storage.removeItem(STORAGE_KEY);
  } else {
    storage.setItem(STORAGE_KEY, JSON.stringify(overrides));
  }
}

export async function resetToServerDefaults(
  api: ApiClient,
  storage: Storage = sessionStorage,
): Promise<Record<string, unknown>> {
  storage.removeItem(STORAGE_KEY);
  return api.getConfig();
}
