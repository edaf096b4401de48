// Fixed label -> color mapping for verdict badges.

import type { SupportLabel } from "./types.js";

export type BadgeColor = "green" | "amber" | "red" | "gray";

export const LABEL_COLORS: Record<SupportLabel, BadgeColor> = {
  SUPPORTED: "green",
  PARTIALLY_SUPPORTED: "amber",
  UNSUPPORTED: "red",
  UNCERTAIN: "gray",
};

export function badgeClass(label: SupportLabel): string {
  return `badge badge-${LABEL_COLORS[label]}`;
}
