/**
 * Pure presentation models, kept free of DOM and network concerns so they
 * can be unit tested in node.
 */

import type { CardPayload, CardRow, RiskReadout } from "./api.js";

export interface CardViewModel {
  cardNumber: number;
  position: "left" | "right";
  rows: CardRow[];
}

/**
 * Build the renderable model for one card.
 *
 * Every schema attribute must appear exactly once and rows are emitted in
 * schema order regardless of payload order.
 */
export function cardViewModel(
  payload: CardPayload,
  schemaOrder: string[],
  position: "left" | "right",
): CardViewModel {
  const byAttribute = new Map<string, CardRow>();
  for (const row of payload.rows) {
    if (byAttribute.has(row.attribute)) {
      throw new Error(`card ${payload.card} repeats attribute ${row.attribute}`);
    }
    byAttribute.set(row.attribute, row);
  }
  const rows = schemaOrder.map((name) => {
    const row = byAttribute.get(name);
    if (!row) {
      throw new Error(`card ${payload.card} is missing attribute ${name}`);
    }
    return row;
  });
  if (byAttribute.size !== schemaOrder.length) {
    const extras = [...byAttribute.keys()].filter(
      (k) => !schemaOrder.includes(k),
    );
    throw new Error(`card ${payload.card} has unknown attributes: ${extras}`);
  }
  return { cardNumber: payload.card, position, rows };
}

/** Display rounding for risk values: 3 decimals, scientific below 0.01. */
export function formatRisk(value: number): string {
  if (!Number.isFinite(value)) return String(value);
  if (value !== 0 && Math.abs(value) < 1e-2) return value.toExponential(2);
  return value.toFixed(3);
}

export function formatReadout(readout: RiskReadout): {
  cIdentify: string;
  alpha: string;
  fpirOpen: string;
  fpirClose: string;
} {
  return {
    cIdentify: formatRisk(readout.c_identify),
    alpha: formatRisk(readout.alpha),
    fpirOpen: formatRisk(readout.fpir_open),
    fpirClose: formatRisk(readout.fpir_close),
  };
}
