/**
 * What-if explorer state.
 *
 * Every control change issues a service query and re-renders from the
 * response; concurrent in-flight queries resolve last-issued-wins, so the
 * displayed numbers always correspond to the inputs on screen. A preset bar
 * loads the shipped use cases, and the grid view recomputes the full
 * use-case x FAR table with lower-than-reference cells flagged.
 */

import type {
  RiskReadout,
  ServiceConfig,
  SurveyApi,
  WhatIfQuery,
} from "./api.js";

export interface GridCellView {
  useCase: string;
  farExponent: number;
  readout: RiskReadout;
  flagged: boolean;
  isReference: boolean;
}

export interface WhatIfState {
  levels: Record<string, number>;
  farExponent: number; // FAR = 10^farExponent, slider range -5..-2
  frr: number;
  n: number;
  cOpen: number;
  cClose: number;
  model: "coefficient_weighted" | "unweighted";
  mode: "exact" | "approximate";
  readout: RiskReadout | null;
  grid: GridCellView[] | null;
  pending: boolean;
  error: string | null;
}

type Listener = (state: WhatIfState) => void;

function farLabelToExponent(label: string): number {
  const match = /^10\^(-?\d+)$/.exec(label);
  if (!match || match[1] === undefined) {
    throw new Error(`cannot read FAR exponent from label ${label}`);
  }
  return Number(match[1]);
}

export class WhatIfPanel {
  state: WhatIfState;
  private issued = 0;

  constructor(
    private readonly client: SurveyApi,
    private readonly config: ServiceConfig,
    private readonly onChange: Listener = () => {},
  ) {
    const nonFar = config.schema.attributes.filter((a) => a.name !== "FAR");
    this.state = {
      levels: Object.fromEntries(nonFar.map((a) => [a.name, 0])),
      farExponent: -2,
      frr: 1e-2,
      n: 10000,
      cOpen: 0.5,
      cClose: 0.5,
      model: "coefficient_weighted",
      mode: "approximate",
      readout: null,
      grid: null,
      pending: false,
      error: null,
    };
  }

  private update(patch: Partial<WhatIfState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  setLevel(attribute: string, level: number): Promise<void> {
    this.update({ levels: { ...this.state.levels, [attribute]: level } });
    return this.refresh();
  }

  setFarExponent(exponent: number): Promise<void> {
    this.update({ farExponent: exponent });
    return this.refresh();
  }

  setRates(frr: number, n: number): Promise<void> {
    this.update({ frr, n });
    return this.refresh();
  }

  setCosts(cOpen: number, cClose: number): Promise<void> {
    this.update({ cOpen, cClose });
    return this.refresh();
  }

  setMode(mode: "exact" | "approximate"): Promise<void> {
    this.update({ mode });
    return this.refresh();
  }

  applyPreset(name: string): Promise<void> {
    const preset = this.config.use_cases.find((u) => u.name === name);
    if (!preset) {
      this.update({ error: `unknown preset ${name}` });
      return Promise.resolve();
    }
    this.update({ levels: { ...preset.levels } });
    return this.refresh();
  }

  private query(farExponent: number, levels: Record<string, number>): WhatIfQuery {
    return {
      levels,
      far: Math.pow(10, farExponent),
      frr: this.state.frr,
      n: this.state.n,
      c_open: this.state.cOpen,
      c_close: this.state.cClose,
      model: this.state.model,
      mode: this.state.mode,
    };
  }

  /** Query the service for the current inputs; stale responses are dropped. */
  async refresh(): Promise<void> {
    const ticket = ++this.issued;
    this.update({ pending: true });
    try {
      const readout = await this.client.whatIf(
        this.query(this.state.farExponent, this.state.levels),
      );
      if (ticket !== this.issued) return; // superseded by a newer query
      this.update({ readout, pending: false, error: null });
    } catch (err) {
      if (ticket !== this.issued) return;
      this.update({ pending: false, error: String(err) });
    }
  }

  /**
   * Recompute the preset x FAR grid. Flagging compares service-provided
   * numbers against the service-provided reference cell; nothing is
   * recomputed locally.
   */
  async loadGrid(): Promise<void> {
    const farAttr = this.config.schema.attributes.find((a) => a.name === "FAR");
    if (!farAttr) {
      this.update({ error: "schema has no FAR attribute" });
      return;
    }
    const exponents = farAttr.levels.map(farLabelToExponent);
    const [refUseCase, refFarLabel] = this.config.reference_cell;
    const refExponent = farLabelToExponent(refFarLabel);
    try {
      const cells: GridCellView[] = [];
      for (const useCase of this.config.use_cases) {
        for (const exponent of exponents) {
          const readout = await this.client.whatIf(
            this.query(exponent, useCase.levels),
          );
          cells.push({
            useCase: useCase.name,
            farExponent: exponent,
            readout,
            flagged: false,
            isReference:
              useCase.name === refUseCase && exponent === refExponent,
          });
        }
      }
      const reference = cells.find((c) => c.isReference);
      if (reference) {
        for (const cell of cells) {
          cell.flagged =
            cell.readout.c_identify < reference.readout.c_identify;
        }
      }
      this.update({ grid: cells, error: null });
    } catch (err) {
      this.update({ error: String(err) });
    }
  }
}
