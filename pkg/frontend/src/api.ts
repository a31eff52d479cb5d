/**
 * Typed client for the survey service.
 *
 * Every number shown anywhere in the UI originates from one of these
 * responses; the browser performs no risk arithmetic of its own.
 */

export interface AttributeInfo {
  name: string;
  levels: string[];
}

export interface ServiceConfig {
  schema: { attributes: AttributeInfo[] };
  display_templates: Record<string, Record<string, string>>;
  scenario: Record<string, string>;
  pair_count: number;
  use_cases: { name: string; levels: Record<string, number> }[];
  reference_cell: [string, string];
}

export interface SessionInfo {
  session_id: string;
  respondent: string;
  cursor: number;
  completed: boolean;
  consent_acknowledged: boolean;
  pair_count: number;
}

export interface CardRow {
  attribute: string;
  level: string;
  display: string;
}

export interface CardPayload {
  card: number;
  position: string;
  rows: CardRow[];
}

export interface PairPayload {
  completed: boolean;
  pair_count: number;
  pair_number?: number;
  card1?: CardPayload;
  card2?: CardPayload;
  scenario?: Record<string, string>;
}

export interface ChoiceAck {
  accepted: boolean;
  cursor: number;
  completed: boolean;
}

export interface WhatIfQuery {
  levels: Record<string, number>;
  far: number;
  frr: number;
  n: number;
  c_open?: number;
  c_close?: number;
  model?: "coefficient_weighted" | "unweighted";
  mode?: "exact" | "approximate";
}

export interface RiskReadout {
  alpha: number;
  fpir_open: number;
  fpir_close: number;
  c_identify: number;
  mode: string;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`service responded ${status}: ${detail}`);
  }
}

/** The surface the UI state machines depend on; stubbed in unit tests. */
export interface SurveyApi {
  config(): Promise<ServiceConfig>;
  createSession(respondent: string): Promise<SessionInfo>;
  acknowledgeConsent(sessionId: string): Promise<unknown>;
  nextPair(sessionId: string): Promise<PairPayload>;
  submitChoice(
    sessionId: string,
    pairNumber: number,
    chosen: "card1" | "card2",
  ): Promise<ChoiceAck>;
  whatIf(query: WhatIfQuery): Promise<RiskReadout>;
  responsesCsv(): Promise<string>;
}

export class ApiClient implements SurveyApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        detail = body.detail ?? JSON.stringify(body);
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
  }

  config(): Promise<ServiceConfig> {
    return this.request<ServiceConfig>("/config");
  }

  createSession(respondent: string): Promise<SessionInfo> {
    return this.post<SessionInfo>("/sessions", { respondent });
  }

  acknowledgeConsent(sessionId: string): Promise<unknown> {
    return this.post(`/sessions/${sessionId}/consent`);
  }

  nextPair(sessionId: string): Promise<PairPayload> {
    return this.request<PairPayload>(`/sessions/${sessionId}/next`);
  }

  submitChoice(
    sessionId: string,
    pairNumber: number,
    chosen: "card1" | "card2",
  ): Promise<ChoiceAck> {
    return this.post<ChoiceAck>(`/sessions/${sessionId}/choice`, {
      pair_number: pairNumber,
      chosen,
    });
  }

  whatIf(query: WhatIfQuery): Promise<RiskReadout> {
    return this.post<RiskReadout>("/whatif", query);
  }

  async responsesCsv(): Promise<string> {
    const response = await this.fetchImpl(this.baseUrl + "/responses");
    if (!response.ok) {
      throw new ApiError(response.status, response.statusText);
    }
    return response.text();
  }
}
