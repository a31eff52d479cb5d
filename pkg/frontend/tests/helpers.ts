/** Shared stubs for unit tests: a canned config and a scriptable API. */

import type {
  CardPayload,
  ChoiceAck,
  PairPayload,
  RiskReadout,
  ServiceConfig,
  SessionInfo,
  SurveyApi,
  WhatIfQuery,
} from "../src/api.js";

export const SCHEMA_ORDER = [
  "FAR",
  "Camera",
  "Staff",
  "Friendship",
  "Congestion",
];

export function stubConfig(): ServiceConfig {
  return {
    schema: {
      attributes: [
        { name: "FAR", levels: ["10^-2", "10^-3", "10^-4", "10^-5"] },
        { name: "Camera", levels: ["No", "Yes"] },
        { name: "Staff", levels: ["No", "Yes"] },
        { name: "Friendship", levels: ["No", "Yes"] },
        { name: "Congestion", levels: ["empty", "normal", "crowded"] },
      ],
    },
    display_templates: {},
    scenario: { title: "t", premise: "p", attempts: "a", termination: "x", question: "q" },
    pair_count: 9,
    use_cases: [
      { name: "Low-secure", levels: { Camera: 0, Staff: 0, Friendship: 0, Congestion: 0 } },
      { name: "Mid-secure", levels: { Camera: 0, Staff: 1, Friendship: 1, Congestion: 1 } },
      { name: "High-secure", levels: { Camera: 1, Staff: 1, Friendship: 1, Congestion: 2 } },
    ],
    reference_cell: ["Low-secure", "10^-4"],
  };
}

export function stubCard(card: number): CardPayload {
  return {
    card,
    position: "left",
    rows: SCHEMA_ORDER.map((attribute) => ({
      attribute,
      level: "x",
      display: `${attribute} of card ${card}`,
    })),
  };
}

export interface ScriptedServer {
  api: SurveyApi;
  submissions: { pairNumber: number; chosen: string }[];
  cursor(): number;
}

/** An in-memory service with the same cursor rules as the real one. */
export function scriptedServer(pairCount = 9): ScriptedServer {
  let cursor = 0;
  const submissions: { pairNumber: number; chosen: string }[] = [];
  const pairs: [number, number][] = [
    [1, 5], [9, 7], [8, 1], [5, 4], [6, 2], [7, 8], [4, 3], [3, 6], [2, 9],
  ];
  const session: SessionInfo = {
    session_id: "s1",
    respondent: "r1",
    cursor: 0,
    completed: false,
    consent_acknowledged: false,
    pair_count: pairCount,
  };
  const api: SurveyApi = {
    config: async () => stubConfig(),
    createSession: async () => ({ ...session }),
    acknowledgeConsent: async () => ({}),
    nextPair: async (): Promise<PairPayload> => {
      if (cursor >= pairCount) {
        return { completed: true, pair_count: pairCount };
      }
      const [c1, c2] = pairs[cursor]!;
      return {
        completed: false,
        pair_count: pairCount,
        pair_number: cursor + 1,
        card1: stubCard(c1),
        card2: stubCard(c2),
        scenario: stubConfig().scenario,
      };
    },
    submitChoice: async (
      _sid: string,
      pairNumber: number,
      chosen: "card1" | "card2",
    ): Promise<ChoiceAck> => {
      if (pairNumber !== cursor + 1) {
        throw new Error(`pair ${pairNumber} is not open (cursor ${cursor})`);
      }
      cursor += 1;
      submissions.push({ pairNumber, chosen });
      return { accepted: true, cursor, completed: cursor >= pairCount };
    },
    whatIf: async (_query: WhatIfQuery): Promise<RiskReadout> => ({
      alpha: 0.5,
      fpir_open: 0.1,
      fpir_close: 0.001,
      c_identify: 0.123,
      mode: "approximate",
    }),
    responsesCsv: async () => "respondent_id,pair_number,chosen\n",
  };
  return { api, submissions, cursor: () => cursor };
}
