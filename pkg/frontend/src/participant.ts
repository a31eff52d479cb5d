/**
 * Participant flow state machine.
 *
 * Drives consent -> scenario explanation -> sequential pair screens ->
 * completion against the service, with the server as the single source of
 * truth for progress: a refreshed or reconnected client resumes at the
 * server cursor. Selections post immediately and the submit path is
 * disabled until the server acknowledges, so a pair can be answered
 * neither twice nor out of order.
 */

import type { PairPayload, SessionInfo, SurveyApi } from "./api.js";

export type FlowStage =
  | "intro"
  | "scenario"
  | "pair"
  | "done"
  | "error";

export interface FlowState {
  stage: FlowStage;
  session: SessionInfo | null;
  pair: PairPayload | null;
  submitting: boolean;
  error: string | null;
}

type Listener = (state: FlowState) => void;

export class ParticipantFlow {
  state: FlowState = {
    stage: "intro",
    session: null,
    pair: null,
    submitting: false,
    error: null,
  };

  constructor(
    private readonly client: SurveyApi,
    private readonly onChange: Listener = () => {},
  ) {}

  private update(patch: Partial<FlowState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  /** Create a session and acknowledge consent (the mandatory first step). */
  async begin(respondent: string): Promise<void> {
    try {
      const session = await this.client.createSession(respondent);
      await this.client.acknowledgeConsent(session.session_id);
      this.update({
        session: { ...session, consent_acknowledged: true },
        stage: "scenario",
        error: null,
      });
    } catch (err) {
      this.update({ stage: "error", error: String(err) });
    }
  }

  /** Re-attach to an existing session; the server cursor decides the screen. */
  async resume(session: SessionInfo): Promise<void> {
    this.update({ session, error: null });
    await this.loadNext();
  }

  /** Fetch the pair at the server cursor, or learn that we are done. */
  async loadNext(): Promise<void> {
    const session = this.state.session;
    if (!session) {
      this.update({ stage: "error", error: "no active session" });
      return;
    }
    try {
      const pair = await this.client.nextPair(session.session_id);
      if (pair.completed) {
        this.update({ stage: "done", pair: null, error: null });
      } else {
        this.update({ stage: "pair", pair, error: null });
      }
    } catch (err) {
      // Network failure keeps the current screen; the cursor lives on the
      // server, so a retry cannot skip or repeat a pair.
      this.update({ error: String(err) });
    }
  }

  /** Post the selection for the pair on screen; no-op while in flight. */
  async choose(which: "card1" | "card2"): Promise<void> {
    const { session, pair, submitting } = this.state;
    if (!session || !pair || pair.pair_number === undefined || submitting) {
      return;
    }
    this.update({ submitting: true });
    try {
      const ack = await this.client.submitChoice(
        session.session_id,
        pair.pair_number,
        which,
      );
      this.update({ submitting: false, error: null });
      if (ack.completed) {
        this.update({ stage: "done", pair: null });
      } else {
        await this.loadNext();
      }
    } catch (err) {
      this.update({ submitting: false, error: String(err) });
    }
  }
}
