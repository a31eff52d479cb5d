"""Survey session service and what-if risk queries.

Serves card pairs in the fixed plan order, collects one choice per pair per
session, and answers stateless risk evaluations for the companion UI. All
session state persists through the storage bundle directory, so a restart
loses nothing; the response store is append-only.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import asdict, dataclass
from pathlib import Path

from fastapi import FastAPI, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import reference, storage
from .design import FractionalDesign, PairingPlan
from .errors import ConjointRiskError, ServiceStateError, ValidationError
from .estimate import estimate_to_dict, fit
from .risk import (
    AlphaModel,
    RiskResult,
    RiskScenario,
    VerifierRates,
    c_identify,
    parse_far_label,
)
from .schema import AttributeSchema, schema_to_dict

SESSIONS_FILE = "sessions.json"


class UnknownSessionError(ServiceStateError):
    """No session with the requested id."""


@dataclass
class SurveySession:
    """One respondent's progress through the pairing plan."""

    session_id: str
    respondent: str
    cursor: int = 0
    consent_acknowledged: bool = False

    def completed(self, pair_count: int) -> bool:
        return self.cursor >= pair_count

    def to_dict(self) -> dict:
        return asdict(self)


class ServiceState:
    """Owns the loaded study, the sessions, and the response store."""

    def __init__(
        self,
        schema: AttributeSchema,
        design: FractionalDesign,
        plan: PairingPlan,
        state_dir: Path,
        display_templates: dict | None = None,
        scenario_text: dict | None = None,
    ):
        self.schema = schema
        self.design = design
        self.plan = plan
        self.state_dir = Path(state_dir)
        self.display_templates = display_templates or reference.DISPLAY_TEMPLATES
        self.scenario_text = scenario_text or reference.SCENARIO_TEXT
        self.sessions: dict[str, SurveySession] = {}
        self.records: list = []
        self._registry_lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}
        self._responses_path = self.state_dir / storage.RESPONSES_FILE
        self._sessions_path = self.state_dir / SESSIONS_FILE

    # -- lifecycle ----------------------------------------------------------

    @classmethod
    def open(cls, state_dir, use_reference: bool = False) -> "ServiceState":
        """Load (or initialize) a bundle directory as service state."""
        state_dir = Path(state_dir)
        manifest = state_dir / storage.MANIFEST_FILE
        if not manifest.exists():
            if not use_reference:
                raise ServiceStateError(
                    f"{state_dir} holds no study bundle; run the design/pair "
                    "stages first or pass --use-reference"
                )
            state_dir.mkdir(parents=True, exist_ok=True)
            bundle = storage.ProjectBundle(
                schema=reference.reference_schema(),
                design=reference.reference_design(),
                plan=reference.reference_plan(),
            )
            storage.save(bundle, state_dir)
        bundle = storage.load(state_dir)
        if bundle.schema is None or bundle.design is None or bundle.plan is None:
            raise ServiceStateError(
                "service needs schema, design, and pairs in the state directory"
            )
        state = cls(bundle.schema, bundle.design, bundle.plan, state_dir)
        if state._responses_path.exists():
            state.records = storage.read_responses(state._responses_path)
        if state._sessions_path.exists():
            raw = json.loads(state._sessions_path.read_text(encoding="utf-8"))
            for s in raw["sessions"]:
                state.sessions[s["session_id"]] = SurveySession(**s)
        return state

    def _persist_sessions(self) -> None:
        payload = {"sessions": [s.to_dict() for s in self.sessions.values()]}
        tmp = self._sessions_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        tmp.replace(self._sessions_path)

    def _session(self, session_id: str) -> SurveySession:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"unknown session {session_id!r}") from None

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    # -- survey flow ----------------------------------------------------------

    @property
    def pair_count(self) -> int:
        return len(self.plan.pairs)

    def create_session(self, respondent: str) -> SurveySession:
        if not respondent:
            raise ValidationError("respondent identifier must be non-empty")
        with self._registry_lock:
            for s in self.sessions.values():
                if s.respondent == respondent and not s.completed(self.pair_count):
                    raise ServiceStateError(
                        f"respondent {respondent!r} already has an open session"
                    )
            session = SurveySession(
                session_id=uuid.uuid4().hex[:12], respondent=respondent
            )
            self.sessions[session.session_id] = session
            self._persist_sessions()
            return session

    def acknowledge_consent(self, session_id: str) -> SurveySession:
        with self._lock_for(session_id):
            session = self._session(session_id)
            session.consent_acknowledged = True
            self._persist_sessions()
            return session

    def _card_payload(self, number: int, position: str) -> dict:
        card = self.design.card(number)
        labels = card.labels(self.schema)
        rows = []
        for a in self.schema.attributes:
            label = labels[a.name]
            display = self.display_templates.get(a.name, {}).get(label, label)
            rows.append({"attribute": a.name, "level": label, "display": display})
        return {"card": number, "position": position, "rows": rows}

    def next_pair(self, session_id: str) -> dict:
        session = self._session(session_id)
        if not session.consent_acknowledged:
            raise ServiceStateError("consent must be acknowledged before pairs")
        if session.completed(self.pair_count):
            return {"completed": True, "pair_count": self.pair_count}
        pair_number = session.cursor + 1
        c1, c2 = self.plan.pairs[session.cursor]
        return {
            "completed": False,
            "pair_number": pair_number,
            "pair_count": self.pair_count,
            "card1": self._card_payload(c1, "left"),
            "card2": self._card_payload(c2, "right"),
            "scenario": self.scenario_text,
        }

    def submit_choice(self, session_id: str, pair_number: int, chosen: int) -> dict:
        from .simulate import ChoiceRecord

        with self._lock_for(session_id):
            session = self._session(session_id)
            if not session.consent_acknowledged:
                raise ServiceStateError("consent must be acknowledged before choices")
            if session.completed(self.pair_count):
                raise ServiceStateError("end of survey: all pairs already answered")
            expected = session.cursor + 1
            if pair_number < expected:
                raise ServiceStateError(
                    f"pair {pair_number} already has a recorded choice "
                    "(first write wins)"
                )
            if pair_number > expected:
                raise ServiceStateError(
                    f"pair {pair_number} is not open yet; next is {expected}"
                )
            record = ChoiceRecord(
                respondent=session.respondent,
                pair_number=pair_number,
                chosen=chosen,
            )
            storage.append_response(record, self._responses_path)
            self.records.append(record)
            session.cursor += 1
            self._persist_sessions()
            return {
                "accepted": True,
                "cursor": session.cursor,
                "completed": session.completed(self.pair_count),
            }

    # -- analysis ----------------------------------------------------------

    def responses_csv(self) -> str:
        if self._responses_path.exists():
            return self._responses_path.read_text(encoding="utf-8")
        return "respondent_id,pair_number,chosen\n"

    def run_estimate(self):
        if not self.records:
            raise ServiceStateError("no responses collected yet")
        return fit(self.records, self.plan, self.design, self.schema)

    def resolve_far_level(self, far: float) -> int:
        attr = self.schema.attribute("FAR")
        for i, label in enumerate(attr.levels):
            value = parse_far_label(label)
            if value == far or abs(value - far) <= 1e-9 * max(abs(value), abs(far)):
                return i
        raise ValidationError(
            f"FAR {far:g} does not match any schema level "
            f"({', '.join(attr.levels)})"
        )

    def whatif(
        self,
        levels: dict[str, int],
        far: float,
        frr: float,
        n: int,
        c_open: float,
        c_close: float,
        model_kind: str,
        mode: str,
    ) -> RiskResult:
        if model_kind == "unweighted":
            model = AlphaModel.unweighted(self.schema)
        else:
            model = AlphaModel.coefficient_weighted(reference.REFERENCE_COEFFICIENTS)
        far_level = self.resolve_far_level(far)
        scenario = RiskScenario(
            levels={**levels, "FAR": far_level},
            rates=VerifierRates(p_fa=far, p_fr=frr, n=n),
            c_open=c_open,
            c_close=c_close,
        )
        return c_identify(scenario, model, self.schema, mode=mode)


# -- HTTP layer ----------------------------------------------------------------


class SessionRequest(BaseModel):
    respondent: str


class ChoiceRequest(BaseModel):
    pair_number: int
    chosen: str = Field(pattern="^card[12]$")


class WhatIfRequest(BaseModel):
    levels: dict[str, int]
    far: float
    frr: float
    n: int
    c_open: float = 0.5
    c_close: float = 0.5
    model: str = "coefficient_weighted"
    mode: str = "approximate"


def create_app(state: ServiceState, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="conjointrisk survey service")

    @app.exception_handler(ConjointRiskError)
    def _domain_error(request, exc: ConjointRiskError):
        if isinstance(exc, UnknownSessionError):
            status = 404
        elif isinstance(exc, ServiceStateError):
            status = 409
        else:
            status = 422
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/config")
    def get_config():
        return {
            "schema": schema_to_dict(state.schema),
            "display_templates": state.display_templates,
            "scenario": state.scenario_text,
            "pair_count": state.pair_count,
            "use_cases": [
                {"name": u.name, "levels": u.levels} for u in reference.USE_CASES
            ],
            "reference_cell": list(reference.PUBLISHED_REFERENCE_CELL),
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionRequest):
        session = state.create_session(body.respondent)
        return {
            "session_id": session.session_id,
            "respondent": session.respondent,
            "cursor": session.cursor,
            "completed": session.completed(state.pair_count),
            "consent_acknowledged": session.consent_acknowledged,
            "pair_count": state.pair_count,
        }

    @app.post("/sessions/{session_id}/consent")
    def acknowledge(session_id: str):
        session = state.acknowledge_consent(session_id)
        return {"session_id": session.session_id, "consent_acknowledged": True}

    @app.get("/sessions/{session_id}/next")
    def next_pair(session_id: str):
        return state.next_pair(session_id)

    @app.post("/sessions/{session_id}/choice")
    def submit_choice(session_id: str, body: ChoiceRequest):
        chosen = 1 if body.chosen == "card1" else 2
        return state.submit_choice(session_id, body.pair_number, chosen)

    @app.get("/responses")
    def responses():
        return Response(content=state.responses_csv(), media_type="text/csv")

    @app.post("/whatif")
    def whatif(body: WhatIfRequest):
        result = state.whatif(
            levels=body.levels,
            far=body.far,
            frr=body.frr,
            n=body.n,
            c_open=body.c_open,
            c_close=body.c_close,
            model_kind=body.model,
            mode=body.mode,
        )
        return result.to_dict()

    @app.get("/estimate")
    def estimate():
        return estimate_to_dict(state.run_estimate())

    @app.get("/health")
    def health():
        return {"status": "ok", "pair_count": state.pair_count}

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
