/**
 * Entry point: hash routing between the participant survey (#survey) and
 * the analyst what-if explorer (#whatif). All state lives in the flow and
 * panel modules; this file only renders their snapshots.
 */

import { ApiClient, type ServiceConfig, type SessionInfo } from "./api.js";
import { button, clear, h } from "./dom.js";
import { ParticipantFlow, type FlowState } from "./participant.js";
import { cardViewModel, formatReadout, formatRisk } from "./viewmodels.js";
import { WhatIfPanel, type WhatIfState } from "./whatif.js";

const client = new ApiClient("");
const root = document.getElementById("app") as HTMLElement;
const SESSION_KEY = "conjointrisk.session";

function schemaOrder(config: ServiceConfig): string[] {
  return config.schema.attributes.map((a) => a.name);
}

// -- participant flow ----------------------------------------------------------

function renderFlow(config: ServiceConfig, flow: ParticipantFlow): void {
  const state = flow.state;
  clear(root);
  if (state.error) {
    root.append(
      h("p", { class: "error" }, [state.error]),
      button("Retry", () => void flow.loadNext()),
    );
    if (state.stage === "error") return;
  }
  switch (state.stage) {
    case "intro":
      renderIntro(flow);
      break;
    case "scenario":
      renderScenario(config, flow);
      break;
    case "pair":
      renderPair(config, flow);
      break;
    case "done":
      root.append(
        h("h2", {}, ["Thank you!"]),
        h("p", {}, ["All comparisons are answered; you can close this tab."]),
      );
      sessionStorage.removeItem(SESSION_KEY);
      break;
  }
}

function renderIntro(flow: ParticipantFlow): void {
  const input = h("input", { placeholder: "participant id", value: "" });
  root.append(
    h("h2", {}, ["Welcome"]),
    h("p", {}, [
      "This study asks you to compare pairs of recognition-system setups. ",
      "Participation is voluntary; by continuing you consent to your ",
      "choices being recorded anonymously.",
    ]),
    input,
    button("I consent, begin", () => {
      if (input.value.trim()) void flow.begin(input.value.trim());
    }),
  );
}

function renderScenario(config: ServiceConfig, flow: ParticipantFlow): void {
  const s = config.scenario;
  root.append(
    h("h2", {}, [s["title"] ?? "Scenario"]),
    ...["premise", "attempts", "termination", "question"].map((key) =>
      h("p", {}, [s[key] ?? ""]),
    ),
    button("Start", () => void flow.loadNext()),
  );
}

function renderPair(config: ServiceConfig, flow: ParticipantFlow): void {
  const pair = flow.state.pair;
  if (!pair || !pair.card1 || !pair.card2) return;
  const order = schemaOrder(config);
  const left = cardViewModel(pair.card1, order, "left");
  const right = cardViewModel(pair.card2, order, "right");
  const disabled: Record<string, string> = flow.state.submitting
    ? { disabled: "disabled" }
    : {};

  const cardEl = (vm: typeof left, which: "card1" | "card2") =>
    h("div", { class: "card" }, [
      h("h3", {}, [`System ${vm.position === "left" ? "A" : "B"}`]),
      h(
        "ul",
        {},
        vm.rows.map((row) =>
          h("li", {}, [h("b", {}, [row.attribute + ": "]), row.display]),
        ),
      ),
      button("Choose this system", () => void flow.choose(which), {
        class: "choose",
        ...disabled,
      }),
    ]);

  root.append(
    h("p", { class: "progress" }, [
      `Comparison ${pair.pair_number} of ${pair.pair_count}`,
    ]),
    h("p", {}, [pair.scenario?.["question"] ?? ""]),
    h("div", { class: "pair" }, [cardEl(left, "card1"), cardEl(right, "card2")]),
  );
}

// -- what-if explorer ------------------------------------------------------------

function renderWhatIf(config: ServiceConfig, panel: WhatIfPanel): void {
  const state = panel.state;
  clear(root);
  root.append(h("h2", {}, ["What-if risk explorer"]));

  const presets = h(
    "div",
    { class: "presets" },
    config.use_cases.map((u) =>
      button(u.name, () => void panel.applyPreset(u.name)),
    ),
  );
  root.append(presets);

  const controls = h("div", { class: "controls" });
  for (const attr of config.schema.attributes) {
    if (attr.name === "FAR") continue;
    const select = h("select", { "data-attr": attr.name });
    attr.levels.forEach((level, i) => {
      const opt = h("option", { value: String(i) }, [level]);
      if (state.levels[attr.name] === i) opt.selected = true;
      select.append(opt);
    });
    select.addEventListener("change", () =>
      void panel.setLevel(attr.name, Number(select.value)),
    );
    controls.append(h("label", {}, [attr.name + " ", select]));
  }
  const far = h("input", {
    type: "range",
    min: "-5",
    max: "-2",
    step: "1",
    value: String(state.farExponent),
  });
  far.addEventListener("input", () =>
    void panel.setFarExponent(Number(far.value)),
  );
  controls.append(h("label", {}, [`FAR 10^${state.farExponent} `, far]));
  root.append(controls);

  const readout = h("div", { class: "readout" });
  if (state.readout) {
    const f = formatReadout(state.readout);
    readout.append(
      h("p", { class: "headline", id: "c-identify" }, [f.cIdentify]),
      h("p", {}, [
        `alpha ${f.alpha} | FPIR open ${f.fpirOpen} | FPIR close ${f.fpirClose}`,
      ]),
    );
  } else {
    readout.append(h("p", {}, [state.pending ? "computing..." : "no result"]));
  }
  if (state.error) readout.append(h("p", { class: "error" }, [state.error]));
  root.append(readout);

  root.append(button("Show full grid", () => void panel.loadGrid()));
  if (state.grid) {
    const farAttr = config.schema.attributes.find((a) => a.name === "FAR");
    const exponents = [
      ...new Set(state.grid.map((c) => c.farExponent)),
    ].sort((a, b) => b - a);
    const table = h("table", { class: "grid" });
    const head = h("tr", {}, [h("th", {}, ["FAR \\ use case"])]);
    for (const u of config.use_cases) head.append(h("th", {}, [u.name]));
    table.append(head);
    for (const exponent of exponents) {
      const label =
        farAttr?.levels.find((l) => l === `10^${exponent}`) ?? `10^${exponent}`;
      const tr = h("tr", {}, [h("th", {}, [label])]);
      for (const u of config.use_cases) {
        const cell = state.grid.find(
          (c) => c.useCase === u.name && c.farExponent === exponent,
        );
        const classes = cell?.flagged ? "flagged" : cell?.isReference ? "reference" : "";
        tr.append(
          h("td", { class: classes }, [
            cell ? formatRisk(cell.readout.c_identify) : "-",
          ]),
        );
      }
      table.append(tr);
    }
    root.append(table);
  }
}

// -- wiring ---------------------------------------------------------------------

async function start(): Promise<void> {
  const config = await client.config();

  const route = () => {
    const hash = window.location.hash || "#survey";
    if (hash === "#whatif") {
      const panel = new WhatIfPanel(client, config, (s: WhatIfState) =>
        renderWhatIf(config, panel),
      );
      renderWhatIf(config, panel);
      void panel.refresh();
    } else {
      const flow = new ParticipantFlow(client, (s: FlowState) => {
        if (s.session) {
          sessionStorage.setItem(SESSION_KEY, JSON.stringify(s.session));
        }
        renderFlow(config, flow);
      });
      const stored = sessionStorage.getItem(SESSION_KEY);
      if (stored) {
        void flow.resume(JSON.parse(stored) as SessionInfo);
      }
      renderFlow(config, flow);
    }
  };
  window.addEventListener("hashchange", route);
  route();
}

void start();
