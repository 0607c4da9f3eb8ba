/** DOM wiring: controls, piano roll, and store subscriptions. */

import type { ServiceClient } from "./api.js";
import { Store, SWEEP_J } from "./state.js";
import { N_BARS, spanFromBars, validateBarSelection } from "./spans.js";
import { renderRoll } from "./roll.js";
import { Player } from "./audio.js";
import { demoWindow, parseWindowText, validateWindowTokens } from "./tokens.js";

export interface App {
  store: Store;
  root: HTMLElement;
  refresh: () => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function buildApp(root: HTMLElement, client: ServiceClient): App {
  const doc = root.ownerDocument;
  const store = new Store(client, demoWindow());
  const player = new Player();

  const health = el(doc, "span", { id: "health", class: "health" }, "connecting...");
  const title = el(doc, "h1", {}, "Melody Infilling Studio");
  const topbar = el(doc, "header", { class: "topbar" });
  topbar.append(title, health);

  const firstBar = el(doc, "select", { id: "first-bar" });
  for (let b = 0; b < N_BARS; b++) {
    firstBar.append(el(doc, "option", { value: String(b) }, `bar ${b + 1}`));
  }
  const nBars = el(doc, "select", { id: "n-bars" });
  for (let n = 1; n <= 4; n++) {
    nBars.append(el(doc, "option", { value: String(n) }, `${n} bar${n > 1 ? "s" : ""}`));
  }
  const applySpan = el(doc, "button", { id: "apply-span" }, "Set span");
  const spanMsg = el(doc, "span", { id: "span-msg", class: "msg" });
  const spanRow = el(doc, "div", { class: "row" });
  spanRow.append(el(doc, "label", {}, "Rewrite"), firstBar, el(doc, "label", {}, "for"), nBars, applySpan, spanMsg);

  const generate = el(doc, "button", { id: "generate" }, "Generate");
  const pin = el(doc, "button", { id: "pin" }, "Pin");
  const vary = el(doc, "button", { id: "vary" }, "Vary");
  const keep = el(doc, "button", { id: "keep" }, "Keep");
  const play = el(doc, "button", { id: "play" }, "Play");
  const stopBtn = el(doc, "button", { id: "stop" }, "Stop");
  const actionRow = el(doc, "div", { class: "row" });
  actionRow.append(generate, pin, vary, keep, play, stopBtn);

  const alpha = el(doc, "input", {
    id: "alpha",
    type: "range",
    min: "0",
    max: String(SWEEP_J),
    step: "1",
    value: "0",
    disabled: "",
  });
  const alphaVal = el(doc, "span", { id: "alpha-val" }, "0/" + String(SWEEP_J));
  const alphaRow = el(doc, "div", { class: "row" });
  alphaRow.append(el(doc, "label", {}, "Blend"), alpha, alphaVal);

  const delta = el(doc, "input", {
    id: "delta",
    type: "range",
    min: "0",
    max: "2",
    step: "0.1",
    value: "0.5",
  });
  const deltaVal = el(doc, "span", { id: "delta-val" }, "0.5");
  const deltaRow = el(doc, "div", { class: "row" });
  deltaRow.append(el(doc, "label", {}, "Spread"), delta, deltaVal);

  const status = el(doc, "div", { id: "status", class: "status" });
  const error = el(doc, "div", { id: "error", class: "error" });
  const roll = el(doc, "div", { id: "roll", class: "roll-box" });

  const windowText = el(doc, "textarea", { id: "window-text", rows: "4" });
  const loadWindow = el(doc, "button", { id: "load-window" }, "Load window");
  const loadDemo = el(doc, "button", { id: "load-demo" }, "Demo melody");
  const windowMsg = el(doc, "span", { id: "window-msg", class: "msg" });
  const loader = el(doc, "details", { class: "loader" });
  loader.append(
    el(doc, "summary", {}, "Context window (128 tokens)"),
    windowText,
    el(doc, "div", { class: "row" }),
  );
  const loaderRow = loader.lastElementChild as HTMLElement;
  loaderRow.append(loadWindow, loadDemo, windowMsg);

  root.append(topbar, spanRow, actionRow, alphaRow, deltaRow, status, error, roll, loader);

  const refresh = (): void => {
    generate.disabled = store.busy || store.sessionId === null;
    pin.disabled = store.candidate === null;
    vary.disabled = store.busy || store.sessionId === null || store.lastAnchor() === null;
    keep.disabled = store.candidate === null || store.anchors.length === 0;
    alpha.disabled = store.anchors.length !== 2;
    alpha.value = String(store.alphaIndex);
    alphaVal.textContent = `${store.alphaIndex}/${SWEEP_J}`;
    deltaVal.textContent = store.delta.toFixed(1);
    const spanText =
      store.span === null
        ? "no span selected"
        : `span ${store.span.start}..${store.span.start + store.span.length}`;
    status.textContent = `${spanText} · ${store.anchors.length}/2 anchors${store.busy ? " · working" : ""}`;
    error.textContent = store.error ?? "";
    error.hidden = store.error === null;
    roll.replaceChildren(renderRoll(doc, store.currentTokens(), store.span));
  };

  applySpan.addEventListener("click", () => {
    const fb = Number(firstBar.value);
    const nb = Number(nBars.value);
    const problem = validateBarSelection(fb, nb);
    spanMsg.textContent = problem ?? "";
    if (problem === null) {
      void store.selectSpan(spanFromBars(fb, nb));
    }
  });
  generate.addEventListener("click", () => void store.generate());
  pin.addEventListener("click", () => store.pinCandidate());
  vary.addEventListener("click", () => void store.vary());
  keep.addEventListener("click", () => store.keepCandidate());
  play.addEventListener("click", () => player.play(store.currentTokens()));
  stopBtn.addEventListener("click", () => player.stop());
  alpha.addEventListener("input", () => {
    const v = Number(alpha.value);
    if (store.sweep === null) {
      void store.ensureSweep().then((ok) => {
        if (ok) {
          store.setAlpha(v);
        }
      });
    } else {
      store.setAlpha(v);
    }
  });
  delta.addEventListener("input", () => store.setDelta(Number(delta.value)));
  loadDemo.addEventListener("click", () => {
    windowMsg.textContent = "";
    store.setWindow(demoWindow());
  });
  loadWindow.addEventListener("click", () => {
    const tokens = parseWindowText(windowText.value);
    const problem = validateWindowTokens(tokens);
    windowMsg.textContent = problem ?? "";
    if (problem === null) {
      store.setWindow(tokens);
    }
  });

  store.subscribe(refresh);
  refresh();

  client
    .health()
    .then((h) => {
      health.textContent = `model v${h.model_version} · d_z=${h.d_z}`;
    })
    .catch(() => {
      health.textContent = "service offline";
    });

  return { store, root, refresh };
}
