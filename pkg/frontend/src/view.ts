// DOM rendering. Builds elements with textContent only and reports
// user intent through callbacks; all data funnels in from main.ts.

import type {
  HealthInfo,
  ScoreResponse,
  SolveResponse,
  TagSpec,
} from "./api.js";
import { fmtCount, fmtDelta, fmtScore, fmtWallTime, fmtWeight } from "./format.js";
import type { Controls, TagRow } from "./state.js";
import { ALGORITHMS, WEIGHT_MAX, WEIGHT_MIN, canSolve } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function clear(container: HTMLElement): Document {
  container.replaceChildren();
  return container.ownerDocument;
}

export function renderStatus(container: HTMLElement, health: HealthInfo | null): void {
  const doc = clear(container);
  if (!health) {
    container.appendChild(el(doc, "span", "status-chip status-warn", "connecting"));
    return;
  }
  const loaded = health.model_loaded;
  container.appendChild(
    el(doc, "span", `status-chip ${loaded ? "status-ok" : "status-warn"}`,
      loaded ? "model loaded" : "no model"),
  );
  container.appendChild(el(doc, "span", "backend-chip", `backend: ${health.backend}`));
}

export interface TagPanelHandlers {
  toggle(index: number, selected: boolean): void;
  weight(index: number, weight: number): void;
  polarity(index: number): void;
}

export function renderTagPanel(
  container: HTMLElement,
  tags: TagRow[],
  on: TagPanelHandlers,
): void {
  const doc = clear(container);
  container.appendChild(el(doc, "h2", undefined, "Tags"));
  tags.forEach((tag, i) => {
    const row = el(doc, "div", "tag-row");
    row.dataset.name = tag.name;

    const label = el(doc, "label", "tag-pick");
    const check = el(doc, "input", "tag-check");
    check.type = "checkbox";
    check.checked = tag.selected;
    check.addEventListener("change", () => on.toggle(i, check.checked));
    label.appendChild(check);
    label.appendChild(el(doc, "span", "tag-name", tag.name));
    row.appendChild(label);

    const polarity = el(doc, "button", `polarity-btn ${tag.polarity}`, tag.polarity);
    polarity.type = "button";
    polarity.title = "flip between desirable and undesirable";
    polarity.disabled = !tag.selected;
    polarity.addEventListener("click", () => on.polarity(i));
    row.appendChild(polarity);

    const slider = el(doc, "input", "weight-slider");
    slider.type = "range";
    slider.min = String(WEIGHT_MIN);
    slider.max = String(WEIGHT_MAX);
    slider.step = "0.25";
    slider.value = String(tag.weight);
    slider.disabled = !tag.selected;
    slider.addEventListener("input", () => on.weight(i, Number(slider.value)));
    row.appendChild(slider);
    row.appendChild(el(doc, "span", "weight-value", `w=${fmtWeight(tag.weight)}`));

    container.appendChild(row);
  });
}

export interface ControlHandlers {
  algo(value: string): void;
  k(value: number): void;
  mprime(value: number | null): void;
  epsilon(value: number): void;
  restarts(value: number): void;
  seed(value: number): void;
  solve(): void;
}

function numberField(
  doc: Document,
  label: string,
  className: string,
  value: string,
  onChange: (raw: string) => void,
  attrs: Partial<Pick<HTMLInputElement, "min" | "max" | "step" | "placeholder">> = {},
): HTMLElement {
  const wrap = el(doc, "label", "field");
  wrap.appendChild(el(doc, "span", "field-name", label));
  const input = el(doc, "input", className);
  input.type = "number";
  input.value = value;
  Object.assign(input, attrs);
  input.addEventListener("change", () => onChange(input.value));
  wrap.appendChild(input);
  return wrap;
}

export function renderControls(
  container: HTMLElement,
  tags: TagRow[],
  controls: Controls,
  busy: boolean,
  on: ControlHandlers,
): void {
  const doc = clear(container);
  container.appendChild(el(doc, "h2", undefined, "Solve"));

  const algoWrap = el(doc, "label", "field");
  algoWrap.appendChild(el(doc, "span", "field-name", "algorithm"));
  const algo = el(doc, "select", "algo-select");
  for (const name of ALGORITHMS) {
    const opt = el(doc, "option", undefined, name);
    opt.value = name;
    opt.selected = name === controls.algo;
    algo.appendChild(opt);
  }
  algo.addEventListener("change", () => on.algo(algo.value));
  algoWrap.appendChild(algo);
  container.appendChild(algoWrap);

  container.appendChild(
    numberField(doc, "k", "k-input", String(controls.k),
      (raw) => on.k(Number(raw)), { min: "1", step: "1" }),
  );

  if (controls.algo === "ett") {
    container.appendChild(
      numberField(doc, "group size", "mprime-input",
        controls.mprime === null ? "" : String(controls.mprime),
        (raw) => on.mprime(raw === "" ? null : Number(raw)),
        { min: "1", max: "12", step: "1", placeholder: "auto" }),
    );
  }
  if (controls.algo === "pa") {
    container.appendChild(
      numberField(doc, "epsilon", "epsilon-input", String(controls.epsilon),
        (raw) => on.epsilon(Number(raw)), { min: "0.05", step: "0.05" }),
    );
  }
  if (controls.algo === "hc") {
    container.appendChild(
      numberField(doc, "restarts", "restarts-input", String(controls.restarts),
        (raw) => on.restarts(Number(raw)), { min: "1", step: "1" }),
    );
    container.appendChild(
      numberField(doc, "seed", "seed-input", String(controls.seed),
        (raw) => on.seed(Number(raw)), { step: "1" }),
    );
  }

  const solve = el(doc, "button", "solve-btn", busy ? "solving..." : "solve");
  solve.type = "button";
  solve.disabled = busy || !canSolve(tags);
  solve.addEventListener("click", () => on.solve());
  container.appendChild(solve);
}

function barCell(
  doc: Document,
  className: string,
  fraction: number,
  text: string,
): HTMLElement {
  const cell = el(doc, "div", `bar-cell ${className}`);
  const track = el(doc, "div", "bar-track");
  const fill = el(doc, "div", "bar-fill");
  const pct = Math.max(0, Math.min(1, fraction)) * 100;
  fill.style.width = `${pct}%`;
  track.appendChild(fill);
  cell.appendChild(track);
  cell.appendChild(el(doc, "span", "bar-value", text));
  return cell;
}

export function renderResults(
  container: HTMLElement,
  res: SolveResponse | null,
  specs: TagSpec[],
  activeBits: string | null,
  onPick: (bits: string) => void,
): void {
  const doc = clear(container);
  container.appendChild(el(doc, "h2", undefined, "Candidates"));
  if (!res) {
    container.appendChild(
      el(doc, "p", "placeholder", "Pick at least one tag and solve."));
    return;
  }
  if (res.entries.length === 0) {
    container.appendChild(el(doc, "p", "placeholder", "No candidates returned."));
    return;
  }

  const table = el(doc, "table", "results-table");
  const head = el(doc, "tr");
  head.appendChild(el(doc, "th", undefined, "#"));
  head.appendChild(el(doc, "th", undefined, "bits"));
  head.appendChild(el(doc, "th", undefined, "score"));
  for (const spec of specs) {
    const suffix = spec.polarity === "undesirable" ? " (avoid)" : "";
    head.appendChild(el(doc, "th", undefined, `${spec.name}${suffix}`));
  }
  table.appendChild(head);

  res.entries.forEach((entry, i) => {
    const row = el(doc, "tr", "result-row");
    row.dataset.bits = entry.bits;
    if (entry.bits === activeBits) {
      row.classList.add("active");
    }
    row.appendChild(el(doc, "td", "rank-cell", String(i + 1)));
    row.appendChild(el(doc, "td", "bits-cell", entry.bits));
    row.appendChild(el(doc, "td", "score-cell", fmtScore(entry.score)));
    entry.tag_scores.forEach((s) => {
      const td = el(doc, "td");
      td.appendChild(barCell(doc, "tagscore-cell", s, fmtScore(s)));
      row.appendChild(td);
    });
    row.addEventListener("click", () => onPick(entry.bits));
    table.appendChild(row);
  });
  const scroll = el(doc, "div", "table-scroll");
  scroll.appendChild(table);
  container.appendChild(scroll);

  const s = res.stats;
  container.appendChild(
    el(doc, "p", "stats-line",
      `${s.algorithm}: examined ${fmtCount(s.candidates_examined)} candidates ` +
      `in ${fmtWallTime(s.wall_time)}`),
  );
}

export interface EditorState {
  bits: string; // target configuration, follows the user's toggles
  score: ScoreResponse; // latest round-trip, the only source of numbers
  prevScore: number | null;
  pending: boolean;
}

export interface EditorHandlers {
  flip(index: number): void;
  close(): void;
}

export function renderEditor(
  container: HTMLElement,
  attributes: string[],
  editor: EditorState | null,
  on: EditorHandlers,
): void {
  const doc = clear(container);
  if (!editor) {
    container.classList.add("hidden");
    return;
  }
  container.classList.remove("hidden");
  const { bits, score, prevScore, pending } = editor;

  const head = el(doc, "div", "editor-head");
  head.appendChild(el(doc, "h2", undefined, "What if"));
  const close = el(doc, "button", "close-btn", "close");
  close.type = "button";
  close.addEventListener("click", () => on.close());
  head.appendChild(close);
  container.appendChild(head);

  const toggles = el(doc, "div", "attr-toggles");
  attributes.forEach((name, i) => {
    const onBit = bits[i] === "1";
    const btn = el(doc, "button", `attr-toggle ${onBit ? "on" : "off"}`, name);
    btn.type = "button";
    btn.setAttribute("aria-pressed", onBit ? "true" : "false");
    btn.addEventListener("click", () => on.flip(i));
    toggles.appendChild(btn);
  });
  container.appendChild(toggles);

  const scoreLine = el(doc, "div", `score-line${pending ? " pending" : ""}`);
  scoreLine.appendChild(el(doc, "span", "editor-bits", bits));
  scoreLine.appendChild(el(doc, "span", "editor-score", fmtScore(score.score)));
  if (prevScore !== null && prevScore !== score.score) {
    const d = score.score - prevScore;
    scoreLine.appendChild(
      el(doc, "span", `editor-delta ${d > 0 ? "delta-up" : "delta-down"}`, fmtDelta(d)));
  }
  if (score.rank !== undefined && score.total !== undefined) {
    scoreLine.appendChild(
      el(doc, "span", "rank-badge",
        `rank ${fmtCount(score.rank)} of ${fmtCount(score.total)}`));
  }
  container.appendChild(scoreLine);

  const table = el(doc, "table", "editor-tags");
  for (const pt of score.per_tag) {
    const row = el(doc, "tr", "editor-tag-row");
    const label = pt.polarity === "undesirable" ? `!${pt.name}` : pt.name;
    row.appendChild(el(doc, "td", "editor-tag-name", label));
    row.appendChild(el(doc, "td", "editor-tag-weight", `w=${fmtWeight(pt.weight)}`));
    const bar = el(doc, "td");
    bar.appendChild(barCell(doc, "editor-tagscore", pt.tag_score, fmtScore(pt.tag_score)));
    row.appendChild(bar);
    row.appendChild(el(doc, "td", "editor-contrib", fmtScore(pt.contribution)));
    table.appendChild(row);
  }
  container.appendChild(table);
}

export function renderError(
  container: HTMLElement,
  message: string | null,
  onRetry: (() => void) | null,
): void {
  const doc = clear(container);
  if (!message) {
    container.classList.add("hidden");
    return;
  }
  container.classList.remove("hidden");
  const banner = el(doc, "div", "error-banner");
  banner.appendChild(el(doc, "span", "error-text", message));
  if (onRetry) {
    const retry = el(doc, "button", "retry-btn", "retry");
    retry.type = "button";
    retry.addEventListener("click", () => onRetry());
    banner.appendChild(retry);
  }
  container.appendChild(banner);
}
