// Wires state, API client, and views together. One solve in flight at
// a time (newer submissions abort older ones); what-if bit flips are
// debounced and every score shown comes back from POST /score.

import { ApiClient, ApiError } from "./api.js";
import type {
  HealthInfo,
  ModelInfo,
  ScoreResponse,
  SolveResponse,
  TagSpec,
} from "./api.js";
import {
  buildSolveRequest,
  canSolve,
  clampWeight,
  defaultControls,
  flipBit,
  initTags,
  tagSpecs,
} from "./state.js";
import type { Algorithm, Controls, TagRow } from "./state.js";
import {
  renderControls,
  renderEditor,
  renderError,
  renderResults,
  renderStatus,
  renderTagPanel,
} from "./view.js";

export interface AppOptions {
  debounceMs?: number;
}

interface EditorSession {
  bits: string; // target configuration, follows the toggles
  score: ScoreResponse | null; // last response, the only number source
  prevScore: number | null;
}

interface Regions {
  status: HTMLElement;
  modelLine: HTMLElement;
  tagPanel: HTMLElement;
  controls: HTMLElement;
  error: HTMLElement;
  results: HTMLElement;
  editor: HTMLElement;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status > 0 ? `API error ${err.status}: ${err.message}` : err.message;
  }
  return String(err);
}

function isAbort(err: unknown): boolean {
  return err instanceof Error && err.name === "AbortError";
}

export class App {
  tags: TagRow[] = [];
  controls: Controls = defaultControls();
  health: HealthInfo | null = null;
  modelInfo: ModelInfo | null = null;
  results: SolveResponse | null = null;
  resultSpecs: TagSpec[] = []; // selection snapshot the results were solved with
  editor: EditorSession | null = null;
  error: string | null = null;
  busy = false;

  private retry: (() => void) | null = null;
  private solveCtl: AbortController | null = null;
  private probeCtl: AbortController | null = null;
  private probeTimer: ReturnType<typeof setTimeout> | null = null;
  private probeSeq = 0;
  private readonly debounceMs: number;
  private readonly regions: Regions;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    opts: AppOptions = {},
  ) {
    this.debounceMs = opts.debounceMs ?? 150;
    this.regions = this.buildSkeleton();
  }

  async start(): Promise<void> {
    this.error = null;
    try {
      this.health = await this.client.health();
      this.modelInfo = await this.client.model();
      this.tags = initTags(this.modelInfo.tags);
    } catch (err) {
      this.fail(err, () => void this.start());
    }
    this.render();
  }

  async solve(): Promise<void> {
    if (!canSolve(this.tags)) {
      return;
    }
    this.solveCtl?.abort();
    const ctl = new AbortController();
    this.solveCtl = ctl;
    this.busy = true;
    this.error = null;
    this.closeEditor();
    this.render();

    const specs = tagSpecs(this.tags);
    try {
      const res = await this.client.solve(
        buildSolveRequest(this.tags, this.controls), ctl.signal);
      if (ctl !== this.solveCtl) {
        return; // superseded by a newer solve
      }
      this.results = res;
      this.resultSpecs = specs;
    } catch (err) {
      if (isAbort(err) || ctl !== this.solveCtl) {
        return;
      }
      this.fail(err, () => void this.solve());
    } finally {
      if (ctl === this.solveCtl) {
        this.busy = false;
        this.render();
      }
    }
  }

  // Open the what-if editor on a result row. The initial numbers come
  // from a fresh POST /score, which also carries the rank badge.
  async inspect(bits: string): Promise<void> {
    this.probeSeq += 1;
    const seq = this.probeSeq;
    this.probeCtl?.abort();
    const ctl = new AbortController();
    this.probeCtl = ctl;
    this.editor = { bits, score: null, prevScore: null };
    this.render();
    try {
      const score = await this.client.score(
        { tags: this.resultSpecs, bits }, ctl.signal);
      if (seq !== this.probeSeq || !this.editor || this.editor.bits !== bits) {
        return;
      }
      this.editor.score = score;
    } catch (err) {
      if (isAbort(err)) {
        return;
      }
      this.fail(err, () => void this.inspect(bits));
    }
    this.render();
  }

  // Flip one attribute in the editor. The toggle moves immediately
  // (it is input, not output); the score arrives by round-trip after
  // the debounce window, and stale responses are dropped.
  flip(index: number): void {
    if (!this.editor) {
      return;
    }
    this.editor.bits = flipBit(this.editor.bits, index);
    this.render();
    if (this.probeTimer !== null) {
      clearTimeout(this.probeTimer);
    }
    this.probeSeq += 1;
    const seq = this.probeSeq;
    const bits = this.editor.bits;
    this.probeTimer = setTimeout(() => {
      this.probeTimer = null;
      void this.probe(seq, bits);
    }, this.debounceMs);
  }

  private async probe(seq: number, bits: string): Promise<void> {
    this.probeCtl?.abort();
    const ctl = new AbortController();
    this.probeCtl = ctl;
    try {
      const score = await this.client.score(
        { tags: this.resultSpecs, bits }, ctl.signal);
      if (seq !== this.probeSeq || !this.editor || this.editor.bits !== bits) {
        return; // a newer flip superseded this probe
      }
      this.editor.prevScore = this.editor.score ? this.editor.score.score : null;
      this.editor.score = score;
      this.render();
    } catch (err) {
      if (isAbort(err)) {
        return;
      }
      this.fail(err, null);
      this.render();
    }
  }

  closeEditor(): void {
    if (this.probeTimer !== null) {
      clearTimeout(this.probeTimer);
      this.probeTimer = null;
    }
    this.probeCtl?.abort();
    this.probeCtl = null;
    this.editor = null;
  }

  private fail(err: unknown, retry: (() => void) | null): void {
    this.error = describe(err);
    this.retry = retry;
  }

  private buildSkeleton(): Regions {
    const doc = this.root.ownerDocument;
    this.root.replaceChildren();
    this.root.classList.add("tagmax-app");

    const header = doc.createElement("header");
    const title = doc.createElement("h1");
    title.textContent = "tagmax";
    header.appendChild(title);
    const status = doc.createElement("div");
    status.className = "status";
    header.appendChild(status);
    this.root.appendChild(header);

    const modelLine = doc.createElement("p");
    modelLine.className = "model-line";
    this.root.appendChild(modelLine);

    const error = doc.createElement("div");
    error.className = "error-region hidden";
    this.root.appendChild(error);

    const layout = doc.createElement("div");
    layout.className = "layout";
    const aside = doc.createElement("aside");
    const tagPanel = doc.createElement("section");
    tagPanel.className = "tag-panel";
    aside.appendChild(tagPanel);
    const controls = doc.createElement("section");
    controls.className = "controls";
    aside.appendChild(controls);
    layout.appendChild(aside);

    const main = doc.createElement("main");
    const results = doc.createElement("section");
    results.className = "results";
    main.appendChild(results);
    const editor = doc.createElement("section");
    editor.className = "editor hidden";
    main.appendChild(editor);
    layout.appendChild(main);
    this.root.appendChild(layout);

    return { status, modelLine, tagPanel, controls, error, results, editor };
  }

  render(): void {
    const r = this.regions;
    renderStatus(r.status, this.health);
    if (this.modelInfo) {
      const mi = this.modelInfo;
      r.modelLine.textContent =
        `${mi.m} attributes, ${mi.r} tags, trained on ${mi.n} rows`;
    }
    renderError(r.error, this.error, this.retry);
    renderTagPanel(r.tagPanel, this.tags, {
      toggle: (i, selected) => {
        this.tags[i].selected = selected;
        this.render();
      },
      weight: (i, w) => {
        this.tags[i].weight = clampWeight(w);
        this.render();
      },
      polarity: (i) => {
        const t = this.tags[i];
        t.polarity = t.polarity === "desirable" ? "undesirable" : "desirable";
        this.render();
      },
    });
    renderControls(r.controls, this.tags, this.controls, this.busy, {
      algo: (v) => {
        this.controls.algo = v as Algorithm;
        this.render();
      },
      k: (v) => {
        if (Number.isInteger(v) && v >= 1) {
          this.controls.k = v;
        }
        this.render();
      },
      mprime: (v) => {
        this.controls.mprime = v;
        this.render();
      },
      epsilon: (v) => {
        if (Number.isFinite(v) && v > 0) {
          this.controls.epsilon = v;
        }
        this.render();
      },
      restarts: (v) => {
        if (Number.isInteger(v) && v >= 1) {
          this.controls.restarts = v;
        }
        this.render();
      },
      seed: (v) => {
        if (Number.isInteger(v)) {
          this.controls.seed = v;
        }
        this.render();
      },
      solve: () => void this.solve(),
    });
    renderResults(
      r.results, this.results, this.resultSpecs,
      this.editor ? this.editor.bits : null,
      (bits) => void this.inspect(bits));
    renderEditor(
      r.editor,
      this.modelInfo ? this.modelInfo.attributes : [],
      this.editor && this.editor.score
        ? {
            bits: this.editor.bits,
            score: this.editor.score,
            prevScore: this.editor.prevScore,
            pending: this.editor.bits !== this.editor.score.bits,
          }
        : null,
      {
        flip: (i) => this.flip(i),
        close: () => {
          this.closeEditor();
          this.render();
        },
      });
  }
}

export function mount(root: HTMLElement, base?: string): App {
  const fallback =
    (globalThis as { TAGMAX_API_BASE?: string }).TAGMAX_API_BASE ?? "";
  const client = new ApiClient(base ?? fallback);
  const app = new App(root, client);
  void app.start();
  return app;
}

const rootEl =
  typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootEl) {
  mount(rootEl);
}
