// @vitest-environment jsdom
//
// Drives the App against a stub client. Canned payloads were captured
// from the real service on the bundled demo catalog, so the shapes and
// numbers are genuine; what these tests pin down is that the UI only
// ever displays what the API returned.

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type {
  ApiClient,
  HealthInfo,
  ModelInfo,
  ScoreRequest,
  ScoreResponse,
  SolveRequest,
  SolveResponse,
} from "../src/api.js";
import { ApiError } from "../src/api.js";
import { fmtCount, fmtDelta, fmtScore, fmtWallTime } from "../src/format.js";
import { App } from "../src/main.js";

const HEALTH: HealthInfo = { status: "ok", backend: "compiled", model_loaded: true };

const MODEL: ModelInfo = {
  format: "tagmax-model",
  version: 1,
  n: 8,
  m: 4,
  r: 2,
  attributes: ["A1", "A2", "A3", "A4"],
  tags: ["T1", "T2"],
  prevalence: { T1: 0.375, T2: 0.625 },
  smoothing: { m_weight: 1.0, prior_mode: "uniform" },
  naive_attr_cap: 24,
  backend: "compiled",
};

const SOLVE: SolveResponse = {
  algo: "ett",
  k: 3,
  entries: [
    {
      bits: "1110",
      score: 1.7676514482134755,
      tag_scores: [0.8734723220703904, 0.894179126143085],
      per_tag: [0.8734723220703904, 0.894179126143085],
    },
    {
      bits: "1011",
      score: 1.7664810818869525,
      tag_scores: [0.8994860079953881, 0.8669950738915644],
      per_tag: [0.8994860079953881, 0.8669950738915644],
    },
    {
      bits: "1111",
      score: 1.7314937043735363,
      tag_scores: [0.7931844888366528, 0.9383092155368835],
      per_tag: [0.7931844888366528, 0.9383092155368835],
    },
  ],
  stats: {
    algorithm: "ett",
    candidates_examined: 10,
    iterations: 5,
    wall_time: 0.0012,
    detail: {},
  },
};

const SCORES: Record<string, ScoreResponse> = {
  "1110": {
    bits: "1110",
    score: 1.7676514482134755,
    per_tag: [
      { name: "T1", weight: 1.0, polarity: "desirable",
        tag_score: 0.8734723220703904, contribution: 0.8734723220703904 },
      { name: "T2", weight: 1.0, polarity: "desirable",
        tag_score: 0.894179126143085, contribution: 0.894179126143085 },
    ],
    rank: 1,
    total: 16,
  },
  "1111": {
    bits: "1111",
    score: 1.7314937043735363,
    per_tag: [
      { name: "T1", weight: 1.0, polarity: "desirable",
        tag_score: 0.7931844888366528, contribution: 0.7931844888366528 },
      { name: "T2", weight: 1.0, polarity: "desirable",
        tag_score: 0.9383092155368835, contribution: 0.9383092155368835 },
    ],
    rank: 3,
    total: 16,
  },
  "1101": {
    bits: "1101",
    score: 0.9255992027591602,
    per_tag: [
      { name: "T1", weight: 1.0, polarity: "desirable",
        tag_score: 0.17300299017520132, contribution: 0.17300299017520132 },
      { name: "T2", weight: 1.0, polarity: "desirable",
        tag_score: 0.7525962125839588, contribution: 0.7525962125839588 },
    ],
    rank: 9,
    total: 16,
  },
};

class StubClient {
  solveCalls: SolveRequest[] = [];
  scoreCalls: ScoreRequest[] = [];
  solveImpl: (req: SolveRequest, signal?: AbortSignal) => Promise<SolveResponse> =
    async () => SOLVE;
  scoreImpl: (req: ScoreRequest, signal?: AbortSignal) => Promise<ScoreResponse> =
    async (req) => {
      const hit = SCORES[req.bits];
      if (!hit) {
        throw new Error(`no canned score for ${req.bits}`);
      }
      return hit;
    };

  async health(): Promise<HealthInfo> {
    return HEALTH;
  }

  async model(): Promise<ModelInfo> {
    return MODEL;
  }

  solve(req: SolveRequest, signal?: AbortSignal): Promise<SolveResponse> {
    this.solveCalls.push(req);
    return this.solveImpl(req, signal);
  }

  score(req: ScoreRequest, signal?: AbortSignal): Promise<ScoreResponse> {
    this.scoreCalls.push(req);
    return this.scoreImpl(req, signal);
  }
}

let root: HTMLElement;
let stub: StubClient;
let app: App;

function text(selector: string): string {
  const node = root.querySelector(selector);
  expect(node, `missing ${selector}`).not.toBeNull();
  return (node as HTMLElement).textContent ?? "";
}

function texts(selector: string): string[] {
  return Array.from(root.querySelectorAll(selector), (n) => n.textContent ?? "");
}

function click(selector: string, nth = 0): void {
  const node = root.querySelectorAll(selector)[nth] as HTMLElement | undefined;
  expect(node, `missing ${selector}[${nth}]`).toBeDefined();
  node!.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

function pickTag(nth: number): void {
  const box = root.querySelectorAll(".tag-check")[nth] as HTMLInputElement;
  box.checked = true;
  box.dispatchEvent(new Event("change", { bubbles: true }));
}

async function boot(): Promise<void> {
  await app.start();
  pickTag(0);
  pickTag(1);
}

async function solveAndOpen(bits = "1110"): Promise<void> {
  await app.solve();
  await app.inspect(bits);
}

beforeEach(() => {
  root = document.createElement("div");
  document.body.appendChild(root);
  stub = new StubClient();
  app = new App(root, stub as unknown as ApiClient, { debounceMs: 150 });
});

afterEach(() => {
  root.remove();
  vi.useRealTimers();
});

describe("boot and selection guard", () => {
  it("renders the model's tags with solve disabled until a pick", async () => {
    await app.start();
    expect(texts(".tag-name")).toEqual(["T1", "T2"]);
    expect(text(".model-line")).toBe("4 attributes, 2 tags, trained on 8 rows");
    expect(text(".backend-chip")).toBe("backend: compiled");

    const solveBtn = root.querySelector(".solve-btn") as HTMLButtonElement;
    expect(solveBtn.disabled).toBe(true);

    pickTag(0);
    expect((root.querySelector(".solve-btn") as HTMLButtonElement).disabled).toBe(false);

    const box = root.querySelector(".tag-check") as HTMLInputElement;
    box.checked = false;
    box.dispatchEvent(new Event("change", { bubbles: true }));
    expect((root.querySelector(".solve-btn") as HTMLButtonElement).disabled).toBe(true);
  });

  it("keeps weight and polarity controls inert for unselected tags", async () => {
    await app.start();
    expect((root.querySelector(".weight-slider") as HTMLInputElement).disabled).toBe(true);
    expect((root.querySelector(".polarity-btn") as HTMLButtonElement).disabled).toBe(true);
    pickTag(0);
    expect((root.querySelector(".weight-slider") as HTMLInputElement).disabled).toBe(false);
  });
});

describe("solve rendering", () => {
  it("lists candidates in response order with scores from the payload", async () => {
    await boot();
    await app.solve();

    expect(stub.solveCalls).toHaveLength(1);
    expect(stub.solveCalls[0]).toEqual({
      algo: "ett",
      k: 3,
      tags: [
        { name: "T1", weight: 1, polarity: "desirable" },
        { name: "T2", weight: 1, polarity: "desirable" },
      ],
    });

    expect(texts(".bits-cell")).toEqual(["1110", "1011", "1111"]);
    expect(texts(".score-cell")).toEqual(SOLVE.entries.map((e) => fmtScore(e.score)));
    expect(text(".stats-line")).toBe(
      `ett: examined ${fmtCount(10)} candidates in ${fmtWallTime(0.0012)}`);
  });

  it("shows only numbers taken from the recorded response", async () => {
    await boot();
    await app.solve();

    const allowed = new Set<string>();
    for (const e of SOLVE.entries) {
      allowed.add(fmtScore(e.score));
      for (const s of e.tag_scores) {
        allowed.add(fmtScore(s));
      }
    }
    const shown = [...texts(".score-cell"), ...texts(".results .bar-value")];
    expect(shown.length).toBeGreaterThan(0);
    for (const t of shown) {
      expect(allowed, `unexpected number ${t}`).toContain(t);
    }
  });
});

describe("what-if editor", () => {
  it("opens from a row via a fresh score round-trip", async () => {
    await boot();
    await solveAndOpen();

    expect(stub.scoreCalls).toHaveLength(1);
    expect(stub.scoreCalls[0].bits).toBe("1110");
    expect(text(".editor-bits")).toBe("1110");
    expect(text(".editor-score")).toBe(fmtScore(SCORES["1110"].score));
    expect(text(".rank-badge")).toBe("rank 1 of 16");
    expect(texts(".attr-toggle").join("")).toBe("A1A2A3A4");
    expect(
      Array.from(root.querySelectorAll(".attr-toggle"),
        (b) => (b as HTMLElement).getAttribute("aria-pressed")),
    ).toEqual(["true", "true", "true", "false"]);
    expect(texts(".editor-contrib")).toEqual(
      SCORES["1110"].per_tag.map((p) => fmtScore(p.contribution)));
  });

  it("debounces rapid flips into one request for the final bits", async () => {
    await boot();
    await solveAndOpen();
    vi.useFakeTimers();

    click(".attr-toggle", 3); // 1110 -> 1111
    expect(text(".editor-bits")).toBe("1111");
    expect(root.querySelector(".score-line.pending")).not.toBeNull();
    click(".attr-toggle", 2); // 1111 -> 1101
    await vi.advanceTimersByTimeAsync(300);

    expect(stub.scoreCalls).toHaveLength(2); // open + one combined probe
    expect(stub.scoreCalls[1].bits).toBe("1101");
    expect(text(".editor-score")).toBe(fmtScore(SCORES["1101"].score));
    expect(text(".rank-badge")).toBe("rank 9 of 16");
    expect(root.querySelector(".score-line.pending")).toBeNull();
  });

  it("flipping the last bit shows the round-trip drop, and flipping back restores", async () => {
    await boot();
    await solveAndOpen();
    vi.useFakeTimers();

    click(".attr-toggle", 3);
    await vi.advanceTimersByTimeAsync(300);
    expect(text(".editor-bits")).toBe("1111");
    expect(text(".editor-score")).toBe(fmtScore(SCORES["1111"].score));
    const drop = SCORES["1111"].score - SCORES["1110"].score;
    expect(text(".editor-delta")).toBe(fmtDelta(drop));
    expect(root.querySelector(".editor-delta")!.className).toContain("delta-down");
    expect(text(".rank-badge")).toBe("rank 3 of 16");

    click(".attr-toggle", 3);
    await vi.advanceTimersByTimeAsync(300);
    expect(text(".editor-bits")).toBe("1110");
    expect(text(".editor-score")).toBe(fmtScore(SCORES["1110"].score));
    expect(root.querySelector(".editor-delta")!.className).toContain("delta-up");
    expect(text(".rank-badge")).toBe("rank 1 of 16");
  });

  it("drops stale probe responses when flips race", async () => {
    await boot();
    await solveAndOpen();
    vi.useFakeTimers();

    let releaseFirst: (r: ScoreResponse) => void = () => {};
    const gated = new Promise<ScoreResponse>((resolve) => {
      releaseFirst = resolve;
    });
    stub.scoreImpl = (req) =>
      req.bits === "1111" ? gated : Promise.resolve(SCORES[req.bits]);

    click(".attr-toggle", 3); // -> 1111, probe gated
    await vi.advanceTimersByTimeAsync(300);
    click(".attr-toggle", 3); // -> back to 1110 before the response lands
    await vi.advanceTimersByTimeAsync(300);
    releaseFirst(SCORES["1111"]);
    await vi.advanceTimersByTimeAsync(50);

    expect(text(".editor-bits")).toBe("1110");
    expect(text(".editor-score")).toBe(fmtScore(SCORES["1110"].score));
  });
});

describe("solve lifecycle", () => {
  it("renders the latest solve when an earlier one is superseded", async () => {
    await boot();

    let releaseFirst: (r: SolveResponse) => void = () => {};
    const first = new Promise<SolveResponse>((resolve) => {
      releaseFirst = resolve;
    });
    const slowFirst = { ...SOLVE, entries: [...SOLVE.entries].reverse() };
    let call = 0;
    stub.solveImpl = () => {
      call += 1;
      return call === 1 ? first : Promise.resolve(SOLVE);
    };

    const p1 = app.solve();
    const p2 = app.solve();
    releaseFirst(slowFirst);
    await Promise.all([p1, p2]);

    expect(texts(".bits-cell")).toEqual(["1110", "1011", "1111"]);
  });

  it("surfaces API failures inline and retries", async () => {
    await boot();
    stub.solveImpl = async () => {
      throw new ApiError(422, "naive is capped at 24 attributes, model has 30");
    };
    await app.solve();
    expect(text(".error-text")).toContain("API error 422");
    expect(text(".error-text")).toContain("capped at 24 attributes");

    stub.solveImpl = async () => SOLVE;
    click(".retry-btn");
    await new Promise((r) => setTimeout(r, 0));
    expect(root.querySelector(".error-banner")).toBeNull();
    expect(texts(".bits-cell")).toEqual(["1110", "1011", "1111"]);
  });
});
