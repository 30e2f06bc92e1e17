/**
 * End-to-end parity against a live analysis service: client-side flag
 * recomputation must agree with the server's /screen endpoint for random
 * thresholds, including the strict-inequality boundary.
 */
import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { recomputeFlags } from "../src/flags.js";
import type { SeriesPayload } from "../src/types.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;
const HERE = dirname(fileURLToPath(import.meta.url));
const DATA = join(HERE, "..", "..", "data", "synth");

let server: ChildProcess;
let api: ApiClient;
let sessionId: string;
let series: SeriesPayload;

async function waitForHealth(timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/api/health`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("analysis service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "ecgmee.cli", "serve", "--host", "127.0.0.1", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForHealth();
  api = new ApiClient(BASE);
  const csv = readFileSync(join(DATA, "separable.csv"));
  const ann = readFileSync(join(DATA, "separable.ann"));
  const uploaded = await api.uploadRecord(
    new Blob([csv]),
    360,
    undefined,
    new Blob([ann]),
  );
  sessionId = uploaded.session_id;
  expect(uploaded.beat_count).toBeGreaterThan(50);
  series = await api.getSeries(sessionId, 2);
});

afterAll(() => {
  server?.kill();
});

describe("client/server flag parity", () => {
  it("matches server flags for 20 random thresholds", async () => {
    // deterministic LCG so failures are reproducible
    let seed = 123456789;
    const next = () => {
      seed = (1103515245 * seed + 12345) % 2147483648;
      return seed / 2147483648;
    };
    for (let trial = 0; trial < 20; trial++) {
      const alpha = next() * 5;
      const screen = await api.getScreen(sessionId, 2, alpha);
      const local = recomputeFlags(series.fluctuation, alpha);
      expect(local).toEqual(screen.flagged);
    }
  });

  it("agrees on the exact-equality boundary", async () => {
    const f = series.fluctuation.find((v) => v > 0)!;
    const screen = await api.getScreen(sessionId, 2, f);
    const local = recomputeFlags(series.fluctuation, f);
    expect(local).toEqual(screen.flagged);
    const idx = series.fluctuation.indexOf(f);
    expect(local[idx]).toBe(false); // strict inequality on both sides
  });

  it("labels travel with the uploaded sidecar", () => {
    expect(series.labels.filter((l) => l === "V").length).toBe(7);
  });
});
