/** Design-loop round trip against the real local service.
 *
 * Spawns `kokonet serve`, builds a quasi-symmetric net over HTTP, fetches
 * the bundle back from the cache, and runs a small design search - the same
 * calls the page makes.
 */
import { spawn, ChildProcess } from "node:child_process";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { KokonetClient } from "../src/api.js";
import { parameterRange } from "../src/bundle.js";
import { displayFrame } from "../src/state.js";
import { classificationLines, selfIntersectionFlags } from "../src/report.js";

const PORT = 8902;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitReady(timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const r = await fetch(`${BASE}/bundle/none`);
      if (r.status === 404) return; // service is answering
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
  throw new Error("kokonet serve did not become ready");
}

beforeAll(async () => {
  server = spawn("kokonet", ["serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitReady();
}, 90_000);

afterAll(() => {
  server?.kill();
});

describe("live service round trip", () => {
  const client = new KokonetClient(BASE);

  it("builds a quasi-symmetric net and walks its bundle", async () => {
    const response = await client.qs(105, 15, 120, "+", 12);
    expect(response.classification.verdict).toBe(true);
    expect(response.bundle.samples).toHaveLength(12);

    const range = parameterRange(response.bundle)!;
    for (const sample of response.bundle.samples) {
      const frame = displayFrame(response.bundle, sample.t);
      expect(frame!.interpolated).toBe(false);
      expect(Object.keys(frame!.vertices)).toHaveLength(12);
    }
    expect(range[0]).toBeLessThan(range[1]);

    const lines = classificationLines(response.classification).join("\n");
    expect(lines).toContain("equimodular elliptic");
    expect(selfIntersectionFlags(response.check)).toHaveLength(12);

    const cached = await client.fetchBundle(response.bundle_id);
    expect(cached.samples).toHaveLength(12);
  }, 60_000);

  it("runs a design search and shows its classification", async () => {
    const out = await client.search({
      deltas_deg: [90, 90, 90, 90],
      thetas_deg: [110.0, 95.2, 70.0, 70.5],
      seed_count: 150,
      rng_seed: 3,
      trace: { enabled: false },
    });
    expect(out.stats.verified).toBeGreaterThan(0);
    const lines = classificationLines(out.solutions[0].classification);
    expect(lines.join("\n")).toContain("verdict: equimodular elliptic");
  }, 120_000);
});
