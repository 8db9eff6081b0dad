import { BUNDLE_SCHEMA, VERTEX_LABELS } from "../src/bundle.js";

export interface MutablePayload {
  schema: string;
  net: Record<string, number[]>;
  lengths: Record<string, unknown>;
  branch: string;
  samples: { t: number; theta: number[]; vertices: Record<string, number[]> }[];
  provenance?: string;
}

/** A structurally valid bundle payload with n evenly spaced samples. */
export function makeBundlePayload(n: number): MutablePayload {
  const samples = [];
  for (let i = 0; i < n; i++) {
    const t = n === 1 ? 0 : i / (n - 1);
    const vertices: Record<string, number[]> = {};
    VERTEX_LABELS.forEach((label, k) => {
      vertices[label] = [k * 0.1, t, 0.5 * t + 0.01 * k];
    });
    samples.push({
      t,
      theta: [1.9 - 0.1 * t, 1.6, 1.2 + 0.1 * t, 1.23],
      vertices,
    });
  }
  return {
    schema: BUNDLE_SCHEMA,
    net: {
      alpha: [1.83, 1.57, 1.57, 1.83],
      beta: [0.26, 2.09, 1.05, 0.26],
      gamma: [2.09, 0.26, 2.88, 2.09],
      delta: [1.57, 1.83, 1.31, 1.57],
    },
    lengths: { a1a2: 1, a2a3: 1, wing_b: [1, 1, 1, 1], wing_c: [1, 1, 1, 1] },
    branch: "+",
    samples,
    provenance: "closed-form",
  };
}
