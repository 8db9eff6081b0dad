/** Flexion-bundle schema (kokonet/flexion-bundle/1) parsing and validation. */

export const BUNDLE_SCHEMA = "kokonet/flexion-bundle/1";

export const VERTEX_LABELS = [
  "A1", "A2", "A3", "A4",
  "B1", "B2", "B3", "B4",
  "C1", "C2", "C3", "C4",
] as const;

export type VertexLabel = (typeof VERTEX_LABELS)[number];

export type Vec3 = [number, number, number];

export interface BundleSample {
  t: number;
  theta: [number, number, number, number];
  vertices: Record<VertexLabel, Vec3>;
}

export interface NetAnglesJson {
  alpha: number[];
  beta: number[];
  gamma: number[];
  delta: number[];
}

export interface FlexionBundle {
  schema: string;
  net: NetAnglesJson;
  lengths: unknown;
  branch: string;
  samples: BundleSample[];
  provenance?: string;
}

/** The 9 faces, by vertex label, in the exporter's canonical order. */
export const FACES: { name: string; labels: VertexLabel[] }[] = [
  { name: "central", labels: ["A1", "A2", "A3", "A4"] },
  { name: "side12", labels: ["B1", "A1", "A2", "B2"] },
  { name: "side23", labels: ["C2", "A2", "A3", "C3"] },
  { name: "side34", labels: ["B3", "A3", "A4", "B4"] },
  { name: "side41", labels: ["C4", "A4", "A1", "C1"] },
  { name: "corner1", labels: ["B1", "A1", "C1"] },
  { name: "corner2", labels: ["B2", "A2", "C2"] },
  { name: "corner3", labels: ["B3", "A3", "C3"] },
  { name: "corner4", labels: ["B4", "A4", "C4"] },
];

export class BundleSchemaError extends Error {
  constructor(message: string, readonly foundSchema?: string) {
    super(message);
    this.name = "BundleSchemaError";
  }
}

function isVec3(v: unknown): v is Vec3 {
  return Array.isArray(v) && v.length === 3 && v.every((x) => typeof x === "number");
}

function checkAngles(net: unknown): NetAnglesJson {
  if (typeof net !== "object" || net === null) {
    throw new BundleSchemaError("bundle net block missing");
  }
  const record = net as Record<string, unknown>;
  for (const key of ["alpha", "beta", "gamma", "delta"]) {
    const arr = record[key];
    if (!Array.isArray(arr) || arr.length !== 4 || !arr.every((x) => typeof x === "number")) {
      throw new BundleSchemaError(`net.${key} must be four numbers`);
    }
  }
  return net as NetAnglesJson;
}

/** Parse and validate a bundle payload; throws BundleSchemaError on mismatch. */
export function parseBundle(data: unknown): FlexionBundle {
  if (typeof data !== "object" || data === null) {
    throw new BundleSchemaError("bundle payload is not an object");
  }
  const record = data as Record<string, unknown>;
  if (record.schema !== BUNDLE_SCHEMA) {
    throw new BundleSchemaError(
      `unsupported bundle schema (expected ${BUNDLE_SCHEMA})`,
      typeof record.schema === "string" ? record.schema : undefined,
    );
  }
  const net = checkAngles(record.net);
  if (!Array.isArray(record.samples)) {
    throw new BundleSchemaError("bundle samples must be an array");
  }
  const samples: BundleSample[] = record.samples.map((raw, index) => {
    const s = raw as Record<string, unknown>;
    if (typeof s.t !== "number") {
      throw new BundleSchemaError(`sample ${index}: t must be a number`);
    }
    const theta = s.theta;
    if (!Array.isArray(theta) || theta.length !== 4 || !theta.every((x) => typeof x === "number")) {
      throw new BundleSchemaError(`sample ${index}: theta must be four numbers`);
    }
    const vertices = s.vertices as Record<string, unknown>;
    if (typeof vertices !== "object" || vertices === null) {
      throw new BundleSchemaError(`sample ${index}: vertices block missing`);
    }
    for (const label of VERTEX_LABELS) {
      if (!isVec3(vertices[label])) {
        throw new BundleSchemaError(`sample ${index}: vertex ${label} must be [x, y, z]`);
      }
    }
    return {
      t: s.t,
      theta: [theta[0], theta[1], theta[2], theta[3]],
      vertices: vertices as Record<VertexLabel, Vec3>,
    };
  });
  return {
    schema: BUNDLE_SCHEMA,
    net,
    lengths: record.lengths,
    branch: typeof record.branch === "string" ? record.branch : "+",
    samples,
    provenance: typeof record.provenance === "string" ? record.provenance : undefined,
  };
}

/** Sampled flexion parameter range, or null for an empty bundle. */
export function parameterRange(bundle: FlexionBundle): [number, number] | null {
  if (bundle.samples.length === 0) return null;
  let lo = bundle.samples[0].t;
  let hi = lo;
  for (const s of bundle.samples) {
    lo = Math.min(lo, s.t);
    hi = Math.max(hi, s.t);
  }
  return [lo, hi];
}
