/** Viewer state: slider/sample bookkeeping and display interpolation.
 *
 * The viewer does no geometry of its own; every number shown comes from the
 * bundle or the server.  Interpolated frames are a linear blend of the two
 * neighboring stored samples and are flagged so the UI can mark them as
 * visual-only.
 */
import {
  BundleSample,
  FlexionBundle,
  Vec3,
  VERTEX_LABELS,
  VertexLabel,
  parameterRange,
} from "./bundle.js";

export type SearchStatus =
  | { kind: "idle" }
  | { kind: "running" }
  | { kind: "done"; count: number }
  | { kind: "error"; message: string };

export interface DesignForm {
  deltasDeg: [number, number, number, number];
  thetasDeg: [number, number, number, number];
  seedCount: number;
  rngSeed: number;
}

export interface ViewerState {
  bundle: FlexionBundle | null;
  tSlider: number;
  branchToggle: 1 | -1;
  form: DesignForm;
  searchStatus: SearchStatus;
  /** per-sample self-intersection flags from the server check report */
  selfIntersecting: boolean[];
}

export function initialState(): ViewerState {
  return {
    bundle: null,
    tSlider: 0,
    branchToggle: 1,
    form: {
      deltasDeg: [120, 80, 85, 75],
      thetasDeg: [130, 140, 125, 135],
      seedCount: 2000,
      rngSeed: 0,
    },
    searchStatus: { kind: "idle" },
    selfIntersecting: [],
  };
}

export function loadBundle(state: ViewerState, bundle: FlexionBundle): ViewerState {
  const range = parameterRange(bundle);
  return {
    ...state,
    bundle,
    tSlider: range ? range[0] : 0,
    selfIntersecting: new Array(bundle.samples.length).fill(false),
  };
}

/** Clamp a requested slider value into the bundle's sampled range. */
export function clampSlider(bundle: FlexionBundle | null, t: number): number {
  if (!bundle) return 0;
  const range = parameterRange(bundle);
  if (!range) return 0;
  return Math.min(range[1], Math.max(range[0], t));
}

export function nearestSampleIndex(bundle: FlexionBundle, t: number): number {
  let best = 0;
  let bestDist = Infinity;
  bundle.samples.forEach((s, i) => {
    const d = Math.abs(s.t - t);
    if (d < bestDist) {
      bestDist = d;
      best = i;
    }
  });
  return best;
}

export interface DisplayFrame {
  vertices: Record<VertexLabel, Vec3>;
  /** the stored sample shown verbatim, or null for an interpolated frame */
  sampleIndex: number | null;
  interpolated: boolean;
  theta: [number, number, number, number];
  t: number;
}

function lerp(a: Vec3, b: Vec3, w: number): Vec3 {
  return [a[0] + (b[0] - a[0]) * w, a[1] + (b[1] - a[1]) * w, a[2] + (b[2] - a[2]) * w];
}

/** The frame shown at slider value t: a stored sample when one is close,
 * otherwise a linear vertex blend of the two neighbors (visual only). */
export function displayFrame(
  bundle: FlexionBundle,
  t: number,
  snapTolerance = 1e-9,
): DisplayFrame | null {
  if (bundle.samples.length === 0) return null;
  const sorted = [...bundle.samples].sort((a, b) => a.t - b.t);
  const clamped = Math.min(sorted[sorted.length - 1].t, Math.max(sorted[0].t, t));
  let hi = sorted.findIndex((s) => s.t >= clamped);
  if (hi < 0) hi = sorted.length - 1;
  const lo = Math.max(0, hi === 0 ? 0 : hi - 1);
  const a = sorted[lo];
  const b = sorted[hi];

  const snap = (s: BundleSample): DisplayFrame => ({
    vertices: s.vertices,
    sampleIndex: bundle.samples.indexOf(s),
    interpolated: false,
    theta: s.theta,
    t: s.t,
  });
  if (Math.abs(a.t - clamped) <= snapTolerance) return snap(a);
  if (Math.abs(b.t - clamped) <= snapTolerance) return snap(b);

  const w = b.t === a.t ? 0 : (clamped - a.t) / (b.t - a.t);
  const vertices = {} as Record<VertexLabel, Vec3>;
  for (const label of VERTEX_LABELS) {
    vertices[label] = lerp(a.vertices[label], b.vertices[label], w);
  }
  return {
    vertices,
    sampleIndex: null,
    interpolated: true,
    theta: [
      a.theta[0] + (b.theta[0] - a.theta[0]) * w,
      a.theta[1] + (b.theta[1] - a.theta[1]) * w,
      a.theta[2] + (b.theta[2] - a.theta[2]) * w,
      a.theta[3] + (b.theta[3] - a.theta[3]) * w,
    ],
    t: clamped,
  };
}

/** Stored dihedral angles of a sample, verbatim (slider round-trip). */
export function sampleTheta(bundle: FlexionBundle, index: number) {
  return bundle.samples[index].theta;
}
