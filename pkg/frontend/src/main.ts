/** DOM wiring: file loading, the flexion slider, and the design form. */
import { KokonetClient } from "./api.js";
import { parseBundle, BundleSchemaError, parameterRange } from "./bundle.js";
import { NetScene } from "./render.js";
import { checkLines, classificationLines, selfIntersectionFlags, solutionSummary } from "./report.js";
import {
  ViewerState,
  clampSlider,
  displayFrame,
  initialState,
  loadBundle,
  nearestSampleIndex,
} from "./state.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let state: ViewerState = initialState();
const client = new KokonetClient("");
const scene = new NetScene($("scene"));
let sliderTimer: number | undefined;

function setBanner(text: string, isError = false): void {
  const banner = $("banner");
  banner.textContent = text;
  banner.className = isError ? "banner error" : "banner";
}

function renderFrame(): void {
  if (!state.bundle) {
    scene.showFrame(null);
    $("frame-info").textContent = "no bundle loaded";
    return;
  }
  const frame = displayFrame(state.bundle, state.tSlider);
  if (!frame) {
    scene.showFrame(null);
    $("frame-info").textContent = "bundle has no samples";
    return;
  }
  const flagged = frame.sampleIndex !== null
    && state.selfIntersecting[frame.sampleIndex] === true;
  scene.showFrame(frame, flagged);
  const thetaDeg = frame.theta.map((x) => ((x * 180) / Math.PI).toFixed(4));
  const note = frame.interpolated
    ? " (interpolated frame - visual only)"
    : ` (stored sample ${frame.sampleIndex})`;
  $("frame-info").textContent =
    `t = ${frame.t.toFixed(6)}  theta = [${thetaDeg.join(", ")}] deg${note}`;
}

function applyBundle(bundleData: unknown): void {
  try {
    const bundle = parseBundle(bundleData);
    state = loadBundle(state, bundle);
    const slider = $<HTMLInputElement>("t-slider");
    const range = parameterRange(bundle);
    if (range) {
      slider.min = String(range[0]);
      slider.max = String(range[1]);
      slider.step = String((range[1] - range[0]) / 1000 || 1e-6);
      slider.value = String(range[0]);
    }
    setBanner(`loaded bundle: ${bundle.samples.length} samples, branch ${bundle.branch}`);
    renderFrame();
  } catch (err) {
    if (err instanceof BundleSchemaError) {
      setBanner(
        `schema mismatch: ${err.message}` +
          (err.foundSchema ? ` (found ${err.foundSchema})` : ""),
        true,
      );
    } else {
      setBanner(String(err), true);
    }
  }
}

$("bundle-file").addEventListener("change", async (event) => {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  applyBundle(JSON.parse(await file.text()));
});

$("t-slider").addEventListener("input", (event) => {
  const value = Number((event.target as HTMLInputElement).value);
  state = { ...state, tSlider: clampSlider(state.bundle, value) };
  // debounce re-render while dragging
  if (sliderTimer !== undefined) window.clearTimeout(sliderTimer);
  sliderTimer = window.setTimeout(renderFrame, 16);
});

$("qs-button").addEventListener("click", async () => {
  try {
    setBanner("building quasi-symmetric net...");
    const alpha = Number($<HTMLInputElement>("qs-alpha").value);
    const beta = Number($<HTMLInputElement>("qs-beta").value);
    const gamma = Number($<HTMLInputElement>("qs-gamma").value);
    const branch = state.branchToggle === 1 ? "+" : "-";
    const response = await client.qs(alpha, beta, gamma, branch, 40);
    applyBundle(response.bundle);
    state.selfIntersecting = selfIntersectionFlags(response.check);
    $("report").textContent = [
      ...classificationLines(response.classification),
      "",
      ...checkLines(response.check),
    ].join("\n");
    renderFrame();
  } catch (err) {
    setBanner(String(err), true);
  }
});

$("branch-toggle").addEventListener("click", () => {
  state = { ...state, branchToggle: state.branchToggle === 1 ? -1 : 1 };
  $("branch-toggle").textContent = `branch: ${state.branchToggle === 1 ? "+" : "-"}`;
});

$("search-button").addEventListener("click", async () => {
  if (state.searchStatus.kind === "running") return; // one in-flight search
  const read = (id: string) =>
    $<HTMLInputElement>(id).value.split(",").map((x) => Number(x.trim()));
  try {
    state = { ...state, searchStatus: { kind: "running" } };
    setBanner("search running...");
    const response = await client.search({
      deltas_deg: read("form-deltas"),
      thetas_deg: read("form-thetas"),
      seed_count: Number($<HTMLInputElement>("form-seeds").value),
      rng_seed: Number($<HTMLInputElement>("form-rng").value),
    });
    state = {
      ...state,
      searchStatus: { kind: "done", count: response.solutions.length },
    };
    setBanner(`search done: ${response.solutions.length} verified solutions`);
    const list = response.solutions.slice(0, 25).map(solutionSummary).join("\n");
    const first = response.solutions[0];
    $("report").textContent = first
      ? [...classificationLines(first.classification), "", list].join("\n")
      : "no verified solutions";
  } catch (err) {
    state = { ...state, searchStatus: { kind: "error", message: String(err) } };
    setBanner(String(err), true);
  }
});

setBanner("load a flexion bundle or submit a design");
renderFrame();

// round-trip helper used by tests and the console
(window as unknown as Record<string, unknown>).kokonetViewer = {
  getState: () => state,
  nearestSampleIndex,
};
