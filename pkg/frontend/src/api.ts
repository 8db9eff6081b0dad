/** Client for the local kokonet HTTP service.
 *
 * fetch is injectable so the logic is testable without a network.
 */
import { FlexionBundle, parseBundle } from "./bundle.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ClassificationReport {
  elliptic: boolean;
  moduli_equal: boolean;
  moduli_max_deviation: number;
  amplitudes_match: boolean;
  amplitudes_max_deviation: number;
  phase_shifts: { m: number; v: number }[] | null;
  period_signs: number[] | null;
  period_residual: number;
  verdict: boolean;
  modulus: number | null;
  failure: string;
}

export interface CheckSampleReport {
  index: number;
  t: number;
  max_dihedral_error: number;
  max_flat_angle_error: number;
  self_intersects: boolean;
}

export interface CheckReport {
  n_samples: number;
  face_congruence_deviation: number;
  classification: ClassificationReport;
  samples: CheckSampleReport[];
  any_self_intersection: boolean;
}

export interface SearchSolution {
  params: Record<string, number>;
  epsilons: number[];
  net: Record<string, { rad: number[]; deg: number[] }>;
  classification: ClassificationReport;
  residual_max: number;
}

export interface SearchResponse {
  stats: Record<string, number>;
  solutions: SearchSolution[];
}

export interface SearchRequest {
  deltas_deg: number[];
  thetas_deg: number[];
  seed_count: number;
  rng_seed: number;
  trace?: { enabled: boolean };
}

export interface FlexResponse {
  bundle_id: string;
  bundle: FlexionBundle;
  classification: ClassificationReport;
  check: CheckReport;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function post<T>(fetchFn: FetchLike, base: string, path: string, body: unknown): Promise<T> {
  const response = await fetchFn(`${base}${path}`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  const payload = await response.json();
  if (!response.ok) {
    const detail = payload?.detail ?? payload;
    const message = typeof detail === "object" && detail !== null
      ? `${detail.error ?? "error"}: ${detail.message ?? JSON.stringify(detail)}`
      : String(detail);
    throw new ApiError(response.status, message);
  }
  return payload as T;
}

export class KokonetClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async search(request: SearchRequest): Promise<SearchResponse> {
    return post<SearchResponse>(this.fetchFn, this.base, "/search", request);
  }

  async qs(alphaDeg: number, betaDeg: number, gammaDeg: number, branch: "+" | "-",
           samples = 25): Promise<FlexResponse> {
    const payload = await post<FlexResponse>(this.fetchFn, this.base, "/qs", {
      alpha_deg: alphaDeg,
      beta_deg: betaDeg,
      gamma_deg: gammaDeg,
      branch,
      samples,
    });
    return { ...payload, bundle: parseBundle(payload.bundle) };
  }

  async fetchBundle(id: string): Promise<FlexionBundle> {
    const response = await this.fetchFn(`${this.base}/bundle/${id}`);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, `bundle ${id} not found`);
    }
    return parseBundle(payload);
  }
}
