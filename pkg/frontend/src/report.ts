/** Text formatting for the classification / validation panel. */
import { CheckReport, ClassificationReport, SearchSolution } from "./api.js";

const fmt = (x: number, digits = 6) => Number(x).toPrecision(digits);

export function classificationLines(report: ClassificationReport): string[] {
  const lines = [
    `verdict: ${report.verdict ? "equimodular elliptic" : "NOT equimodular elliptic"}`,
    `modulus M = ${report.modulus === null ? "-" : fmt(report.modulus)}`,
    `moduli equal: ${report.moduli_equal} (max dev ${fmt(report.moduli_max_deviation, 3)})`,
    `amplitudes match: ${report.amplitudes_match} (max dev ${fmt(report.amplitudes_max_deviation, 3)})`,
    `period residual: ${fmt(report.period_residual, 3)}`,
  ];
  if (report.period_signs) {
    lines.push(`period signs: [${report.period_signs.join(", ")}]`);
  }
  if (report.phase_shifts) {
    const parts = report.phase_shifts.map(
      (p, i) => `t${i + 1} = ${p.m}K + ${fmt(p.v, 5)}i`,
    );
    lines.push(`phase shifts: ${parts.join(", ")}`);
  }
  if (report.failure) lines.push(`failure: ${report.failure}`);
  return lines;
}

export function checkLines(report: CheckReport): string[] {
  const lines = [
    `samples: ${report.n_samples}`,
    `face congruence deviation: ${fmt(report.face_congruence_deviation, 3)}`,
    `self-intersection: ${report.any_self_intersection ? "PRESENT" : "none"}`,
  ];
  for (const s of report.samples) {
    if (s.self_intersects) {
      lines.push(`  sample ${s.index} (t = ${fmt(s.t, 5)}) self-intersects`);
    }
  }
  return lines;
}

export function solutionSummary(solution: SearchSolution, index: number): string {
  const M = solution.classification.modulus;
  const alpha1 = solution.net.alpha.deg[0];
  return `#${index + 1}: M = ${M === null ? "-" : fmt(M, 5)}, ` +
    `alpha1 = ${fmt(alpha1, 5)} deg, residual ${fmt(solution.residual_max, 3)}`;
}

/** Flags for tinting samples red in the scene. */
export function selfIntersectionFlags(report: CheckReport): boolean[] {
  const flags = new Array(report.n_samples).fill(false);
  for (const s of report.samples) {
    if (s.index >= 0 && s.index < flags.length) flags[s.index] = s.self_intersects;
  }
  return flags;
}
