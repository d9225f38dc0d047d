/**
 * The four figure builders: energy budget, eigenvalue floor history,
 * twin-run separation against its envelope, and field heatmaps, plus a
 * convergence-order chart for the harness reports.
 */

import {
  DIAGNOSTICS_COLUMNS,
  SEPARATION_COLUMNS,
  readConvergenceCsv,
  readNumericCsv,
} from "./schema.js";
import { FIELD_ORDER, FieldName, lambdaMinField, readSnapshot } from "./snapshot.js";
import { PALETTE, Series, heatmap, linePlot } from "./svg.js";

const VORTEX_DECAY_RATE = 16 * Math.PI * Math.PI;

function cumulativeTrapezoid(t: number[], f: number[]): number[] {
  const out = [0];
  for (let i = 1; i < t.length; i++) {
    out.push(out[i - 1]! + 0.5 * (t[i]! - t[i - 1]!) * (f[i]! + f[i - 1]!));
  }
  return out;
}

export interface EnergyFigure {
  svg: string;
  /** max |measured kinetic - analytic vortex decay| / initial kinetic */
  overlayDeviation: number;
}

/**
 * Energy budget: total energy, cumulative dissipation, per-interval
 * residual and the analytic decaying-vortex overlay anchored at the
 * initial kinetic energy. The overlay deviation is annotated so a
 * benchmark run can be judged at a glance.
 */
export function plotEnergy(csvPath: string): EnergyFigure {
  const table = readNumericCsv(csvPath, DIAGNOSTICS_COLUMNS);
  const t = table.data.get("t")!;
  const kinetic = table.data.get("kinetic")!;
  const elastic = table.data.get("elastic")!;
  const dissipation = table.data.get("dissipation")!;
  const residual = table.data.get("energy_residual")!;

  const total = kinetic.map((k, i) => k + elastic[i]!);
  const dissipated = cumulativeTrapezoid(t, dissipation);
  const e0 = kinetic[0] ?? 0;
  const overlay = t.map((ti) => e0 * Math.exp(-VORTEX_DECAY_RATE * (ti - t[0]!)));
  let deviation = 0;
  for (let i = 0; i < t.length; i++) {
    deviation = Math.max(deviation, Math.abs(kinetic[i]! - overlay[i]!) / (e0 || 1));
  }

  const series: Series[] = [
    { label: "kinetic + elastic", x: t, y: total, color: PALETTE[0]! },
    { label: "kinetic", x: t, y: kinetic, color: PALETTE[2]! },
    { label: "cumulative dissipation", x: t, y: dissipated, color: PALETTE[3]! },
    { label: "interval residual", x: t, y: residual, color: PALETTE[4]! },
    {
      label: "vortex decay overlay",
      x: t,
      y: overlay,
      color: PALETTE[1]!,
      dash: "5,3",
    },
  ];
  const svg = linePlot({
    title: "Energy budget",
    xLabel: "t",
    yLabel: "energy",
    series,
    annotations: [
      `overlay max deviation ${(100 * deviation).toExponential(2)}% of E(0)`,
    ],
  });
  return { svg, overlayDeviation: deviation };
}

/** Minimal-eigenvalue history with the positivity floor marked. */
export function plotLambdaMin(csvPath: string): string {
  const table = readNumericCsv(csvPath, DIAGNOSTICS_COLUMNS);
  const t = table.data.get("t")!;
  const lambda = table.data.get("lambda_min")!;
  const floor = Math.min(...lambda);
  return linePlot({
    title: "Minimal eigenvalue of the conformation tensor",
    xLabel: "t",
    yLabel: "min over grid of lambda_min",
    series: [
      { label: "lambda_min", x: t, y: lambda, color: PALETTE[0]! },
      {
        label: "zero (positivity threshold)",
        x: [t[0] ?? 0, t[t.length - 1] ?? 1],
        y: [0, 0],
        color: PALETTE[1]!,
        dash: "4,3",
      },
    ],
    annotations: [`floor ${floor.toPrecision(4)}`],
  });
}

/** Twin-run separation against the fitted growth envelope, log scale. */
export function plotSeparation(csvPath: string): string {
  const table = readNumericCsv(csvPath, SEPARATION_COLUMNS);
  const t = table.data.get("t")!;
  const separation = table.data.get("separation")!;
  const envelope = table.data.get("envelope")!;
  let held = 0;
  let counted = 0;
  for (let i = 0; i < t.length; i++) {
    counted += 1;
    if (separation[i]! <= envelope[i]! * (1 + 1e-9) + 1e-300) held += 1;
  }
  const fraction = counted > 0 ? held / counted : 1;
  return linePlot({
    title: "Twin-run separation",
    xLabel: "t",
    yLabel: "squared L2 separation",
    logY: true,
    series: [
      { label: "separation", x: t, y: separation, color: PALETTE[0]! },
      { label: "growth envelope", x: t, y: envelope, color: PALETTE[1]!, dash: "5,3" },
    ],
    annotations: [`envelope holds at ${(100 * fraction).toFixed(1)}% of times`],
  });
}

/** Heatmap of one stored field or of the derived minimal eigenvalue. */
export function plotField(snapshotPath: string, field: string = "lambda_min"): string {
  const snap = readSnapshot(snapshotPath);
  let values: Float64Array;
  if (field === "lambda_min") {
    values = lambdaMinField(snap);
  } else if ((FIELD_ORDER as readonly string[]).includes(field)) {
    values = snap.fields.get(field as FieldName)!;
  } else {
    throw new Error(
      `unknown field ${JSON.stringify(field)}; pick one of ${[...FIELD_ORDER, "lambda_min"].join(", ")}`,
    );
  }
  return heatmap({
    title: `${field} at t = ${snap.t.toPrecision(6)}`,
    n: snap.n,
    values,
    annotations: [`${snap.n} x ${snap.n} grid`],
  });
}

/** Error-versus-resolution chart for the convergence report. */
export function plotConvergence(csvPath: string): string {
  const rows = readConvergenceCsv(csvPath);
  const groups = new Map<string, typeof rows>();
  for (const row of rows) {
    const list = groups.get(row.caseName) ?? [];
    list.push(row);
    groups.set(row.caseName, list);
  }
  const series: Series[] = [];
  let index = 0;
  for (const [name, group] of groups) {
    const spatial = new Set(group.map((r) => r.N)).size > 1;
    const x = group.map((r) => (spatial ? r.N : r.dt));
    const y = group.map((r) => Math.hypot(r.errorV, r.errorB));
    const orders = group
      .map((r) => r.order)
      .filter((o) => Number.isFinite(o))
      .map((o) => o.toFixed(2));
    series.push({
      label: `${name} (orders ${orders.join(", ") || "n/a"})`,
      x,
      y,
      color: PALETTE[index % PALETTE.length]!,
    });
    index += 1;
  }
  return linePlot({
    title: "Convergence study",
    xLabel: "N or dt per rung",
    yLabel: "combined L2 error",
    logX: true,
    logY: true,
    series,
  });
}
