export {
  DIAGNOSTICS_COLUMNS,
  SEPARATION_COLUMNS,
  CONVERGENCE_COLUMNS,
  FileNotFoundError,
  SchemaMismatchError,
  readConvergenceCsv,
  readNumericCsv,
} from "./schema.js";
export {
  CorruptSnapshotError,
  FIELD_ORDER,
  lambdaMinField,
  readSnapshot,
} from "./snapshot.js";
export {
  plotConvergence,
  plotEnergy,
  plotField,
  plotLambdaMin,
  plotSeparation,
} from "./figures.js";
export { heatmap, linePlot } from "./svg.js";
