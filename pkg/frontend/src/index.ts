export {
    ArtifactError,
    MetricsDocSchema,
    MetricsRowSchema,
    ScenarioEchoSchema,
    SummaryDocSchema,
    parseSnapshot,
    parseTrajectory,
    readJson,
} from "./parse.js";
export type {
    MetricsDoc,
    MetricsRow,
    ScenarioEcho,
    SnapshotGrid,
    SummaryDoc,
    Trajectory,
    TrialRow,
} from "./parse.js";
export { posteriorColor } from "./color.js";
export { zeroContour } from "./contour.js";
export type { Segment } from "./contour.js";
export {
    detectionCurvesFigure,
    finalDetectionsFigure,
    metricsFigure,
    snapshotPanel,
    armColor,
} from "./figures.js";
export type { ArmCurves, ArmFinals, MetricsPoint, PanelInput } from "./figures.js";
export { renderComparison, renderRun } from "./render.js";
export type { RenderResult } from "./render.js";
