// File-level entry points: read one run (or batch) directory produced by
// the simulator and write figure SVGs.  Input directories are never mutated.

import { mkdirSync, readdirSync, readFileSync, writeFileSync } from "fs";
import { join } from "path";

import {
    ArtifactError,
    MetricsDocSchema,
    ScenarioEchoSchema,
    SummaryDocSchema,
    parseSnapshot,
    parseTrajectory,
    readJson,
    type SummaryDoc,
    type Trajectory,
} from "./parse.js";
import {
    detectionCurvesFigure,
    finalDetectionsFigure,
    metricsFigure,
    snapshotPanel,
    type ArmCurves,
    type ArmFinals,
} from "./figures.js";

export interface RenderResult {
    /** Paths of every figure written, in write order. */
    files: string[];
    warnings: string[];
}

const SNAPSHOT_RE = /^snapshot_(t.+)\.txt$/;

function readText(path: string, what: string): string {
    try {
        return readFileSync(path, "utf8");
    } catch {
        throw new ArtifactError(`missing ${what}: ${path}`);
    }
}

function windowedPath(
    traj: Trajectory,
    t0: number,
    t1: number
): Array<readonly [number, number]> {
    const out: Array<readonly [number, number]> = [];
    for (let i = 0; i < traj.t.length; i++) {
        if (traj.t[i] >= t0 - 1e-9 && traj.t[i] <= t1 + 1e-9) {
            out.push([traj.points[i][0], traj.points[i][1]]);
        }
    }
    return out;
}

/**
 * Render one trial directory: a heatmap panel per posterior snapshot
 * (estimate contour + trajectory since the previous panel) and one
 * metrics time-series figure.
 */
export function renderRun(runDir: string, outDir: string): RenderResult {
    const scenario = readJson(
        join(runDir, "scenario.json"), ScenarioEchoSchema, "scenario echo");
    const metrics = readJson(
        join(runDir, "metrics.json"), MetricsDocSchema, "metrics log");

    const snapshotFiles = readdirSync(runDir)
        .filter((f) => SNAPSHOT_RE.test(f))
        .sort((a, b) => snapshotTime(a) - snapshotTime(b));

    mkdirSync(outDir, { recursive: true });
    const files: string[] = [];
    const warnings: string[] = [];

    if (snapshotFiles.length === 0) {
        warnings.push(`no posterior snapshots in ${runDir}; rendering the metrics figure only`);
    } else if (scenario.dimension !== 2) {
        warnings.push(
            `${snapshotFiles.length} snapshot(s) skipped: only 2D grids are rendered ` +
            `(run is ${scenario.dimension}D)`
        );
    } else {
        const traj = parseTrajectory(
            readText(join(runDir, "trajectory.csv"), "trajectory table"),
            join(runDir, "trajectory.csv")
        );
        let prev = 0.0;
        for (const name of snapshotFiles) {
            const path = join(runDir, name);
            const snap = parseSnapshot(readText(path, "posterior snapshot"), path);
            if (snap.res !== scenario.grid.resolution) {
                throw new ArtifactError(
                    `${path}: res=${snap.res} does not match scenario grid ` +
                    `resolution ${scenario.grid.resolution}`
                );
            }
            const panel = snapshotPanel({
                title: `${scenario.name} — t = ${snap.t.toFixed(2)} s`,
                res: snap.res,
                posterior: snap.posterior,
                decision: snap.decision,
                path: windowedPath(traj, prev, snap.t),
            });
            const out = join(outDir, name.replace(SNAPSHOT_RE, "panel_$1.svg"));
            writeFileSync(out, panel);
            files.push(out);
            prev = snap.t;
        }
    }

    const metricsOut = join(outDir, "metrics.svg");
    writeFileSync(metricsOut, metricsFigure(metrics.rows, `${scenario.name} — metrics`));
    files.push(metricsOut);
    return { files, warnings };
}

function snapshotTime(name: string): number {
    const m = SNAPSHOT_RE.exec(name);
    return m ? Number(m[1].slice(1)) : NaN;
}

// ── batch comparison ────────────────────────────────────

interface GoodTrial {
    detectionTimes: Array<number | null>;
}

function goodTrials(summary: SummaryDoc, policy: string): GoodTrial[] {
    const out: GoodTrial[] = [];
    for (const row of summary.arms[policy]) {
        if (row.error !== undefined || row.detection_times === undefined) continue;
        out.push({ detectionTimes: row.detection_times });
    }
    return out;
}

function stepCurve(
    detectionTimes: Array<number | null>,
    duration: number
): { x: number[]; y: number[] } {
    const events = detectionTimes
        .filter((t): t is number => t !== null)
        .sort((a, b) => a - b);
    const x = [0];
    const y = [0];
    events.forEach((e, i) => {
        x.push(e, e);
        y.push(i, i + 1);
    });
    x.push(duration);
    y.push(events.length);
    return { x, y };
}

function meanCurve(
    trials: GoodTrial[],
    duration: number
): { x: number[]; y: number[] } {
    const n = 200;
    const x: number[] = [];
    const y: number[] = [];
    for (let i = 0; i <= n; i++) {
        const t = (duration * i) / n;
        let total = 0;
        for (const tr of trials) {
            for (const d of tr.detectionTimes) {
                if (d !== null && d <= t) total += 1;
            }
        }
        x.push(t);
        y.push(total / trials.length);
    }
    return { x, y };
}

/**
 * Render a batch directory's summary into the comparison pair: detection
 * counts over time per policy (per-trial spread + mean) and a histogram
 * of final detection counts.
 */
export function renderComparison(batchDir: string, outDir: string): RenderResult {
    const path = join(batchDir, "summary.json");
    const summary = readJson(path, SummaryDocSchema, "batch summary");
    const duration = summary.scenario.duration;
    const nShapes = summary.scenario.shapes.length;

    const warnings: string[] = [];
    const curves: ArmCurves[] = [];
    const finals: ArmFinals[] = [];
    for (const policy of Object.keys(summary.arms).sort()) {
        const rows = summary.arms[policy];
        const good = goodTrials(summary, policy);
        if (good.length < rows.length) {
            warnings.push(`${policy}: skipped ${rows.length - good.length} failed trial(s)`);
        }
        if (!good.length) continue;
        curves.push({
            policy,
            trials: good.map((g) => stepCurve(g.detectionTimes, duration)),
            mean: meanCurve(good, duration),
        });
        finals.push({
            policy,
            finals: good.map((g) => g.detectionTimes.filter((t) => t !== null).length),
        });
    }
    if (!curves.length) {
        throw new ArtifactError(`no successful trials in batch summary: ${path}`);
    }

    mkdirSync(outDir, { recursive: true });
    const name = summary.scenario.name;
    const curvesOut = join(outDir, "detection_curves.svg");
    writeFileSync(curvesOut, detectionCurvesFigure(
        curves, duration, nShapes, `${name} — shapes detected over time`));
    const finalsOut = join(outDir, "final_detections.svg");
    writeFileSync(finalsOut, finalDetectionsFigure(
        finals, nShapes, `${name} — final detections`));
    return { files: [curvesOut, finalsOut], warnings };
}
