import { readFileSync } from "fs";
import { z } from "zod";

/** A run/batch output file is missing or does not match its documented format. */
export class ArtifactError extends Error {
    constructor(message: string) {
        super(message);
        this.name = "ArtifactError";
    }
}

// ── JSON documents ──────────────────────────────────────

export const MetricsRowSchema = z.object({
    t: z.number(),
    ergodic: z.number(),
    gamma: z.number(),
    area_error: z.number().nullable(),
    detected: z.number().int(),
    contacts: z.number().int(),
});
export type MetricsRow = z.infer<typeof MetricsRowSchema>;

export const ScenarioEchoSchema = z
    .object({
        name: z.string(),
        dimension: z.number().int(),
        duration: z.number(),
        shapes: z.array(z.record(z.unknown())),
        grid: z.object({ resolution: z.number().int() }).passthrough(),
    })
    .passthrough();
export type ScenarioEcho = z.infer<typeof ScenarioEchoSchema>;

export const MetricsDocSchema = z
    .object({
        scenario: ScenarioEchoSchema,
        fields: z.array(z.string()),
        rows: z.array(MetricsRowSchema).min(1),
        snapshot_times: z.array(z.number()),
        detection_times: z.array(z.number().nullable()),
    })
    .passthrough();
export type MetricsDoc = z.infer<typeof MetricsDocSchema>;

export const TrialRowSchema = z
    .object({
        trial: z.number().int(),
        error: z.string().optional(),
        detection_times: z.array(z.number().nullable()).optional(),
        all_detected_time: z.number().nullable().optional(),
        final: MetricsRowSchema.optional(),
    })
    .passthrough();
export type TrialRow = z.infer<typeof TrialRowSchema>;

export const SummaryDocSchema = z
    .object({
        scenario: ScenarioEchoSchema,
        trials: z.number().int(),
        arms: z.record(z.array(TrialRowSchema)),
    })
    .passthrough();
export type SummaryDoc = z.infer<typeof SummaryDocSchema>;

export function readJson<T>(path: string, schema: z.ZodType<T>, what: string): T {
    let text: string;
    try {
        text = readFileSync(path, "utf8");
    } catch {
        throw new ArtifactError(`missing ${what}: ${path}`);
    }
    let doc: unknown;
    try {
        doc = JSON.parse(text);
    } catch (e) {
        throw new ArtifactError(`${path}: not valid JSON (${(e as Error).message})`);
    }
    const res = schema.safeParse(doc);
    if (!res.success) {
        const first = res.error.issues[0];
        const where = first.path.length ? first.path.join(".") : "(root)";
        throw new ArtifactError(`${path}: ${where}: ${first.message}`);
    }
    return res.data;
}

// ── trajectory table ────────────────────────────────────

export interface Trajectory {
    dim: number;
    t: number[];
    /** Positions only, one [x, y(, z)] row per sample. */
    points: number[][];
}

function expectedTrajectoryHeader(dim: number): string[] {
    const axes = ["x", "y", "z"].slice(0, dim);
    return ["t", ...axes, ...axes.map((a) => `v${a}`), ...axes.map((a) => `u${a}`)];
}

/** Parse the trajectory table: a header line, then one sample per line. */
export function parseTrajectory(text: string, path: string): Trajectory {
    const lines = text.split("\n");
    while (lines.length && lines[lines.length - 1] === "") lines.pop();
    if (lines.length < 2) {
        throw new ArtifactError(`${path}: expected a header line and at least one sample`);
    }
    const header = lines[0].split(",");
    const dim = (header.length - 1) / 3;
    if (dim !== 2 && dim !== 3) {
        throw new ArtifactError(
            `${path}: header has ${header.length} columns, expected 7 (2D) or 10 (3D)`
        );
    }
    const expected = expectedTrajectoryHeader(dim);
    for (let c = 0; c < expected.length; c++) {
        if (header[c] !== expected[c]) {
            throw new ArtifactError(
                `${path}: header column ${c + 1} is '${header[c]}', expected '${expected[c]}'`
            );
        }
    }
    const t: number[] = [];
    const points: number[][] = [];
    for (let i = 1; i < lines.length; i++) {
        const parts = lines[i].split(",");
        if (parts.length !== header.length) {
            throw new ArtifactError(
                `${path}: line ${i + 1} has ${parts.length} values, expected ${header.length}`
            );
        }
        const row = parts.map(Number);
        for (let c = 0; c < row.length; c++) {
            if (!Number.isFinite(row[c])) {
                throw new ArtifactError(
                    `${path}: line ${i + 1}, column '${header[c]}': not a number: '${parts[c]}'`
                );
            }
        }
        t.push(row[0]);
        points.push(row.slice(1, 1 + dim));
    }
    return { dim, t, points };
}

// ── posterior snapshots ─────────────────────────────────

export interface SnapshotGrid {
    t: number;
    dim: number;
    res: number;
    /** Flattened C-order fields, first axis slowest, cell centers at (i+0.5)/res. */
    posterior: number[];
    decision: number[];
}

/** Parse a posterior snapshot dump: one header line, then one cell per line. */
export function parseSnapshot(text: string, path: string): SnapshotGrid {
    const lines = text.split("\n");
    while (lines.length && lines[lines.length - 1] === "") lines.pop();
    const prefix = "# posterior_snapshot ";
    if (!lines.length || !lines[0].startsWith(prefix)) {
        throw new ArtifactError(`${path}: missing '# posterior_snapshot' header line`);
    }
    const tokens: Record<string, string> = {};
    for (const tok of lines[0].slice(prefix.length).split(" ")) {
        const eq = tok.indexOf("=");
        if (eq <= 0) throw new ArtifactError(`${path}: bad header token '${tok}'`);
        tokens[tok.slice(0, eq)] = tok.slice(eq + 1);
    }
    for (const key of ["t", "dim", "res", "extent", "order", "axes", "fields"]) {
        if (!(key in tokens)) {
            throw new ArtifactError(`${path}: header is missing '${key}='`);
        }
    }
    if (tokens.extent !== "unit" || tokens.order !== "C") {
        throw new ArtifactError(
            `${path}: unsupported layout extent=${tokens.extent} order=${tokens.order}`
        );
    }
    if (tokens.fields !== "posterior,decision") {
        throw new ArtifactError(`${path}: unsupported fields '${tokens.fields}'`);
    }
    const t = Number(tokens.t);
    const dim = Number(tokens.dim);
    const res = Number(tokens.res);
    if (!Number.isFinite(t) || !Number.isInteger(dim) || !Number.isInteger(res)) {
        throw new ArtifactError(`${path}: non-numeric t/dim/res in header`);
    }
    const cells = res ** dim;
    if (lines.length - 1 !== cells) {
        throw new ArtifactError(
            `${path}: expected ${cells} cells (res=${res} dim=${dim}), got ${lines.length - 1}`
        );
    }
    const posterior = new Array<number>(cells);
    const decision = new Array<number>(cells);
    for (let i = 0; i < cells; i++) {
        const parts = lines[i + 1].split(" ");
        const p = Number(parts[0]);
        const d = Number(parts[1]);
        if (parts.length !== 2 || !Number.isFinite(p) || !Number.isFinite(d)) {
            throw new ArtifactError(
                `${path}: line ${i + 2}: expected 'posterior decision', got '${lines[i + 1]}'`
            );
        }
        posterior[i] = p;
        decision[i] = d;
    }
    return { t, dim, res, posterior, decision };
}
