import { cpSync, existsSync, mkdtempSync, readFileSync, readdirSync, rmSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { fileURLToPath } from "url";

import { afterEach, describe, expect, it } from "vitest";

import { ArtifactError } from "../src/parse.js";
import { renderComparison, renderRun } from "../src/render.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const RUN = join(FIXTURES, "square-run");
const SHORT_RUN = join(FIXTURES, "square-short");
const BATCH = join(FIXTURES, "compare-batch");

const scratch: string[] = [];
function tmp(): string {
    const d = mkdtempSync(join(tmpdir(), "render-test-"));
    scratch.push(d);
    return d;
}
afterEach(() => {
    while (scratch.length) rmSync(scratch.pop()!, { recursive: true, force: true });
});

/** Minimal well-formed run dir for synthesizing corrupt variants. */
function fakeRunDir(dimension: number): string {
    const dir = tmp();
    const scenario = {
        name: "fake",
        dimension,
        duration: 1.0,
        shapes: [{ kind: "circle", center: [0.5, 0.5], radius: 0.1 }],
        grid: { resolution: 4 },
    };
    const row = { t: 0, ergodic: 0.5, gamma: 0.1, area_error: null, detected: 0, contacts: 0 };
    writeFileSync(join(dir, "scenario.json"), JSON.stringify(scenario));
    writeFileSync(join(dir, "metrics.json"), JSON.stringify({
        scenario, fields: ["t"], rows: [row, { ...row, t: 1 }],
        snapshot_times: [], detection_times: [null],
    }));
    return dir;
}

function fakeSnapshot(res: number, t: number): string {
    const head =
        `# posterior_snapshot t=${t.toFixed(2)} dim=2 res=${res} ` +
        `extent=unit order=C axes=x,y fields=posterior,decision`;
    const cells = Array.from({ length: res * res }, () => "0.5 1.0");
    return [head, ...cells].join("\n") + "\n";
}

describe("renderRun", () => {
    it("renders six panels and a metrics figure for the square run", () => {
        const out = tmp();
        const result = renderRun(RUN, out);
        expect(result.warnings).toEqual([]);
        const names = readdirSync(out).sort();
        expect(names).toEqual([
            "metrics.svg",
            "panel_t0.10.svg",
            "panel_t1.00.svg",
            "panel_t11.00.svg",
            "panel_t2.00.svg",
            "panel_t30.00.svg",
            "panel_t6.00.svg",
        ]);
        expect(result.files.length).toBe(7);
        for (const f of result.files) {
            const body = readFileSync(f, "utf8");
            expect(body.startsWith("<svg")).toBe(true);
            expect(body.trim().endsWith("</svg>")).toBe(true);
        }
    });

    it("orders panels by time and windows the trajectory overlay", () => {
        const out = tmp();
        const { files } = renderRun(RUN, out);
        const panels = files.filter((f) => f.includes("panel_"));
        const times = panels.map((f) => Number(/panel_t(.+)\.svg$/.exec(f)![1]));
        expect(times).toEqual([0.1, 1, 2, 6, 11, 30]);
        // the early panel covers 0.1 s of flight; the late one 19 s —
        // its trajectory polyline must carry far more points
        const pts = (f: string) =>
            (readFileSync(f, "utf8").match(/polyline points="([^"]*)"/)?.[1] ?? "")
                .split(" ").length;
        expect(pts(panels[5])).toBeGreaterThan(pts(panels[0]) * 10);
    });

    it("does not touch the input directory", () => {
        const before = readdirSync(RUN).sort();
        renderRun(RUN, tmp());
        expect(readdirSync(RUN).sort()).toEqual(before);
    });

    it("renders metrics only and warns when there are no snapshots", () => {
        const out = tmp();
        const result = renderRun(SHORT_RUN, out);
        expect(readdirSync(out)).toEqual(["metrics.svg"]);
        expect(result.warnings.length).toBe(1);
        expect(result.warnings[0]).toMatch(/no posterior snapshots/);
    });

    it("skips snapshot panels for non-2D runs with a warning", () => {
        const dir = fakeRunDir(3);
        writeFileSync(join(dir, "snapshot_t1.00.txt"), "whatever");
        const out = tmp();
        const result = renderRun(dir, out);
        expect(readdirSync(out)).toEqual(["metrics.svg"]);
        expect(result.warnings[0]).toMatch(/only 2D grids/);
    });

    it("names a missing metrics file", () => {
        const dir = tmp();
        cpSync(join(RUN, "scenario.json"), join(dir, "scenario.json"));
        expect(() => renderRun(dir, tmp())).toThrow(ArtifactError);
        expect(() => renderRun(dir, tmp())).toThrow(/missing metrics log: .*metrics\.json/);
    });

    it("names a corrupted trajectory header column", () => {
        const dir = fakeRunDir(2);
        writeFileSync(join(dir, "snapshot_t1.00.txt"), fakeSnapshot(4, 1));
        writeFileSync(join(dir, "trajectory.csv"), "t,x,WRONG,vx,vy,ux,uy\n0,0,0,0,0,0,0\n");
        expect(() => renderRun(dir, tmp())).toThrow(/column 3 is 'WRONG', expected 'y'/);
    });

    it("rejects a snapshot grid that disagrees with the scenario", () => {
        const dir = fakeRunDir(2);
        writeFileSync(join(dir, "snapshot_t1.00.txt"), fakeSnapshot(8, 1));
        writeFileSync(join(dir, "trajectory.csv"), "t,x,y,vx,vy,ux,uy\n0,0,0,0,0,0,0\n");
        expect(() => renderRun(dir, tmp())).toThrow(/res=8 does not match .* 4/);
    });
});

describe("renderComparison", () => {
    it("produces the comparison pair for a two-policy batch", () => {
        const out = tmp();
        const result = renderComparison(BATCH, out);
        expect(result.warnings).toEqual([]);
        expect(readdirSync(out).sort()).toEqual([
            "detection_curves.svg",
            "final_detections.svg",
        ]);
        const curves = readFileSync(join(out, "detection_curves.svg"), "utf8");
        expect(curves).toContain(">esac</text>");
        expect(curves).toContain(">geer</text>");
        // 2 trials + 1 mean per policy
        expect(curves.split("<polyline").length - 1).toBe(6);
    });

    it("renders a single-policy batch without error", () => {
        const dir = tmp();
        const summary = JSON.parse(readFileSync(join(BATCH, "summary.json"), "utf8"));
        delete summary.arms.geer;
        writeFileSync(join(dir, "summary.json"), JSON.stringify(summary));
        const out = tmp();
        const result = renderComparison(dir, out);
        expect(result.files.length).toBe(2);
        expect(existsSync(join(out, "detection_curves.svg"))).toBe(true);
    });

    it("skips failed trials with a warning", () => {
        const dir = tmp();
        const summary = JSON.parse(readFileSync(join(BATCH, "summary.json"), "utf8"));
        summary.arms.geer = [{ trial: 0, seed_sequence: [0, 0], error: "SimulationError: boom" }];
        writeFileSync(join(dir, "summary.json"), JSON.stringify(summary));
        const result = renderComparison(dir, tmp());
        expect(result.warnings).toEqual(["geer: skipped 1 failed trial(s)"]);
    });

    it("errors on an empty batch directory", () => {
        const dir = tmp();
        expect(() => renderComparison(dir, tmp())).toThrow(ArtifactError);
        expect(() => renderComparison(dir, tmp())).toThrow(
            /missing batch summary: .*summary\.json/
        );
    });

    it("errors when no trial succeeded", () => {
        const dir = tmp();
        const summary = JSON.parse(readFileSync(join(BATCH, "summary.json"), "utf8"));
        for (const arm of Object.keys(summary.arms)) {
            summary.arms[arm] = [{ trial: 0, seed_sequence: [0, 0], error: "X: boom" }];
        }
        writeFileSync(join(dir, "summary.json"), JSON.stringify(summary));
        expect(() => renderComparison(dir, tmp())).toThrow(/no successful trials/);
    });
});
