import { describe, expect, it } from "vitest";

import {
    detectionCurvesFigure,
    finalDetectionsFigure,
    metricsFigure,
    snapshotPanel,
} from "../src/figures.js";
import { CONTOUR_COLOR, TRAJECTORY_COLOR } from "../src/figures.js";

function count(haystack: string, needle: string): number {
    return haystack.split(needle).length - 1;
}

describe("snapshotPanel", () => {
    const res = 8;
    const posterior = new Array(res * res).fill(0.5);
    const decision = new Array(res * res).fill(1).map((_, i) => {
        const ix = Math.floor(i / res);
        const iy = i % res;
        return Math.hypot((ix + 0.5) / res - 0.5, (iy + 0.5) / res - 0.5) - 0.25;
    });

    it("draws one heatmap cell per grid cell", () => {
        const svg = snapshotPanel({
            title: "demo", res, posterior, decision,
            path: [[0.1, 0.1], [0.5, 0.6]],
        });
        expect(svg.startsWith("<svg")).toBe(true);
        expect(count(svg, "<rect")).toBeGreaterThanOrEqual(res * res);
        expect(svg).toContain(TRAJECTORY_COLOR);
        expect(svg).toContain(`stroke="${CONTOUR_COLOR}"`);
        expect(svg).toContain("demo");
    });

    it("omits the contour when the estimate has one sign", () => {
        const svg = snapshotPanel({
            title: "empty", res, posterior,
            decision: new Array(res * res).fill(1),
            path: [],
        });
        expect(svg).not.toContain(`stroke="${CONTOUR_COLOR}"`);
        expect(svg).not.toContain(TRAJECTORY_COLOR);
    });

    it("rejects fields of the wrong size", () => {
        expect(() =>
            snapshotPanel({ title: "bad", res, posterior: [0.5], decision, path: [] })
        ).toThrow(/64 cells/);
    });
});

describe("metricsFigure", () => {
    it("plots both series with labels", () => {
        const rows = Array.from({ length: 21 }, (_, i) => ({
            t: i * 0.5,
            ergodic: 1 / (1 + i),
            gamma: 0.2 * Math.exp(-i / 5),
        }));
        const svg = metricsFigure(rows, "demo run");
        expect(svg.startsWith("<svg")).toBe(true);
        expect(svg).toContain("shape difference");
        expect(svg).toContain("ergodic metric");
        expect(count(svg, "<polyline")).toBe(2);
        expect(svg).toContain("demo run");
    });

    it("needs at least one row", () => {
        expect(() => metricsFigure([], "x")).toThrow(/at least one row/);
    });
});

describe("comparison figures", () => {
    const arm = (policy: string, detected: number[]) => ({
        policy,
        trials: detected.map((n) => ({
            x: [0, 5, 5, 10],
            y: [0, 0, n, n],
        })),
        mean: { x: [0, 10], y: [0, detected.reduce((a, b) => a + b) / detected.length] },
    });

    it("draws per-trial curves plus one mean per policy", () => {
        const svg = detectionCurvesFigure(
            [arm("esac", [3, 3]), arm("geer", [1, 2])], 10, 3, "cmp");
        expect(svg.startsWith("<svg")).toBe(true);
        // 2 trials + 1 mean per arm
        expect(count(svg, "<polyline")).toBe(6);
        expect(svg).toContain(">esac</text>");
        expect(svg).toContain(">geer</text>");
        expect(svg).toContain("shapes detected");
    });

    it("tallies final counts into grouped bars", () => {
        const svg = finalDetectionsFigure(
            [
                { policy: "esac", finals: [3, 3, 2] },
                { policy: "geer", finals: [1, 1, 0] },
            ],
            3,
            "finals"
        );
        expect(svg.startsWith("<svg")).toBe(true);
        // bars carry their counts as text labels
        expect(svg).toContain(">2</text>"); // esac: two trials at 3 shapes; geer: two at 1
        expect(svg).toContain(">1</text>");
        expect(svg).toContain("shapes detected at end of trial");
    });
});
