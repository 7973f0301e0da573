// Pure figure builders: parsed run data in, standalone SVG documents out.
// No file I/O here, so every builder is trivially testable.

import { posteriorColor } from "./color.js";
import { zeroContour } from "./contour.js";
import { el, px, svgDoc, text } from "./svg.js";

export const TRAJECTORY_COLOR = "#ff00ff";
export const CONTOUR_COLOR = "#000000";
export const ARM_COLORS: Record<string, string> = {
    esac: "#1f77b4",
    geer: "#ff7f0e",
};
const FALLBACK_ARM_COLOR = "#2ca02c";

export function armColor(policy: string): string {
    return ARM_COLORS[policy] ?? FALLBACK_ARM_COLOR;
}

// ── shared axes scaffolding ─────────────────────────────

export interface Series {
    label?: string;
    color: string;
    x: number[];
    y: number[];
    width?: number;
    opacity?: number;
}

interface AxesOptions {
    xLabel: string;
    yLabel: string;
    xRange?: [number, number];
    yRange?: [number, number];
    yTicks?: number[];
    legend?: boolean;
}

function tickLabel(v: number): string {
    if (v === 0) return "0";
    const s = v.toPrecision(3);
    return s.includes(".") || s.includes("e")
        ? String(Number(s))
        : s;
}

function dataRange(series: Series[], pick: (s: Series) => number[]): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    for (const s of series) {
        for (const v of pick(s)) {
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
    }
    if (!Number.isFinite(lo)) return [0, 1];
    if (lo === hi) return [lo - 0.5, hi + 0.5];
    return [lo, hi];
}

/** One set of framed, ticked axes with polyline series, as a <g> element. */
function lineAxes(
    ox: number,
    oy: number,
    w: number,
    h: number,
    series: Series[],
    opts: AxesOptions
): string {
    const [xLo, xHi] = opts.xRange ?? dataRange(series, (s) => s.x);
    let [yLo, yHi] = opts.yRange ?? dataRange(series, (s) => s.y);
    if (!opts.yRange) {
        const pad = 0.05 * (yHi - yLo);
        yLo = Math.min(0, yLo - pad);
        yHi = yHi + pad;
    }
    const sx = (v: number) => ox + ((v - xLo) / (xHi - xLo)) * w;
    const sy = (v: number) => oy + h - ((v - yLo) / (yHi - yLo)) * h;

    const parts: string[] = [];
    parts.push(
        el("rect", {
            x: ox, y: oy, width: w, height: h,
            fill: "none", stroke: "#444444", "stroke-width": 1,
        })
    );
    const xTicks = 5;
    for (let i = 0; i <= xTicks; i++) {
        const v = xLo + ((xHi - xLo) * i) / xTicks;
        const X = sx(v);
        parts.push(el("line", {
            x1: X, y1: oy + h, x2: X, y2: oy + h + 4,
            stroke: "#444444", "stroke-width": 1,
        }));
        parts.push(text(X, oy + h + 16, tickLabel(v), {
            "font-size": 10, "text-anchor": "middle", fill: "#222222",
        }));
    }
    const yTickVals =
        opts.yTicks ?? [0, 1, 2, 3].map((i) => yLo + ((yHi - yLo) * i) / 3);
    for (const v of yTickVals) {
        const Y = sy(v);
        parts.push(el("line", {
            x1: ox - 4, y1: Y, x2: ox, y2: Y,
            stroke: "#444444", "stroke-width": 1,
        }));
        parts.push(text(ox - 7, Y + 3, tickLabel(v), {
            "font-size": 10, "text-anchor": "end", fill: "#222222",
        }));
    }
    parts.push(text(ox + w / 2, oy + h + 30, opts.xLabel, {
        "font-size": 11, "text-anchor": "middle", fill: "#222222",
    }));
    parts.push(text(ox - 38, oy + h / 2, opts.yLabel, {
        "font-size": 11, "text-anchor": "middle", fill: "#222222",
        transform: `rotate(-90 ${px(ox - 38)} ${px(oy + h / 2)})`,
    }));

    for (const s of series) {
        const pts = s.x.map((v, i) => `${px(sx(v))},${px(sy(s.y[i]))}`).join(" ");
        parts.push(el("polyline", {
            points: pts, fill: "none", stroke: s.color,
            "stroke-width": s.width ?? 1.5,
            "stroke-opacity": s.opacity ?? 1,
        }));
    }

    if (opts.legend) {
        let ly = oy + 8;
        for (const s of series) {
            if (!s.label) continue;
            parts.push(el("line", {
                x1: ox + w - 86, y1: ly, x2: ox + w - 66, y2: ly,
                stroke: s.color, "stroke-width": s.width ?? 2,
            }));
            parts.push(text(ox + w - 62, ly + 3, s.label, {
                "font-size": 10, fill: "#222222",
            }));
            ly += 14;
        }
    }
    return el("g", {}, parts.join(""));
}

// ── posterior snapshot panel ────────────────────────────

export interface PanelInput {
    title: string;
    res: number;
    /** Flattened C-order grids, x axis slowest. */
    posterior: ArrayLike<number>;
    decision: ArrayLike<number>;
    /** Trajectory points (unit coords) to overlay, already windowed. */
    path: Array<readonly [number, number]>;
}

/**
 * One posterior panel: heatmap of collision likelihood, the zero level of
 * the decision field as the current shape estimate, and the trajectory
 * flown since the previous panel.
 */
export function snapshotPanel(input: PanelInput): string {
    const { res, posterior, decision } = input;
    if (posterior.length !== res * res || decision.length !== res * res) {
        throw new Error(
            `panel fields must have ${res * res} cells, got ` +
            `${posterior.length}/${decision.length}`
        );
    }
    const M = { left: 46, top: 30, right: 16, bottom: 40 };
    const PW = 360;
    const PH = 360;
    const W = M.left + PW + M.right;
    const H = M.top + PH + M.bottom;
    const sx = (u: number) => M.left + u * PW;
    const sy = (u: number) => M.top + PH - u * PH;

    const parts: string[] = [];
    const cell = PW / res;
    const cells: string[] = [];
    for (let ix = 0; ix < res; ix++) {
        for (let iy = 0; iy < res; iy++) {
            cells.push(el("rect", {
                x: sx(ix / res),
                y: sy((iy + 1) / res),
                width: cell + 0.5,
                height: cell + 0.5,
                fill: posteriorColor(Number(posterior[ix * res + iy])),
            }));
        }
    }
    parts.push(el("g", { stroke: "none" }, cells.join("")));

    const segments = zeroContour(decision, res);
    if (segments.length) {
        const d = segments
            .map((s) => `M${px(sx(s.x1))} ${px(sy(s.y1))}L${px(sx(s.x2))} ${px(sy(s.y2))}`)
            .join("");
        parts.push(el("path", {
            d, fill: "none", stroke: CONTOUR_COLOR, "stroke-width": 1.8,
        }));
    }

    if (input.path.length > 1) {
        const pts = input.path.map(([x, y]) => `${px(sx(x))},${px(sy(y))}`).join(" ");
        parts.push(el("polyline", {
            points: pts, fill: "none", stroke: TRAJECTORY_COLOR,
            "stroke-width": 1.6,
        }));
    }
    if (input.path.length) {
        const [x, y] = input.path[input.path.length - 1];
        parts.push(el("circle", {
            cx: sx(x), cy: sy(y), r: 3, fill: TRAJECTORY_COLOR,
        }));
    }

    parts.push(el("rect", {
        x: M.left, y: M.top, width: PW, height: PH,
        fill: "none", stroke: "#222222", "stroke-width": 1,
    }));
    for (const u of [0, 0.5, 1]) {
        parts.push(text(sx(u), M.top + PH + 16, tickLabel(u), {
            "font-size": 10, "text-anchor": "middle", fill: "#222222",
        }));
        parts.push(text(M.left - 7, sy(u) + 3, tickLabel(u), {
            "font-size": 10, "text-anchor": "end", fill: "#222222",
        }));
    }
    parts.push(text(M.left + PW / 2, M.top + PH + 32, "x", {
        "font-size": 11, "text-anchor": "middle", fill: "#222222",
    }));
    parts.push(text(M.left - 30, M.top + PH / 2, "y", {
        "font-size": 11, "text-anchor": "middle", fill: "#222222",
    }));
    parts.push(text(W / 2, 19, input.title, {
        "font-size": 13, "text-anchor": "middle", fill: "#000000",
    }));
    return svgDoc(W, H, parts.join("\n"));
}

// ── metrics time-series figure ──────────────────────────

export interface MetricsPoint {
    t: number;
    ergodic: number;
    gamma: number;
}

/** Stacked time series of the shape-difference and coverage metrics. */
export function metricsFigure(rows: MetricsPoint[], title: string): string {
    if (!rows.length) throw new Error("metrics figure needs at least one row");
    const t = rows.map((r) => r.t);
    const W = 480;
    const subH = 150;
    const M = { left: 64, right: 20, top: 34, gap: 52, bottom: 44 };
    const H = M.top + subH + M.gap + subH + M.bottom;
    const w = W - M.left - M.right;

    const gamma = lineAxes(M.left, M.top, w, subH,
        [{ color: "#1f77b4", x: t, y: rows.map((r) => r.gamma) }],
        { xLabel: "t [s]", yLabel: "shape difference" });
    const erg = lineAxes(M.left, M.top + subH + M.gap, w, subH,
        [{ color: "#d62728", x: t, y: rows.map((r) => r.ergodic) }],
        { xLabel: "t [s]", yLabel: "ergodic metric" });
    const head = text(W / 2, 20, title, {
        "font-size": 13, "text-anchor": "middle", fill: "#000000",
    });
    return svgDoc(W, H, [head, gamma, erg].join("\n"));
}

// ── batch comparison figures ────────────────────────────

export interface ArmCurves {
    policy: string;
    /** One detection-count step curve per trial. */
    trials: Array<{ x: number[]; y: number[] }>;
    mean: { x: number[]; y: number[] };
}

/** Detection-count-vs-time curves: faint per-trial steps, bold mean. */
export function detectionCurvesFigure(
    arms: ArmCurves[],
    duration: number,
    nShapes: number,
    title: string
): string {
    const W = 520;
    const H = 330;
    const M = { left: 58, right: 20, top: 34, bottom: 48 };
    const series: Series[] = [];
    for (const arm of arms) {
        const color = armColor(arm.policy);
        for (const tr of arm.trials) {
            series.push({ color, x: tr.x, y: tr.y, width: 1, opacity: 0.25 });
        }
    }
    for (const arm of arms) {
        series.push({
            label: arm.policy, color: armColor(arm.policy),
            x: arm.mean.x, y: arm.mean.y, width: 2.5,
        });
    }
    const axes = lineAxes(M.left, M.top, W - M.left - M.right, H - M.top - M.bottom,
        series, {
            xLabel: "t [s]",
            yLabel: "shapes detected",
            xRange: [0, duration],
            yRange: [0, nShapes + 0.2],
            yTicks: Array.from({ length: nShapes + 1 }, (_, i) => i),
            legend: true,
        });
    const head = text(W / 2, 20, title, {
        "font-size": 13, "text-anchor": "middle", fill: "#000000",
    });
    return svgDoc(W, H, [head, axes].join("\n"));
}

export interface ArmFinals {
    policy: string;
    /** Final detection count of each trial. */
    finals: number[];
}

/** Histogram of final detection counts, grouped bars per policy. */
export function finalDetectionsFigure(
    arms: ArmFinals[],
    nShapes: number,
    title: string
): string {
    const W = 520;
    const H = 300;
    const M = { left: 58, right: 20, top: 34, bottom: 48 };
    const w = W - M.left - M.right;
    const h = H - M.top - M.bottom;

    const counts = arms.map((arm) => {
        const c = new Array<number>(nShapes + 1).fill(0);
        for (const f of arm.finals) {
            const k = Math.max(0, Math.min(nShapes, Math.round(f)));
            c[k] += 1;
        }
        return c;
    });
    const maxCount = Math.max(1, ...counts.flat());

    const parts: string[] = [];
    const groupW = w / (nShapes + 1);
    const barW = (groupW * 0.72) / Math.max(1, arms.length);
    for (let k = 0; k <= nShapes; k++) {
        const gx = M.left + k * groupW + groupW * 0.14;
        for (let a = 0; a < arms.length; a++) {
            const n = counts[a][k];
            const bh = (n / maxCount) * h;
            parts.push(el("rect", {
                x: gx + a * barW,
                y: M.top + h - bh,
                width: barW * 0.92,
                height: bh,
                fill: armColor(arms[a].policy),
            }));
            if (n > 0) {
                parts.push(text(gx + a * barW + barW * 0.46, M.top + h - bh - 4, String(n), {
                    "font-size": 9, "text-anchor": "middle", fill: "#222222",
                }));
            }
        }
        parts.push(text(M.left + k * groupW + groupW / 2, M.top + h + 16, String(k), {
            "font-size": 10, "text-anchor": "middle", fill: "#222222",
        }));
    }
    parts.push(el("rect", {
        x: M.left, y: M.top, width: w, height: h,
        fill: "none", stroke: "#444444", "stroke-width": 1,
    }));
    let ly = M.top + 8;
    for (const arm of arms) {
        parts.push(el("rect", {
            x: M.left + w - 86, y: ly - 7, width: 18, height: 9,
            fill: armColor(arm.policy),
        }));
        parts.push(text(M.left + w - 62, ly + 1, arm.policy, {
            "font-size": 10, fill: "#222222",
        }));
        ly += 14;
    }
    parts.push(text(M.left + w / 2, M.top + h + 34, "shapes detected at end of trial", {
        "font-size": 11, "text-anchor": "middle", fill: "#222222",
    }));
    parts.push(text(M.left - 34, M.top + h / 2, "trials", {
        "font-size": 11, "text-anchor": "middle", fill: "#222222",
        transform: `rotate(-90 ${px(M.left - 34)} ${px(M.top + h / 2)})`,
    }));
    parts.push(text(W / 2, 20, title, {
        "font-size": 13, "text-anchor": "middle", fill: "#000000",
    }));
    return svgDoc(W, H, parts.join("\n"));
}
