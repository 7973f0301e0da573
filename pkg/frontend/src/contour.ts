// Zero-level contour of a scalar field sampled on grid cell centers
// (marching squares).  Field layout matches the snapshot files: flattened
// C order with the x axis slowest, centers at (i + 0.5) / res.

export interface Segment {
    x1: number;
    y1: number;
    x2: number;
    y2: number;
}

type Edge = "S" | "E" | "N" | "W";

// Segment endpoints per corner-sign case; saddles (5, 10) are resolved
// with the cell-center average at lookup time.
const CASES: ReadonlyArray<ReadonlyArray<readonly [Edge, Edge]>> = [
    /* 0 */ [],
    /* 1 */ [["W", "S"]],
    /* 2 */ [["S", "E"]],
    /* 3 */ [["W", "E"]],
    /* 4 */ [["E", "N"]],
    /* 5 */ [], // saddle
    /* 6 */ [["S", "N"]],
    /* 7 */ [["W", "N"]],
    /* 8 */ [["W", "N"]],
    /* 9 */ [["S", "N"]],
    /* 10 */ [], // saddle
    /* 11 */ [["E", "N"]],
    /* 12 */ [["W", "E"]],
    /* 13 */ [["S", "E"]],
    /* 14 */ [["W", "S"]],
    /* 15 */ [],
];

/**
 * Trace the zero level of a field given on an res×res cell-center grid.
 * A cell counts as inside when its value is < 0; crossings are placed by
 * linear interpolation between neighboring centers.  Returns unit-square
 * segments in scan order (deterministic for identical inputs).
 */
export function zeroContour(values: ArrayLike<number>, res: number): Segment[] {
    if (!Number.isInteger(res) || res < 2) {
        throw new Error(`grid resolution must be an integer >= 2, got ${res}`);
    }
    if (values.length !== res * res) {
        throw new Error(`expected ${res * res} values for res=${res}, got ${values.length}`);
    }
    const center = (i: number) => (i + 0.5) / res;
    const at = (ix: number, iy: number) => values[ix * res + iy];
    const segments: Segment[] = [];

    for (let ix = 0; ix < res - 1; ix++) {
        for (let iy = 0; iy < res - 1; iy++) {
            const v00 = at(ix, iy);
            const v10 = at(ix + 1, iy);
            const v11 = at(ix + 1, iy + 1);
            const v01 = at(ix, iy + 1);
            const code =
                (v00 < 0 ? 1 : 0) | (v10 < 0 ? 2 : 0) | (v11 < 0 ? 4 : 0) | (v01 < 0 ? 8 : 0);
            if (code === 0 || code === 15) continue;

            const x0 = center(ix);
            const x1 = center(ix + 1);
            const y0 = center(iy);
            const y1 = center(iy + 1);
            const cut = (va: number, vb: number) => va / (va - vb);
            const point = (e: Edge): [number, number] => {
                switch (e) {
                    case "S":
                        return [x0 + cut(v00, v10) * (x1 - x0), y0];
                    case "E":
                        return [x1, y0 + cut(v10, v11) * (y1 - y0)];
                    case "N":
                        return [x0 + cut(v01, v11) * (x1 - x0), y1];
                    case "W":
                        return [x0, y0 + cut(v00, v01) * (y1 - y0)];
                }
            };

            let pairs = CASES[code];
            if (code === 5 || code === 10) {
                const inside = (v00 + v10 + v11 + v01) / 4 < 0;
                // Connect through the middle when the center is inside,
                // otherwise keep the two inside corners separate.
                if (code === 5) {
                    pairs = inside
                        ? [["S", "E"], ["W", "N"]]
                        : [["W", "S"], ["E", "N"]];
                } else {
                    pairs = inside
                        ? [["W", "S"], ["E", "N"]]
                        : [["S", "E"], ["W", "N"]];
                }
            }
            for (const [ea, eb] of pairs) {
                const [ax, ay] = point(ea);
                const [bx, by] = point(eb);
                segments.push({ x1: ax, y1: ay, x2: bx, y2: by });
            }
        }
    }
    return segments;
}
