// Diverging colormap for collision posteriors: blue = unlikely, red = likely.

export type Rgb = [number, number, number];

const LOW: Rgb = [59, 76, 192];
const MID: Rgb = [221, 221, 221];
const HIGH: Rgb = [180, 4, 38];

function mix(a: Rgb, b: Rgb, t: number): Rgb {
    return [
        Math.round(a[0] + (b[0] - a[0]) * t),
        Math.round(a[1] + (b[1] - a[1]) * t),
        Math.round(a[2] + (b[2] - a[2]) * t),
    ];
}

function hex(c: Rgb): string {
    return "#" + c.map((v) => v.toString(16).padStart(2, "0")).join("");
}

/** Map a posterior in [0, 1] to a blue→white→red hex color (clamped). */
export function posteriorColor(p: number): string {
    if (!Number.isFinite(p)) throw new Error(`posterior must be finite, got ${p}`);
    const v = Math.min(1, Math.max(0, p));
    const rgb = v <= 0.5 ? mix(LOW, MID, v * 2) : mix(MID, HIGH, (v - 0.5) * 2);
    return hex(rgb);
}
