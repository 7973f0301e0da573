// Tiny SVG string assembly — enough for static figures, nothing more.

/** Escape text for use in SVG attribute values and text nodes. */
export function esc(s: string): string {
    return s
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

/** Format a pixel coordinate compactly and deterministically. */
export function px(x: number): string {
    const r = Math.round(x * 100) / 100;
    return Object.is(r, -0) ? "0" : String(r);
}

export function el(
    name: string,
    attrs: Record<string, string | number>,
    body = ""
): string {
    const parts = Object.entries(attrs).map(
        ([k, v]) => `${k}="${typeof v === "number" ? px(v) : esc(v)}"`
    );
    const head = parts.length ? `<${name} ${parts.join(" ")}` : `<${name}`;
    return body === "" ? `${head}/>` : `${head}>${body}</${name}>`;
}

export function text(
    x: number,
    y: number,
    content: string,
    attrs: Record<string, string | number> = {}
): string {
    return el("text", { x, y, "font-family": "sans-serif", ...attrs }, esc(content));
}

export function svgDoc(width: number, height: number, body: string): string {
    return (
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}">\n${body}\n</svg>\n`
    );
}
