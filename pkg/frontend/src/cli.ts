#!/usr/bin/env node
// render — turn simulator output directories into SVG figures.

import { join } from "path";
import { pathToFileURL } from "url";

import { ArtifactError } from "./parse.js";
import { renderComparison, renderRun, type RenderResult } from "./render.js";

const USAGE = `usage: render <command> <dir> [--out DIR]

commands:
  run <run_dir>        posterior panels + metrics figure for one trial
  compare <batch_dir>  detection comparison figures for a batch

options:
  --out DIR   where to write figures (default: <dir>/figures)
`;

export interface Sink {
    write(chunk: string): unknown;
}

export function main(
    argv: string[],
    stdout: Sink = process.stdout,
    stderr: Sink = process.stderr
): number {
    let command: string | undefined;
    let dir: string | undefined;
    let out: string | undefined;

    for (let i = 0; i < argv.length; i++) {
        const arg = argv[i];
        if (arg === "--out") {
            out = argv[++i];
            if (out === undefined) {
                stderr.write("error: --out needs a value\n");
                return 2;
            }
        } else if (arg === "-h" || arg === "--help") {
            stdout.write(USAGE);
            return 0;
        } else if (arg.startsWith("-")) {
            stderr.write(`error: unknown option '${arg}'\n${USAGE}`);
            return 2;
        } else if (command === undefined) {
            command = arg;
        } else if (dir === undefined) {
            dir = arg;
        } else {
            stderr.write(`error: unexpected argument '${arg}'\n${USAGE}`);
            return 2;
        }
    }
    if (command === undefined || dir === undefined) {
        stderr.write(USAGE);
        return 2;
    }
    if (command !== "run" && command !== "compare") {
        stderr.write(`error: unknown command '${command}'\n${USAGE}`);
        return 2;
    }

    const outDir = out ?? join(dir, "figures");
    let result: RenderResult;
    try {
        result = command === "run" ? renderRun(dir, outDir) : renderComparison(dir, outDir);
    } catch (e) {
        if (e instanceof ArtifactError) {
            stderr.write(`error: ${e.message}\n`);
            return 2;
        }
        stderr.write(`error: ${(e as Error).stack ?? e}\n`);
        return 3;
    }
    for (const w of result.warnings) {
        stderr.write(`warning: ${w}\n`);
    }
    for (const f of result.files) {
        stdout.write(`${f}\n`);
    }
    return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
    process.exit(main(process.argv.slice(2)));
}
