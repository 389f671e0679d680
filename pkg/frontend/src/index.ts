/**
 * Thin binding for the pesqkit speech-quality scorer.
 *
 * Marshals sample buffers into temporary WAV files, invokes the scoring CLI
 * and returns its number; no measurement logic lives on this side.  The CLI
 * command defaults to `python3 -m pesqkit.cli` and can be overridden with the
 * PESQKIT_CMD environment variable (split on spaces).
 */

import { execFile } from "node:child_process";
import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";

const execFileAsync = promisify(execFile);

export type PesqMode = "nb-raw" | "nb-lqo" | "wb";
export type SampleRate = 8000 | 16000;
export type Samples = Float32Array | Float64Array | Int16Array;

/** Human-readable provenance of each scoring mode. */
const PROVENANCE: Record<string, string> = {
  "nb-raw": "ITU-T P.862 raw narrowband score",
  "nb-lqo": "ITU-T P.862.1 narrowband MOS-LQO",
  "wb": "ITU-T P.862.2 wideband MOS-LQO (without Corrigendum 2)",
  "wb-c2": "ITU-T P.862.2 wideband MOS-LQO + P.862 Corrigendum 2",
};

export class PesqError extends Error {}

function cliCommand(): string[] {
  const raw = process.env.PESQKIT_CMD ?? "python3 -m pesqkit.cli";
  return raw.split(" ").filter((part) => part.length > 0);
}

function resolveMode(mode: PesqMode, corrigendum2: boolean): string {
  if (mode !== "nb-raw" && mode !== "nb-lqo" && mode !== "wb") {
    throw new PesqError(`unknown mode ${String(mode)}; use nb-raw, nb-lqo or wb`);
  }
  if (corrigendum2 && mode !== "wb") {
    throw new PesqError("corrigendum2 applies to the wideband mode only");
  }
  return corrigendum2 ? "wb-c2" : mode;
}

/**
 * Serialise samples as a RIFF/WAVE file on the scorer's nominal scale.
 *
 * Float arrays are treated as +/-1 full scale and stored as float32 (the
 * scorer rescales by 32768); Int16Array values pass through verbatim as
 * PCM16.  Detection is purely by dtype.
 */
function wavBytes(samples: Samples, rate: number): Buffer {
  let payload: Buffer;
  let formatTag: number;
  let bits: number;
  if (samples instanceof Int16Array) {
    payload = Buffer.alloc(samples.length * 2);
    for (let i = 0; i < samples.length; i++) payload.writeInt16LE(samples[i], i * 2);
    formatTag = 1;
    bits = 16;
  } else {
    payload = Buffer.alloc(samples.length * 4);
    for (let i = 0; i < samples.length; i++) payload.writeFloatLE(samples[i], i * 4);
    formatTag = 3;
    bits = 32;
  }
  const blockAlign = bits / 8;
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + payload.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(formatTag, 20);
  header.writeUInt16LE(1, 22); // mono: callers pass one channel per array
  header.writeUInt32LE(rate, 24);
  header.writeUInt32LE(rate * blockAlign, 28);
  header.writeUInt16LE(blockAlign, 32);
  header.writeUInt16LE(bits, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(payload.length, 40);
  return Buffer.concat([header, payload]);
}

/**
 * Score a degraded signal against its reference.
 *
 * Returns MOS-LQO (or the raw narrowband score for mode "nb-raw"), exactly
 * as the pesqkit CLI reports it on the same samples.
 */
export async function pesqScore(
  ref: Samples,
  deg: Samples,
  rate: SampleRate,
  mode: PesqMode,
  corrigendum2 = false,
): Promise<number> {
  if (rate !== 8000 && rate !== 16000) {
    throw new PesqError(`rate must be 8000 or 16000 Hz, got ${String(rate)}`);
  }
  const cliMode = resolveMode(mode, corrigendum2);

  const dir = await mkdtemp(join(tmpdir(), "pesqkit-"));
  try {
    const refPath = join(dir, "ref.wav");
    const degPath = join(dir, "deg.wav");
    await writeFile(refPath, wavBytes(ref, rate));
    await writeFile(degPath, wavBytes(deg, rate));

    const [command, ...baseArgs] = cliCommand();
    const args = [
      ...baseArgs,
      "score",
      "--ref", refPath,
      "--deg", degPath,
      "--rate", String(rate),
      "--mode", cliMode,
      "--format", "json",
    ];
    let stdout: string;
    try {
      ({ stdout } = await execFileAsync(command, args));
    } catch (error) {
      const err = error as { stderr?: string; message?: string };
      const detail = (err.stderr ?? err.message ?? "scorer failed").trim();
      throw new PesqError(detail);
    }
    const payload = JSON.parse(stdout) as { score: number; mode: string };
    if (payload.mode !== cliMode || typeof payload.score !== "number") {
      throw new PesqError(`unexpected scorer output: ${stdout.trim()}`);
    }
    return payload.score;
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

/** Version string including the provenance of the selected mode. */
export function versionString(mode: PesqMode = "wb", corrigendum2 = true): string {
  const cliMode = resolveMode(mode, corrigendum2 && mode === "wb");
  return `pesqkit-binding 0.1.0 (${PROVENANCE[cliMode]})`;
}
