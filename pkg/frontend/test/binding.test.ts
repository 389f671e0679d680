import { execFile } from "node:child_process";
import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { describe, expect, it } from "vitest";

import { PesqError, pesqScore, versionString } from "../src/index.js";

const execFileAsync = promisify(execFile);

/** Deterministic burst-modulated noise resembling speech pacing, +/-1 scale. */
function carrier(rate: number, seconds: number, seed = 1234): Float32Array {
  const n = Math.floor(rate * seconds);
  const out = new Float32Array(n);
  let state = seed >>> 0;
  const next = () => {
    // xorshift32: deterministic across runs without RNG dependencies
    state ^= state << 13; state >>>= 0;
    state ^= state >> 17;
    state ^= state << 5; state >>>= 0;
    return state / 0xffffffff - 0.5;
  };
  let smooth = 0;
  for (let i = 0; i < n; i++) {
    smooth = 0.9 * smooth + next();
    const t = i / rate;
    const burst = Math.floor(t / 1.0);
    const local = t - burst * 1.0;
    const env = local >= 0.25 && local < 1.0
      ? Math.sin(Math.PI * (local - 0.25) / 0.75) ** 2
      : 0;
    out[i] = 0.12 * smooth * env;
  }
  return out;
}

function degrade(sig: Float32Array, snrDb: number, seed = 77): Float32Array {
  let state = seed >>> 0;
  const next = () => {
    state ^= state << 13; state >>>= 0;
    state ^= state >> 17;
    state ^= state << 5; state >>>= 0;
    return state / 0xffffffff - 0.5;
  };
  let power = 0;
  for (const v of sig) power += v * v;
  power /= sig.length;
  const amp = Math.sqrt(power * 12) * 10 ** (-snrDb / 20); // var of uniform(-0.5,0.5) = 1/12
  const out = new Float32Array(sig.length);
  for (let i = 0; i < sig.length; i++) out[i] = sig[i] + amp * next();
  return out;
}

async function cliScore(
  ref: Float32Array,
  deg: Float32Array,
  rate: number,
  mode: string,
): Promise<number> {
  const dir = await mkdtemp(join(tmpdir(), "pesqkit-cli-"));
  try {
    const write = async (name: string, data: Float32Array) => {
      const payload = Buffer.alloc(data.length * 4);
      data.forEach((v, i) => payload.writeFloatLE(v, i * 4));
      const header = Buffer.alloc(44);
      header.write("RIFF", 0, "ascii");
      header.writeUInt32LE(36 + payload.length, 4);
      header.write("WAVE", 8, "ascii");
      header.write("fmt ", 12, "ascii");
      header.writeUInt32LE(16, 16);
      header.writeUInt16LE(3, 20);
      header.writeUInt16LE(1, 22);
      header.writeUInt32LE(rate, 24);
      header.writeUInt32LE(rate * 4, 28);
      header.writeUInt16LE(4, 32);
      header.writeUInt16LE(32, 34);
      header.write("data", 36, "ascii");
      header.writeUInt32LE(payload.length, 40);
      const path = join(dir, name);
      await writeFile(path, Buffer.concat([header, payload]));
      return path;
    };
    const refPath = await write("ref.wav", ref);
    const degPath = await write("deg.wav", deg);
    const { stdout } = await execFileAsync("python3", [
      "-m", "pesqkit.cli", "score",
      "--ref", refPath, "--deg", degPath,
      "--rate", String(rate), "--mode", mode, "--format", "json",
    ]);
    return (JSON.parse(stdout) as { score: number }).score;
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

describe("pesqScore", () => {
  it("returns 4.5 for identical narrowband input", async () => {
    const sig = carrier(8000, 3.0);
    const score = await pesqScore(sig, sig, 8000, "nb-raw");
    expect(score).toBe(4.5);
  }, 60000);

  it("matches the CLI bit for bit on conformance pairs", async () => {
    const cases: Array<{ rate: 8000 | 16000; mode: "nb-raw" | "nb-lqo" | "wb"; c2: boolean }> = [
      { rate: 8000, mode: "nb-raw", c2: false },
      { rate: 16000, mode: "nb-lqo", c2: false },
      { rate: 16000, mode: "wb", c2: false },
      { rate: 16000, mode: "wb", c2: true },
    ];
    for (const { rate, mode, c2 } of cases) {
      const ref = carrier(rate, 3.0);
      const deg = degrade(ref, 18);
      const viaBinding = await pesqScore(ref, deg, rate, mode, c2);
      const viaCli = await cliScore(ref, deg, rate, c2 ? "wb-c2" : mode);
      expect(viaBinding).toBe(viaCli); // full double precision equality
    }
  }, 240000);

  it("accepts int16-scale buffers without rescaling", async () => {
    const rate = 8000;
    const float = carrier(rate, 3.0);
    const ints = new Int16Array(float.length);
    for (let i = 0; i < float.length; i++) {
      ints[i] = Math.max(-32768, Math.min(32767, Math.round(float[i] * 32768)));
    }
    const viaInt = await pesqScore(ints, ints, rate, "nb-raw");
    expect(viaInt).toBe(4.5);
  }, 60000);

  it("shows the corrigendum 2 direction on a degraded wideband pair", async () => {
    const ref = carrier(16000, 3.0);
    const deg = degrade(ref, 12);
    const withC2 = await pesqScore(ref, deg, 16000, "wb", true);
    const without = await pesqScore(ref, deg, 16000, "wb", false);
    expect(withC2).toBeGreaterThan(without);
  }, 120000);

  it("rejects invalid rate/mode combinations with the CLI message", async () => {
    const sig = carrier(8000, 1.0);
    await expect(pesqScore(sig, sig, 8000, "wb")).rejects.toThrow(
      /wideband requires 16000/,
    );
    await expect(pesqScore(sig, sig, 8000, "nb-lqo", true)).rejects.toThrow(PesqError);
  }, 60000);
});

describe("versionString", () => {
  it("reports the Corrigendum 2 provenance by default", () => {
    expect(versionString()).toContain("Corrigendum 2");
  });
  it("names the plain P.862.2 mode when asked", () => {
    expect(versionString("wb", false)).toContain("without Corrigendum 2");
  });
});
