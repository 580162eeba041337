// Microphone samples arrive at the AudioContext rate (usually 44.1/48 kHz);
// the wire wants 16 kHz mono PCM16 in chunks of at most 200 ms.

export const TARGET_RATE = 16000;
export const MAX_CHUNK_SAMPLES = (TARGET_RATE * 200) / 1000; // 200 ms

export function resampleTo16k(input: Float32Array, inputRate: number): Float32Array {
  if (inputRate === TARGET_RATE) return input;
  const outLength = Math.max(1, Math.round((input.length * TARGET_RATE) / inputRate));
  const out = new Float32Array(outLength);
  const step = input.length / outLength;
  for (let i = 0; i < outLength; i++) {
    const pos = i * step;
    const idx = Math.floor(pos);
    const frac = pos - idx;
    const a = input[Math.min(idx, input.length - 1)];
    const b = input[Math.min(idx + 1, input.length - 1)];
    out[i] = a + (b - a) * frac;
  }
  return out;
}

export function floatToPcm16(input: Float32Array): Int16Array {
  const out = new Int16Array(input.length);
  for (let i = 0; i < input.length; i++) {
    const v = Math.max(-1, Math.min(1, input[i]));
    out[i] = Math.round(v < 0 ? v * 32768 : v * 32767);
  }
  return out;
}

// Accumulates resampled PCM and hands out wire-sized chunks.
export class ChunkAssembler {
  private buffer: number[] = [];
  private readonly chunkSamples: number;

  constructor(chunkMs = 100) {
    if (chunkMs <= 0 || chunkMs > 200) throw new Error("chunkMs must be in (0, 200]");
    this.chunkSamples = (TARGET_RATE * chunkMs) / 1000;
  }

  push(samples: Int16Array): Int16Array[] {
    for (let i = 0; i < samples.length; i++) this.buffer.push(samples[i]);
    const chunks: Int16Array[] = [];
    while (this.buffer.length >= this.chunkSamples) {
      chunks.push(Int16Array.from(this.buffer.splice(0, this.chunkSamples)));
    }
    return chunks;
  }

  flush(): Int16Array | null {
    if (this.buffer.length === 0) return null;
    const rest = Int16Array.from(this.buffer);
    this.buffer = [];
    return rest;
  }
}
