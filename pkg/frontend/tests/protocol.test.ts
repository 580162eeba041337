import { describe, expect, it } from "vitest";

import {
  encodeAudioFrame,
  encodeCommand,
  normalizeRegion,
  parseServerMessage,
  regionHasArea,
} from "../src/protocol";

describe("audio frame encoding", () => {
  it("lays out header length, header json, then little-endian pcm", () => {
    const samples = Int16Array.from([1, -2, 32767, -32768]);
    const frame = encodeAudioFrame(7, samples);
    const view = new DataView(frame);
    const headerLen = view.getUint16(0, false);
    const header = JSON.parse(
      new TextDecoder().decode(new Uint8Array(frame, 2, headerLen)),
    );
    expect(header).toEqual({ seq: 7 });
    const pcmOffset = 2 + headerLen;
    expect(frame.byteLength).toBe(pcmOffset + samples.length * 2);
    for (let i = 0; i < samples.length; i++) {
      expect(view.getInt16(pcmOffset + i * 2, true)).toBe(samples[i]);
    }
  });
});

describe("command encoding", () => {
  it("wraps kind and payload", () => {
    expect(JSON.parse(encodeCommand("undo"))).toEqual({ kind: "undo", payload: {} });
    expect(JSON.parse(encodeCommand("erase", { ids: ["s1"] }))).toEqual({
      kind: "erase",
      payload: { ids: ["s1"] },
    });
  });
});

describe("server message parsing", () => {
  it("accepts event frames", () => {
    const msg = parseServerMessage(
      '{"type":"event","seq":3,"t_ms":10,"kind":"undo","payload":{}}',
    );
    expect(msg).toMatchObject({ type: "event", seq: 3, kind: "undo" });
  });
  it("rejects junk", () => {
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage('{"type":"something"}')).toBeNull();
  });
});

describe("regions", () => {
  it("normalizes corner order", () => {
    expect(normalizeRegion([10, 20, 5, 2])).toEqual([5, 2, 10, 20]);
  });
  it("detects degenerate selections", () => {
    expect(regionHasArea([0, 0, 10, 10])).toBe(true);
    expect(regionHasArea([10, 0, 10, 10])).toBe(false);
  });
});
