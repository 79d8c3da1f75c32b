import { describe, expect, it } from "vitest";

import { decodeDump, encodeDump, HEADER_BYTES } from "../src/rdmp.js";

const tiny = {
  layerIndex: 5,
  numClasses: 3,
  labels: new Uint32Array([0, 2, 1]),
  data: new Float32Array([1, 2, 3, 4, 5, 6]),
  samples: 3,
  dim: 2,
};

describe("dump encoding", () => {
  it("writes the documented 32-byte header", () => {
    const buf = encodeDump(tiny);
    expect(buf.toString("ascii", 0, 4)).toBe("RDMP");
    expect(buf.readUInt32LE(4)).toBe(1);
    expect(buf.readUInt32LE(8)).toBe(5);
    expect(buf.readBigUInt64LE(12)).toBe(3n);
    expect(buf.readBigUInt64LE(20)).toBe(2n);
    expect(buf.readUInt32LE(28)).toBe(3);
    expect(buf.length).toBe(HEADER_BYTES + 4 * 3 + 4 * 6);
  });

  it("round-trips exactly", () => {
    const back = decodeDump(encodeDump(tiny));
    expect(back.layerIndex).toBe(tiny.layerIndex);
    expect(back.numClasses).toBe(tiny.numClasses);
    expect([...back.labels]).toEqual([...tiny.labels]);
    expect([...back.data]).toEqual([...tiny.data]);
  });

  it("rejects inconsistent shapes and bad values", () => {
    expect(() => encodeDump({ ...tiny, labels: new Uint32Array([0]) })).toThrow(/labels length/);
    expect(() => encodeDump({ ...tiny, dim: 3 })).toThrow(/data length/);
    expect(() => encodeDump({ ...tiny, labels: new Uint32Array([0, 2, 9]) })).toThrow(/out of range/);
    expect(() =>
      encodeDump({ ...tiny, data: new Float32Array([1, 2, 3, 4, 5, Infinity]) }),
    ).toThrow(/non-finite/);
  });

  it("rejects corrupted buffers", () => {
    const buf = encodeDump(tiny);
    const short = buf.subarray(0, 10);
    expect(() => decodeDump(short)).toThrow(/truncated/);
    const wrongMagic = Buffer.from(buf);
    wrongMagic.write("NOPE", 0, "ascii");
    expect(() => decodeDump(wrongMagic)).toThrow(/magic/);
    const truncated = buf.subarray(0, buf.length - 4);
    expect(() => decodeDump(truncated)).toThrow(/size/);
  });
});
