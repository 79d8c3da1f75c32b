/** Deterministic RNG so exports are reproducible across platforms. */

/** mulberry32: fast 32-bit generator, uniform on [0, 1). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Standard normals via Box-Muller. */
export function normals(rng: () => number, count: number): Float32Array {
  const out = new Float32Array(count);
  for (let i = 0; i < count; i += 2) {
    // keep u away from 0 so log stays finite
    const u = rng() + 1e-12;
    const v = rng();
    const r = Math.sqrt(-2.0 * Math.log(u));
    out[i] = r * Math.cos(2.0 * Math.PI * v);
    if (i + 1 < count) out[i + 1] = r * Math.sin(2.0 * Math.PI * v);
  }
  return out;
}

/** Uniform integers in [0, upper). */
export function uniformInts(rng: () => number, count: number, upper: number): Uint32Array {
  const out = new Uint32Array(count);
  for (let i = 0; i < count; i++) out[i] = Math.min(upper - 1, Math.floor(rng() * upper));
  return out;
}
