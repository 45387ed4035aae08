/** Mask overlay compositing. The only pixel work the client does: tint
 * service-provided mask pixels and blend them over the projector image at
 * 40% opacity. */

export const OVERLAY_ALPHA = 0.4;

export interface RgbaBuffer {
  width: number;
  height: number;
  data: Uint8ClampedArray; // RGBA, length = width * height * 4
}

/** Blend one mask (alpha per pixel, 0 or 255 from the service PNG) over a
 * base RGBA buffer in place. */
export function compositeMask(
  base: RgbaBuffer,
  maskAlpha: Uint8ClampedArray | Uint8Array,
  color: [number, number, number],
): void {
  const n = base.width * base.height;
  if (maskAlpha.length !== n) {
    throw new Error("mask size does not match image");
  }
  const a = OVERLAY_ALPHA;
  for (let i = 0; i < n; i++) {
    if (maskAlpha[i] < 128) continue;
    const o = i * 4;
    base.data[o] = Math.round(base.data[o] * (1 - a) + color[0] * a);
    base.data[o + 1] = Math.round(base.data[o + 1] * (1 - a) + color[1] * a);
    base.data[o + 2] = Math.round(base.data[o + 2] * (1 - a) + color[2] * a);
  }
}
