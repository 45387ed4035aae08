/** Canvas/image coordinate mapping. The projector image is drawn
 * contain-fit and centered; mapping works in device pixels so clicks land
 * on the exact image pixel regardless of CSS scaling or devicePixelRatio. */

export interface DrawRect {
  x: number;
  y: number;
  width: number;
  height: number;
  scale: number; // device pixels per image pixel
}

export function imageDrawRect(
  canvasWidth: number,
  canvasHeight: number,
  imageWidth: number,
  imageHeight: number,
): DrawRect {
  const scale = Math.min(canvasWidth / imageWidth, canvasHeight / imageHeight);
  const width = imageWidth * scale;
  const height = imageHeight * scale;
  return {
    x: (canvasWidth - width) / 2,
    y: (canvasHeight - height) / 2,
    width,
    height,
    scale,
  };
}

/** Map a canvas-space position to an integer image pixel, or null when the
 * position falls outside the drawn image. */
export function canvasToImage(
  canvasX: number,
  canvasY: number,
  rect: DrawRect,
  imageWidth: number,
  imageHeight: number,
): [number, number] | null {
  const ix = Math.floor((canvasX - rect.x) / rect.scale);
  const iy = Math.floor((canvasY - rect.y) / rect.scale);
  if (ix < 0 || iy < 0 || ix >= imageWidth || iy >= imageHeight) {
    return null;
  }
  return [ix, iy];
}

/** Client (CSS) event coordinates to canvas device pixels. */
export function clientToCanvas(
  clientX: number,
  clientY: number,
  boundingRect: { left: number; top: number; width: number; height: number },
  canvasWidth: number,
  canvasHeight: number,
): [number, number] {
  const sx = canvasWidth / boundingRect.width;
  const sy = canvasHeight / boundingRect.height;
  return [(clientX - boundingRect.left) * sx, (clientY - boundingRect.top) * sy];
}
