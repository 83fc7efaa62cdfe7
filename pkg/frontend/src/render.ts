/**
 * Pure geometry-to-drawing helpers. Nothing in here touches the DOM, so the
 * same functions drive both the canvas and the tests.
 */

export const LOCKED_COLOR = "#ff7f0e";
export const UNLOCKED_COLOR = "#1f77b4";
export const TARGET_COLOR = "#999999";

export interface Segment {
  points: [number, number][];
  locked: boolean;
  color: string;
}

/**
 * Split a centerline into colored body segments at the lock boundary.
 *
 * `centerline[:lock_boundary_index]` is the locked region; the remainder is
 * the unlocked window. The unlocked segment starts one point early so the
 * two polylines share the boundary vertex and draw without a gap.
 */
export function bodySegments(
  centerline: [number, number][],
  lockBoundaryIndex: number,
): Segment[] {
  const n = centerline.length;
  const boundary = Math.max(0, Math.min(lockBoundaryIndex, n));
  const segments: Segment[] = [];
  if (boundary >= 2) {
    segments.push({
      points: centerline.slice(0, boundary),
      locked: true,
      color: LOCKED_COLOR,
    });
  }
  if (boundary < n) {
    segments.push({
      points: centerline.slice(Math.max(boundary - 1, 0)),
      locked: false,
      color: UNLOCKED_COLOR,
    });
  }
  return segments;
}

export interface Viewport {
  scale: number;
  offsetX: number;
  offsetY: number;
}

/**
 * Fit a set of workspace points (mm, y up) into a canvas (px, y down).
 *
 * Keeps the aspect ratio and centers the content. An empty or degenerate
 * point set gets a 1 mm/px viewport centered on the canvas.
 */
export function fitViewport(
  points: [number, number][],
  width: number,
  height: number,
  marginPx = 30,
): Viewport {
  if (points.length === 0) {
    return { scale: 1, offsetX: width / 2, offsetY: height / 2 };
  }
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const [x, y] of points) {
    minX = Math.min(minX, x);
    maxX = Math.max(maxX, x);
    minY = Math.min(minY, y);
    maxY = Math.max(maxY, y);
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const usableW = Math.max(width - 2 * marginPx, 1);
  const usableH = Math.max(height - 2 * marginPx, 1);
  const scale = Math.min(usableW / spanX, usableH / spanY);
  const centerX = (minX + maxX) / 2;
  const centerY = (minY + maxY) / 2;
  return {
    scale,
    offsetX: width / 2 - centerX * scale,
    offsetY: height / 2 + centerY * scale,
  };
}

/** Workspace mm to canvas px; the y axis flips so up on the robot is up. */
export function toCanvas(
  point: [number, number],
  viewport: Viewport,
): [number, number] {
  return [
    point[0] * viewport.scale + viewport.offsetX,
    -point[1] * viewport.scale + viewport.offsetY,
  ];
}
