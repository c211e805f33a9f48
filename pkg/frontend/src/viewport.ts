import type { ViewportSpec } from "./types";

/**
 * Equirectangular mapping between the center-origin interaction plane
 * (pixels, y up) and lat/lon degrees, pinned at the viewport center.
 */
export function toRadians(deg: number): number {
  return (deg * Math.PI) / 180;
}

export function geoToScreen(lat: number, lon: number, v: ViewportSpec): { x: number; y: number } {
  const cosGamma = Math.cos(toRadians(v.gamma));
  return {
    x: ((lon - v.theta) * cosGamma) / v.scale,
    y: (lat - v.gamma) / v.scale,
  };
}

export function screenToGeo(x: number, y: number, v: ViewportSpec): { lat: number; lon: number } {
  const cosGamma = Math.cos(toRadians(v.gamma));
  return {
    lat: y * v.scale + v.gamma,
    lon: (x * v.scale) / cosGamma + v.theta,
  };
}

/**
 * Canvas pixels (origin top-left, y down) to interaction-plane coordinates
 * (origin canvas center, y up) and back.
 */
export function canvasToScreen(px: number, py: number, width: number, height: number) {
  return { x: px - width / 2, y: height / 2 - py };
}

export function screenToCanvas(x: number, y: number, width: number, height: number) {
  return { px: width / 2 + x, py: height / 2 - y };
}
