import { geoToScreen, screenToCanvas } from "./viewport";
import type { AnalyzeResponse, HighlightRecord, ViewportSpec } from "./types";

/**
 * Overlay shaping is a pure pass-through of the service payload: every
 * polygon vertex list and highlight id below is byte-traceable to the
 * analyze response. No analysis happens client-side.
 */

export type PolygonOverlay = {
  roiId: string;
  /** geo ring exactly as sent by the service ([lon, lat] pairs, closed). */
  ring: number[][];
  peculiarity: number;
  matchedCount: number;
};

export type MarkerOverlay = {
  roiId: string;
  record: HighlightRecord;
};

export function roisToOverlays(response: AnalyzeResponse): PolygonOverlay[] {
  return response.rois.features.map((f) => ({
    roiId: f.properties.roi_id,
    ring: f.geometry.coordinates[0],
    peculiarity: f.properties.peculiarity,
    matchedCount: f.properties.matched_count,
  }));
}

export function highlightsToMarkers(response: AnalyzeResponse): MarkerOverlay[] {
  const markers: MarkerOverlay[] = [];
  for (const [roiId, records] of Object.entries(response.highlights)) {
    for (const record of records) {
      markers.push({ roiId, record });
    }
  }
  return markers;
}

export type FacetWeight = { facet: string; weight: number };

/** Top facets of the transparent feedback vector, for the side panel. */
export function feedbackTop(response: AnalyzeResponse, limit = 10): FacetWeight[] {
  return Object.entries(response.feedback.normalized)
    .map(([facet, weight]) => ({ facet, weight }))
    .sort((a, b) => b.weight - a.weight || (a.facet < b.facet ? -1 : 1))
    .slice(0, limit);
}

/** Minimal drawing surface; the browser backs it with a canvas 2D context. */
export interface DrawSurface {
  readonly width: number;
  readonly height: number;
  clear(): void;
  polygon(points: Array<{ px: number; py: number }>, label: string): void;
  marker(px: number, py: number, label: string, tooltip: string): void;
}

export function renderAnalysis(
  surface: DrawSurface,
  response: AnalyzeResponse | null,
  viewport: ViewportSpec,
): { polygons: PolygonOverlay[]; markers: MarkerOverlay[] } {
  surface.clear();
  if (response === null) {
    return { polygons: [], markers: [] };
  }
  const polygons = roisToOverlays(response);
  for (const overlay of polygons) {
    const points = overlay.ring.map(([lon, lat]) => {
      const s = geoToScreen(lat, lon, viewport);
      return screenToCanvas(s.x, s.y, surface.width, surface.height);
    });
    surface.polygon(points, overlay.roiId);
  }
  const markers = highlightsToMarkers(response);
  for (const m of markers) {
    const s = geoToScreen(m.record.lat, m.record.lon, viewport);
    const { px, py } = screenToCanvas(s.x, s.y, surface.width, surface.height);
    surface.marker(px, py, m.record.id,
      `${m.record.id} relevance ${m.record.relevance.toFixed(3)} (${m.record.algorithm})`);
  }
  return { polygons, markers };
}
