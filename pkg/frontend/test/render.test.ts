import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { feedbackTop, highlightsToMarkers, renderAnalysis, roisToOverlays,
         DrawSurface } from "../src/render";
import type { AnalyzeResponse } from "../src/types";

// a frozen analyze document produced by the real service
const payload: AnalyzeResponse = JSON.parse(
  readFileSync(new URL("./fixtures/analyze.json", import.meta.url), "utf-8"));

const VIEWPORT = { gamma: 48.85, theta: 2.35, scale: 0.001 };

class RecordingSurface implements DrawSurface {
  readonly width = 1200;
  readonly height = 800;
  cleared = 0;
  polygons: Array<{ label: string; points: Array<{ px: number; py: number }> }> = [];
  markers: Array<{ label: string; tooltip: string }> = [];

  clear(): void {
    this.cleared += 1;
    this.polygons = [];
    this.markers = [];
  }

  polygon(points: Array<{ px: number; py: number }>, label: string): void {
    this.polygons.push({ label, points });
  }

  marker(_px: number, _py: number, label: string, tooltip: string): void {
    this.markers.push({ label, tooltip });
  }
}

describe("pass-through fidelity", () => {
  it("polygon vertex lists equal the service payload exactly", () => {
    const overlays = roisToOverlays(payload);
    expect(overlays.map((o) => o.ring)).toEqual(
      payload.rois.features.map((f) => f.geometry.coordinates[0]));
    expect(overlays.map((o) => o.roiId)).toEqual(
      payload.rois.features.map((f) => f.properties.roi_id));
  });

  it("highlight marker ids equal the service payload exactly", () => {
    const markers = highlightsToMarkers(payload);
    const expected = Object.values(payload.highlights).flat().map((r) => r.id);
    expect(markers.map((m) => m.record.id)).toEqual(expected);
    // records are passed through untouched
    for (const m of markers) {
      expect(payload.highlights[m.roiId]).toContainEqual(m.record);
    }
  });

  it("renderAnalysis draws one polygon per ROI and one marker per highlight", () => {
    const surface = new RecordingSurface();
    const { polygons, markers } = renderAnalysis(surface, payload, VIEWPORT);
    expect(surface.polygons.length).toBe(payload.rois.features.length);
    expect(surface.markers.length).toBe(
      Object.values(payload.highlights).flat().length);
    expect(polygons.length).toBe(surface.polygons.length);
    expect(markers.length).toBe(surface.markers.length);
    for (const m of surface.markers) {
      expect(m.tooltip).toContain("relevance");
    }
  });

  it("an empty response clears the overlays", () => {
    const surface = new RecordingSurface();
    renderAnalysis(surface, payload, VIEWPORT);
    const result = renderAnalysis(surface, null, VIEWPORT);
    expect(surface.cleared).toBe(2);
    expect(surface.polygons).toEqual([]);
    expect(result.polygons).toEqual([]);
  });
});

describe("feedback panel", () => {
  it("lists the top facets by normalized weight", () => {
    const top = feedbackTop(payload, 10);
    expect(top.length).toBeLessThanOrEqual(10);
    const weights = top.map((f) => f.weight);
    expect([...weights].sort((a, b) => b - a)).toEqual(weights);
    const all = Object.values(payload.feedback.normalized).sort((a, b) => b - a);
    expect(weights[0]).toBe(all[0]);
  });
});
