/** Wire types of the exploration service (HTTP/JSON, schema_version 1). */

export type RawEvent = { x: number; y: number; t: number };

export type ViewportSpec = { gamma: number; theta: number; scale: number };

export type RoiFeature = {
  type: "Feature";
  geometry: { type: "Polygon"; coordinates: number[][][] };
  properties: {
    roi_id: string;
    source: string[];
    area_px2: number;
    peculiarity: number;
    k_budget: number;
    matched_count: number;
    pixel_vertices: number[][];
  };
};

export type HighlightRecord = {
  id: string;
  lat: number;
  lon: number;
  relevance: number;
  contribution: number;
  algorithm: string;
};

export type FeedbackView = {
  raw: Record<string, number>;
  normalized: Record<string, number>;
  interaction_count: number;
  nonzero_facets: number;
};

export type AnalyzeResponse = {
  schema_version: number;
  session_id: string;
  interaction_count: number;
  rois: { type: "FeatureCollection"; features: RoiFeature[] };
  highlights: Record<string, HighlightRecord[]>;
  algorithm: string | null;
  feedback: FeedbackView;
  confidence: number;
  timings?: Record<string, number>;
  warning?: string;
};

export type SessionStatus = {
  schema_version: number;
  session_id: string;
  dataset_poi_count: number;
  recorded_points: number;
  interaction_count: number;
  viewport: ViewportSpec;
};

/** Static UI configuration (config.json next to index.html). */
export type UiConfig = {
  serviceUrl: string;
  epsilonMs: number;
  analyzeEveryMs: number | null;
  viewport: ViewportSpec;
  canvas: { width: number; height: number };
};
