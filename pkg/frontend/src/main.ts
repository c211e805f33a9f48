import { MouseCapture } from "./capture";
import { ServiceClient } from "./api";
import { AnalyzeScheduler, initialState } from "./state";
import { renderAnalysis, feedbackTop, DrawSurface } from "./render";
import type { RawEvent, UiConfig } from "./types";

/**
 * Browser wiring: transparent interaction canvas above a raster basemap,
 * event capture streaming to the service, analyze trigger, overlay painting
 * and the transparent feedback panel. Everything analytical is server-side.
 */

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class CanvasSurface implements DrawSurface {
  constructor(private readonly ctx: CanvasRenderingContext2D,
              readonly width: number, readonly height: number,
              private readonly tooltips: Map<string, string>) {}

  clear(): void {
    this.ctx.clearRect(0, 0, this.width, this.height);
    this.tooltips.clear();
  }

  polygon(points: Array<{ px: number; py: number }>, label: string): void {
    if (points.length < 2) return;
    this.ctx.beginPath();
    this.ctx.moveTo(points[0].px, points[0].py);
    for (const p of points.slice(1)) this.ctx.lineTo(p.px, p.py);
    this.ctx.closePath();
    this.ctx.fillStyle = "rgba(66, 135, 245, 0.25)";
    this.ctx.strokeStyle = "rgba(66, 135, 245, 0.9)";
    this.ctx.lineWidth = 1.5;
    this.ctx.fill();
    this.ctx.stroke();
    this.ctx.fillStyle = "rgba(20, 60, 130, 0.9)";
    this.ctx.font = "11px sans-serif";
    this.ctx.fillText(label, points[0].px + 4, points[0].py - 4);
  }

  marker(px: number, py: number, label: string, tooltip: string): void {
    this.ctx.beginPath();
    this.ctx.arc(px, py, 6, 0, 2 * Math.PI);
    this.ctx.fillStyle = "rgba(235, 94, 52, 0.95)";
    this.ctx.fill();
    this.ctx.strokeStyle = "white";
    this.ctx.lineWidth = 2;
    this.ctx.stroke();
    this.tooltips.set(label, tooltip);
  }
}

/**
 * Raster basemap: a grid of public OSM tiles around the viewport center.
 * Tiles are Web-Mercator while the interaction plane is equirectangular;
 * at desk-scale extents the vertical mismatch is negligible for a backdrop.
 */
function drawBasemap(canvas: HTMLCanvasElement, cfg: UiConfig): void {
  const ctx = canvas.getContext("2d")!;
  const zoom = Math.max(1, Math.min(18,
    Math.round(Math.log2(360 / (cfg.viewport.scale * 256)))));
  const n = 2 ** zoom;
  const latRad = (cfg.viewport.gamma * Math.PI) / 180;
  const centerX = ((cfg.viewport.theta + 180) / 360) * n;
  const centerY = ((1 - Math.asinh(Math.tan(latRad)) / Math.PI) / 2) * n;
  const degPerTile = 360 / n;
  const pxPerTile = degPerTile / cfg.viewport.scale;
  const tilesAcross = Math.ceil(canvas.width / pxPerTile / 2) + 1;
  const tilesDown = Math.ceil(canvas.height / pxPerTile / 2) + 1;
  for (let dx = -tilesAcross; dx <= tilesAcross; dx++) {
    for (let dy = -tilesDown; dy <= tilesDown; dy++) {
      const tx = Math.floor(centerX + dx);
      const ty = Math.floor(centerY + dy);
      if (ty < 0 || ty >= n) continue;
      const img = new Image();
      const originPx = canvas.width / 2 + (tx - centerX) * pxPerTile;
      const originPy = canvas.height / 2 + (ty - centerY) * pxPerTile;
      img.onload = () => ctx.drawImage(img, originPx, originPy, pxPerTile, pxPerTile);
      img.src = `https://tile.openstreetmap.org/${zoom}/${((tx % n) + n) % n}/${ty}.png`;
    }
  }
}

async function boot(): Promise<void> {
  const cfg: UiConfig = await (await fetch("./config.json")).json();
  const basemap = el<HTMLCanvasElement>("basemap");
  const overlay = el<HTMLCanvasElement>("overlay");
  basemap.width = overlay.width = cfg.canvas.width;
  basemap.height = overlay.height = cfg.canvas.height;
  drawBasemap(basemap, cfg);

  const tooltips = new Map<string, string>();
  const surface = new CanvasSurface(overlay.getContext("2d")!,
    overlay.width, overlay.height, tooltips);
  const client = new ServiceClient(cfg.serviceUrl);
  const state = initialState(cfg.viewport);
  const toast = el<HTMLDivElement>("toast");
  const showError = (message: string) => {
    toast.textContent = message;
    toast.classList.add("visible");
    setTimeout(() => toast.classList.remove("visible"), 4000);
  };

  // ordered delivery: each batch waits for the previous one
  let sendChain: Promise<unknown> = Promise.resolve();
  const sendBatch = (batch: RawEvent[]) => {
    if (!state.sessionId) return;
    const id = state.sessionId;
    sendChain = sendChain
      .then(() => client.pushEvents(id, batch))
      .catch((err) => showError(`event push failed: ${err.message ?? err}`));
  };

  const capture = new MouseCapture(
    cfg.epsilonMs,
    () => ({ width: overlay.width, height: overlay.height }),
    sendBatch,
  );
  const start = performance.now();
  overlay.addEventListener("pointermove", (e) => {
    const rect = overlay.getBoundingClientRect();
    capture.pointerMove({ px: e.clientX - rect.left, py: e.clientY - rect.top,
                          t: performance.now() - start });
  });
  overlay.addEventListener("pointerleave", () => capture.pointerLeave());
  setInterval(() => capture.flushIfDue(performance.now() - start), cfg.epsilonMs);

  const panel = el<HTMLUListElement>("facets");
  const scheduler = new AnalyzeScheduler(
    state,
    async () => {
      await sendChain; // drain pending events before analyzing
      if (!state.sessionId) throw new Error("no session yet: load a dataset first");
      return client.analyze(state.sessionId);
    },
    (response) => {
      renderAnalysis(surface, response, state.viewport);
      panel.replaceChildren(...feedbackTop(response).map(({ facet, weight }) => {
        const li = document.createElement("li");
        li.textContent = `${facet}: ${weight.toFixed(4)}`;
        return li;
      }));
      el<HTMLSpanElement>("status").textContent =
        `T=${response.interaction_count} confidence=${response.confidence.toFixed(3)} ` +
        `rois=${response.rois.features.length} algorithm=${response.algorithm ?? "-"}`;
    },
    showError,
  );

  el<HTMLButtonElement>("analyze").addEventListener("click", () => void scheduler.trigger());
  const periodic = el<HTMLInputElement>("periodic");
  periodic.addEventListener("change", () => {
    if (periodic.checked && cfg.analyzeEveryMs) scheduler.startPeriodic(cfg.analyzeEveryMs);
    else scheduler.stopPeriodic();
  });

  el<HTMLInputElement>("dataset").addEventListener("change", async (e) => {
    const input = e.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      const ds = await client.uploadDataset(file, file.name);
      // a fresh session also runs after pan/zoom: the pixel-geo mapping
      // changed, so the recorder must restart under the new viewport
      state.sessionId = await client.createSession(ds.dataset_id, state.viewport);
      el<HTMLSpanElement>("status").textContent =
        `dataset ${ds.dataset_id} (${ds.poi_count} POIs), session ${state.sessionId}`;
    } catch (err) {
      showError(err instanceof Error ? err.message : String(err));
    }
  });
}

void boot();
