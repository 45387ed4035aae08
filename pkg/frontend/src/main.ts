/** DOM wiring for the authoring client. All logic that merits testing
 * lives in the sibling modules; this file only binds it to elements. */

import { ApiClient, ApiError } from "./api.js";
import { clientToCanvas, imageDrawRect } from "./coords.js";
import { annotateSource, formatDiagnostic } from "./diagnostics.js";
import { MaskToolController, type MaskToolSettings } from "./masktool.js";
import { compositeMask, type RgbaBuffer } from "./overlay.js";
import { PlaybackController } from "./playback.js";
import { restoreSession, UiSessionState } from "./state.js";
import type { MaskTool } from "./types.js";

const api = new ApiClient("");

let state: UiSessionState | null = null;
let maskTool: MaskToolController | null = null;
let playback: PlaybackController | null = null;
let projectorBitmap: ImageBitmap | null = null;
let projectorPixels: RgbaBuffer | null = null;
const maskPixels = new Map<string, Uint8ClampedArray>();
let playTimer: number | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const sceneCanvas = el<HTMLCanvasElement>("scene-canvas");
const previewCanvas = el<HTMLCanvasElement>("preview-canvas");
const banner = el<HTMLDivElement>("error-banner");
const inlineMsg = el<HTMLDivElement>("inline-message");
const diagnosticsPanel = el<HTMLPreElement>("diagnostics");
const statusLine = el<HTMLDivElement>("status");

function demoScene(): Record<string, unknown> {
  // small two-patch textured plane; enough to click flat regions
  const size = 48;
  const texture: number[][][] = [];
  for (let y = 0; y < size; y++) {
    const row: number[][] = [];
    for (let x = 0; x < size; x++) {
      row.push(x < size / 2 ? [200, 90, 60] : [60, 120, 210]);
    }
    texture.push(row);
  }
  return {
    rig: {
      camera: { fx: 140, fy: 140, cx: 63.5, cy: 47.5, width: 128, height: 96 },
      projector: { fx: 120, fy: 120, cx: 47.5, cy: 47.5, width: 96, height: 96 },
      rotation: [0.9855847669095608, 0, -0.16918234906699603, 0, 1, 0, 0.16918234906699603, 0, 0.9855847669095608],
      translation: [-0.2463961917273902, 0, -0.04229558726674901],
    },
    planes: [
      {
        corner: [-0.7409923976848174, -0.75, 1.6514873486536645],
        edge_u: [0, 1.5, 0],
        edge_v: [1.7219847953696348, 0, -0.802974697307329],
        texture_rgb: texture,
      },
    ],
    ambient: 0.2,
    projector_gain: 1.0,
    noise_sigma: 0.0039,
    gamma: 1.0,
    seed: 11,
  };
}

function setStatus(text: string): void {
  statusLine.textContent = text;
}

function showErrors(): void {
  if (!state) return;
  banner.hidden = state.errorBanner === null;
  banner.textContent = state.errorBanner ?? "";
  inlineMsg.hidden = state.inlineError === null;
  inlineMsg.textContent = state.inlineError ?? "";
}

async function loadProjectorImage(): Promise<void> {
  if (!state) return;
  const response = await fetch(api.projectorImageUrl(state.sessionId));
  projectorBitmap = await createImageBitmap(await response.blob());
  const [w, h] = state.projectorSize;
  const off = new OffscreenCanvas(w, h);
  const ctx = off.getContext("2d")!;
  ctx.drawImage(projectorBitmap, 0, 0);
  const data = ctx.getImageData(0, 0, w, h);
  projectorPixels = { width: w, height: h, data: data.data };
  redrawScene();
}

async function loadMaskPixels(maskId: string): Promise<void> {
  if (!state) return;
  const response = await fetch(api.maskUrl(state.sessionId, maskId));
  const bitmap = await createImageBitmap(await response.blob());
  const [w, h] = state.projectorSize;
  const off = new OffscreenCanvas(w, h);
  const ctx = off.getContext("2d")!;
  ctx.drawImage(bitmap, 0, 0);
  const rgba = ctx.getImageData(0, 0, w, h).data;
  const alpha = new Uint8ClampedArray(w * h);
  for (let i = 0; i < w * h; i++) alpha[i] = rgba[i * 4];
  maskPixels.set(maskId, alpha);
}

function redrawScene(): void {
  if (!state || !projectorPixels) return;
  const [w, h] = state.projectorSize;
  const composed: RgbaBuffer = {
    width: w,
    height: h,
    data: new Uint8ClampedArray(projectorPixels.data),
  };
  for (const mask of state.masks) {
    const alpha = maskPixels.get(mask.id);
    if (mask.visible && alpha) compositeMask(composed, alpha, mask.color);
  }
  const off = new OffscreenCanvas(w, h);
  const pixels = new Uint8ClampedArray(new ArrayBuffer(composed.data.length));
  pixels.set(composed.data);
  off.getContext("2d")!.putImageData(new ImageData(pixels, w, h), 0, 0);
  const ctx = sceneCanvas.getContext("2d")!;
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, sceneCanvas.width, sceneCanvas.height);
  const rect = imageDrawRect(sceneCanvas.width, sceneCanvas.height, w, h);
  ctx.drawImage(off, rect.x, rect.y, rect.width, rect.height);
  renderMaskList();
}

function renderMaskList(): void {
  if (!state) return;
  const list = el<HTMLUListElement>("mask-list");
  list.replaceChildren();
  for (const mask of state.masks) {
    const item = document.createElement("li");
    const toggle = document.createElement("input");
    toggle.type = "checkbox";
    toggle.checked = mask.visible;
    toggle.addEventListener("change", () => {
      state!.toggleMask(mask.id);
      redrawScene();
    });
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = `rgb(${mask.color.join(",")})`;
    item.append(toggle, swatch, ` ${mask.id} (${mask.memberCount} px)`);
    list.append(item);
  }
  const maskSelect = el<HTMLSelectElement>("effect-mask");
  const previous = maskSelect.value;
  maskSelect.replaceChildren(new Option("full frame", ""));
  for (const mask of state.masks) {
    maskSelect.append(new Option(mask.id, mask.id));
  }
  maskSelect.value = state.masks.some((m) => m.id === previous) ? previous : "";
}

function renderEffectList(): void {
  if (!state) return;
  const list = el<HTMLSelectElement>("effect-list");
  list.replaceChildren();
  for (const effect of state.effects) {
    const option = document.createElement("option");
    option.value = effect.id;
    option.textContent = `${effect.id}: ${effect.spec.kind}`;
    option.selected = effect.id === state.selectedEffect;
    list.append(option);
  }
}

function toolSettings(): MaskToolSettings {
  return {
    tool: el<HTMLSelectElement>("tool-select").value as MaskTool,
    tolerance: Number(el<HTMLInputElement>("tolerance").value),
    connectivity: 4,
  };
}

async function onSceneClick(event: MouseEvent): Promise<void> {
  if (!state || !maskTool) return;
  const bounds = sceneCanvas.getBoundingClientRect();
  const [cx, cy] = clientToCanvas(
    event.clientX, event.clientY, bounds, sceneCanvas.width, sceneCanvas.height,
  );
  const [w, h] = state.projectorSize;
  const rect = imageDrawRect(sceneCanvas.width, sceneCanvas.height, w, h);
  const result = await maskTool.click(cx, cy, rect, toolSettings());
  showErrors();
  if (result.maskId) {
    await loadMaskPixels(result.maskId);
    redrawScene();
  }
}

async function onSceneDoubleClick(): Promise<void> {
  if (!maskTool) return;
  const result = await maskTool.commitLasso();
  showErrors();
  if (result.maskId) {
    await loadMaskPixels(result.maskId);
    redrawScene();
  }
}

function drawPreviewFrame(_t: number, png: Uint8Array): void {
  const buf = new Uint8Array(png); // detached copy backs the Blob
  const blob = new Blob([buf.buffer], { type: "image/png" });
  createImageBitmap(blob).then((bitmap) => {
    const ctx = previewCanvas.getContext("2d")!;
    ctx.imageSmoothingEnabled = false;
    ctx.clearRect(0, 0, previewCanvas.width, previewCanvas.height);
    const rect = imageDrawRect(previewCanvas.width, previewCanvas.height, bitmap.width, bitmap.height);
    ctx.drawImage(bitmap, rect.x, rect.y, rect.width, rect.height);
  });
  el<HTMLInputElement>("scrubber").value = String(state?.playback.t ?? 0);
}

function bindSession(fresh: UiSessionState): void {
  state = fresh;
  maskTool = new MaskToolController(api, state);
  playback = new PlaybackController(api, state, drawPreviewFrame, () => state?.selectedEffect ?? null);
  window.location.hash = state.sessionId;
  setStatus(`session ${state.sessionId} (${state.projectorSize[0]}x${state.projectorSize[1]})`);
  renderEffectList();
  void loadProjectorImage();
  void Promise.all(state.masks.map((m) => loadMaskPixels(m.id))).then(redrawScene);
}

async function scan(): Promise<void> {
  setStatus("scanning (simulated)...");
  try {
    const summary = await api.createSession({ simulate: demoScene() });
    bindSession(new UiSessionState(summary.id, summary.projector_size));
  } catch (err) {
    setStatus(err instanceof Error ? err.message : String(err));
  }
}

async function createEffect(): Promise<void> {
  if (!state) return;
  const kind = el<HTMLSelectElement>("effect-kind").value as
    | "tron" | "distort" | "cartoon" | "shader";
  const maskSel = el<HTMLSelectElement>("effect-mask").value;
  const spec = {
    kind,
    mask: maskSel === "" ? null : maskSel,
    seed: Number(el<HTMLInputElement>("effect-seed").value) || 0,
    params: {},
    shader_source: kind === "shader" ? el<HTMLTextAreaElement>("shader-source").value : "",
  };
  diagnosticsPanel.textContent = "";
  try {
    const created = await api.createEffect(state.sessionId, spec);
    state.addEffect({ id: created.id, spec });
    state.shaderDiagnostics = [];
    renderEffectList();
    await playback?.scrub(0);
  } catch (err) {
    if (err instanceof ApiError && err.diagnostics.length > 0) {
      state.shaderDiagnostics = err.diagnostics;
      const annotated = annotateSource(spec.shader_source, err.diagnostics);
      diagnosticsPanel.textContent = [
        ...err.diagnostics.map(formatDiagnostic),
        "",
        ...annotated
          .filter((entry) => entry.notes.length > 0)
          .map((entry) => `${entry.line} | ${entry.source}\n    ${entry.notes.join("; ")}`),
      ].join("\n");
    } else if (err instanceof ApiError) {
      state.setError(null, err.message);
      showErrors();
    } else {
      throw err;
    }
  }
}

function setPlaying(playing: boolean): void {
  if (!state || !playback) return;
  if (playing) {
    playback.play();
    if (playTimer !== null) window.clearInterval(playTimer);
    playTimer = window.setInterval(
      () => void playback?.tick(),
      1000 / state.playback.fps,
    );
  } else {
    playback.pause();
    if (playTimer !== null) {
      window.clearInterval(playTimer);
      playTimer = null;
    }
  }
}

function wireUi(): void {
  el<HTMLButtonElement>("scan-button").addEventListener("click", () => void scan());
  sceneCanvas.addEventListener("click", (e) => void onSceneClick(e));
  sceneCanvas.addEventListener("dblclick", () => void onSceneDoubleClick());
  el<HTMLButtonElement>("effect-create").addEventListener("click", () => void createEffect());
  el<HTMLButtonElement>("play").addEventListener("click", () => setPlaying(true));
  el<HTMLButtonElement>("pause").addEventListener("click", () => setPlaying(false));
  el<HTMLInputElement>("scrubber").addEventListener("input", (e) => {
    setPlaying(false);
    void playback?.scrub(Number((e.target as HTMLInputElement).value));
  });
  el<HTMLSelectElement>("effect-list").addEventListener("change", (e) => {
    state?.selectEffect((e.target as HTMLSelectElement).value);
    void playback?.scrub(state?.playback.t ?? 0);
  });
  el<HTMLSelectElement>("effect-kind").addEventListener("change", (e) => {
    const isShader = (e.target as HTMLSelectElement).value === "shader";
    el<HTMLDivElement>("shader-editor").hidden = !isShader;
  });
  el<HTMLSelectElement>("fps").addEventListener("change", (e) => {
    if (state) state.playback.fps = Number((e.target as HTMLSelectElement).value);
  });
}

async function boot(): Promise<void> {
  wireUi();
  const fromUrl = window.location.hash.replace(/^#/, "");
  if (fromUrl) {
    try {
      bindSession(await restoreSession(api, fromUrl));
      return;
    } catch {
      setStatus("stored session is gone; run a new scan");
    }
  }
  setStatus("no session; run a scan");
}

void boot();
