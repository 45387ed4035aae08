export interface SessionSummary {
  id: string;
  valid_fraction: number;
  camera_size: [number, number];
  projector_size: [number, number];
  masks: string[];
  effects: string[];
}

export interface Diagnostic {
  severity: string;
  line: number;
  column: number;
  message: string;
}

export interface EffectSpec {
  kind: "tron" | "distort" | "cartoon" | "shader";
  mask: string | null;
  seed: number;
  params: Record<string, unknown>;
  shader_source: string;
}

export interface EffectEntry {
  id: string;
  spec: EffectSpec;
}

export type MaskTool = "magic_wand" | "quick_select" | "lasso";

export interface MaskRequest {
  tool: MaskTool;
  seed?: [number, number];
  scribble?: [number, number][];
  anchors?: [number, number][];
  tolerance?: number;
  connectivity?: number;
}

export interface MaskOverlay {
  id: string;
  color: [number, number, number];
  visible: boolean;
  memberCount: number;
}

export interface PlaybackState {
  t: number;
  playing: boolean;
  fps: number;
}
