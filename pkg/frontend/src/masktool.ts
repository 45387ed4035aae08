import { ApiClient, ApiError } from "./api.js";
import { canvasToImage, type DrawRect } from "./coords.js";
import type { UiSessionState } from "./state.js";
import type { MaskRequest, MaskTool } from "./types.js";

export interface MaskToolSettings {
  tool: MaskTool;
  tolerance: number;
  connectivity: 4 | 8;
}

export interface MaskClickResult {
  requested: boolean;
  maskId: string | null;
}

/** Accumulates lasso anchors between clicks; wand/quick-select fire
 * immediately. A 422 becomes an inline message and leaves state untouched;
 * a 404 (expired session) raises the error banner. */
export class MaskToolController {
  anchors: [number, number][] = [];

  constructor(
    private api: ApiClient,
    private state: UiSessionState,
  ) {}

  /** Handle a click at canvas coordinates. Positions outside the drawn
   * image issue no request. */
  async click(
    canvasX: number,
    canvasY: number,
    rect: DrawRect,
    settings: MaskToolSettings,
  ): Promise<MaskClickResult> {
    const [imgW, imgH] = this.state.projectorSize;
    const pixel = canvasToImage(canvasX, canvasY, rect, imgW, imgH);
    if (pixel === null) {
      return { requested: false, maskId: null };
    }
    if (settings.tool === "lasso") {
      this.anchors.push(pixel);
      return { requested: false, maskId: null };
    }
    const request: MaskRequest =
      settings.tool === "magic_wand"
        ? { tool: "magic_wand", seed: pixel, tolerance: settings.tolerance, connectivity: settings.connectivity }
        : { tool: "quick_select", scribble: [pixel], tolerance: settings.tolerance };
    return this.submit(request);
  }

  /** Double-click commits the accumulated lasso anchors. */
  async commitLasso(): Promise<MaskClickResult> {
    if (this.anchors.length < 2) {
      this.anchors = [];
      return { requested: false, maskId: null };
    }
    const request: MaskRequest = { tool: "lasso", anchors: this.anchors };
    this.anchors = [];
    return this.submit(request);
  }

  private async submit(request: MaskRequest): Promise<MaskClickResult> {
    try {
      const created = await this.api.createMask(this.state.sessionId, request);
      this.state.addMask(created.id, created.member_count);
      this.state.setError(null, null);
      return { requested: true, maskId: created.id };
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.state.setError(null, err.message);
        return { requested: true, maskId: null };
      }
      if (err instanceof ApiError) {
        this.state.setError(err.message);
        return { requested: true, maskId: null };
      }
      throw err;
    }
  }
}
