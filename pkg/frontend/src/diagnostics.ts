import type { Diagnostic } from "./types.js";

/** One display line per diagnostic: "line:col: severity: message". */
export function formatDiagnostic(diag: Diagnostic): string {
  return `${diag.line}:${diag.column}: ${diag.severity}: ${diag.message}`;
}

export interface GutterEntry {
  line: number;
  source: string;
  notes: string[];
}

/** Pair shader source lines with the diagnostics pointing at them, for the
 * panel rendered beside the shader text box. */
export function annotateSource(source: string, diagnostics: Diagnostic[]): GutterEntry[] {
  const lines = source.split("\n");
  return lines.map((text, index) => {
    const line = index + 1;
    const notes = diagnostics
      .filter((d) => d.line === line)
      .map((d) => `col ${d.column}: ${d.message}`);
    return { line, source: text, notes };
  });
}
