"""Compiler and runtime diagnostics with 1-based source positions."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "line": self.line,
            "column": self.column,
            "message": self.message,
        }


class ShaderCompileError(Exception):
    """Compilation failed; `.diagnostics` lists the errors."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class ShaderRuntimeError(Exception):
    """Evaluation aborted (e.g. the per-pixel loop-iteration guard fired)."""

    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


class SourceError(Exception):
    """Internal: a positioned error raised while compiling."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{line}:{column}: {message}")

    def diagnostic(self) -> Diagnostic:
        return Diagnostic("error", self.line, self.column, self.message)
