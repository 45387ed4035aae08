"""Interpreter for a Shadertoy-style GLSL subset, rendering on the CPU.

`compile_shader` lexes, parses, and type-checks a fragment shader with the
standard `mainImage(out vec4 fragColor, in vec2 fragCoord)` entry point and
iTime/iResolution/iChannelN uniforms.  It returns a ShaderProgram or raises
ShaderCompileError carrying line/column diagnostics; it never crashes on
malformed input.  `render_frame` evaluates the program for every pixel
(fragCoord origin bottom-left, pixel centers at +0.5) and quantizes to
8-bit RGB.
"""

from .diagnostics import Diagnostic, ShaderCompileError, ShaderRuntimeError
from .checker import compile_shader
from .nodes import ShaderProgram
from .interp import UniformBlock, Channel, render_frame, render_region

__all__ = [
    "Diagnostic",
    "ShaderCompileError",
    "ShaderRuntimeError",
    "ShaderProgram",
    "UniformBlock",
    "Channel",
    "compile_shader",
    "render_frame",
    "render_region",
]
