"""Capture golden frames for the shader suite with the scalar reference
renderer.  Run once; the PNGs are frozen as fixtures:

    python tests/make_golden_shaders.py
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from oracle_shader import render_reference
from procam.images import save_rgb
from procam.shaderlang import compile_shader
from shader_fixtures import GOLDEN_DIR, GOLDEN_SIZE, shader_paths, uniforms_for


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for path in shader_paths():
        program = compile_shader(path.read_text())
        start = time.time()
        frame = render_reference(program, uniforms_for(), GOLDEN_SIZE)
        out = GOLDEN_DIR / (path.stem + ".png")
        save_rgb(out, frame)
        print(f"{out.name}: {time.time() - start:.1f}s")


if __name__ == "__main__":
    main()
