"""Projector-camera toolkit: structured-light scanning, projector-image
reconstruction, depth recovery, selection masks, and procedural effects,
with a built-in simulator for hardware-free verification."""

__version__ = "0.1.0"
