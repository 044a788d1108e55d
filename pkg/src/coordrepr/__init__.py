"""Keypoint coordinate representations: 2D heatmaps vs. disentangled 1D classification."""

__version__ = "0.1.0"
