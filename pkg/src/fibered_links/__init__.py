"""Lifts of filling curves to circle bundles: triangulations, shapes and volume bounds."""

__version__ = "0.1.0"
