"""
Command-line entry point
"""

from .app import build_parser, load_model, main

__all__ = ['build_parser', 'load_model', 'main']
