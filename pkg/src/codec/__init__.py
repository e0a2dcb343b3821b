"""JPEG-like block transform coding harness."""
