"""Traversal-strategy selection for control-flow analyses written in a small DSL."""
