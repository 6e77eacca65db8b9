"""Command-line front-end and experiment plumbing."""
