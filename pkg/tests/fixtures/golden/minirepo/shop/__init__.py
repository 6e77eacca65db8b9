"""Shop package."""

VERSION = "0.1"
