"""Constants only."""

MAX = 10
NAMES = [
    "a",
    "b",
]
if MAX > 5:
    MIN = 1
