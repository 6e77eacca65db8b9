"""Token counting: a cheap byte heuristic and an exact byte-level BPE.

The BPE reader understands the GPT-2 style pair of files: ``vocab.json``
(token -> id) and ``merges.txt`` (one ranked merge per line, optional
``#version`` header). ``vocab_path`` may name either file or the directory
holding both.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import regex

from ctxlab.errors import ConfigError

# GPT-2 pre-tokenizer pattern
PRETOKENIZE = regex.compile(r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+""")


@dataclass(frozen=True)
class TokenCounterConfig:
    mode: str = "approximate"
    vocab_path: str | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("approximate", "bpe"):
            raise ConfigError(f"unknown token counter mode {self.mode!r}")
        if self.mode == "bpe":
            if not self.vocab_path:
                raise ConfigError("bpe token counter requires a vocabulary path")
            if not Path(self.vocab_path).exists():
                raise ConfigError(f"vocabulary not found: {self.vocab_path}")

    @classmethod
    def parse(cls, spec: str) -> TokenCounterConfig:
        """``approximate`` or ``bpe:<vocab path>`` (CLI syntax)."""
        if spec == "approximate":
            return cls()
        if spec.startswith("bpe:"):
            return cls("bpe", spec[4:])
        raise ConfigError(f"bad tokenizer spec {spec!r}; expected approximate or bpe:<path>")

    def describe(self) -> str:
        return "approximate" if self.mode == "approximate" else f"bpe:{self.vocab_path}"


APPROXIMATE = TokenCounterConfig()


def _bytes_to_unicode() -> dict[int, str]:
    # printable stand-ins for raw bytes, as in GPT-2's encoder
    keep = list(range(ord("!"), ord("~") + 1)) + list(range(ord("¡"), ord("¬") + 1)) + list(range(ord("®"), ord("ÿ") + 1))
    chars = keep[:]
    n = 0
    for b in range(256):
        if b not in keep:
            keep.append(b)
            chars.append(256 + n)
            n += 1
    return dict(zip(keep, map(chr, chars)))


BYTE_ENCODER = _bytes_to_unicode()


class BpeEncoder:
    def __init__(self, vocab: dict[str, int], merges: list[tuple[str, str]]):
        self.vocab = vocab
        self.merges = merges
        self.ranks = {pair: i for i, pair in enumerate(merges)}
        self._cache: dict[str, list[str]] = {}

    @classmethod
    def load(cls, vocab_path: str | Path) -> BpeEncoder:
        path = Path(vocab_path)
        if path.is_dir():
            vocab_file, merges_file = path / "vocab.json", path / "merges.txt"
        elif path.suffix == ".json":
            vocab_file, merges_file = path, path.with_name("merges.txt")
        else:
            vocab_file, merges_file = path.with_name("vocab.json"), path
        try:
            vocab = json.loads(vocab_file.read_text(encoding="utf-8"))
            merge_lines = merges_file.read_text(encoding="utf-8").splitlines()
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read BPE vocabulary at {path}: {exc}") from exc
        if not isinstance(vocab, dict) or not all(isinstance(v, int) for v in vocab.values()):
            raise ConfigError(f"{vocab_file}: expected a JSON object of token ids")

        merges = []
        for lineno, line in enumerate(merge_lines, 1):
            if not line.strip() or (lineno == 1 and line.startswith("#version")):
                continue
            parts = line.split(" ")
            if len(parts) != 2 or not all(parts):
                raise ConfigError(f"{merges_file}:{lineno}: malformed merge rule {line!r}")
            if parts[0] + parts[1] not in vocab:
                raise ConfigError(f"{merges_file}:{lineno}: merge result {parts[0] + parts[1]!r} missing from vocabulary")
            merges.append((parts[0], parts[1]))
        missing = [c for c in BYTE_ENCODER.values() if c not in vocab]
        if missing:
            raise ConfigError(f"{vocab_file}: vocabulary lacks {len(missing)} byte-level base symbols")
        return cls(vocab, merges)

    def _bpe(self, word: str) -> list[str]:
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        symbols = list(word)
        while len(symbols) > 1:
            rank = min(self.ranks.get(pair, math.inf) for pair in zip(symbols, symbols[1:]))
            if rank == math.inf:
                break
            first, second = self.merges[rank]
            merged = []
            i = 0
            while i < len(symbols):
                if i < len(symbols) - 1 and symbols[i] == first and symbols[i + 1] == second:
                    merged.append(first + second)
                    i += 2
                else:
                    merged.append(symbols[i])
                    i += 1
            symbols = merged
        self._cache[word] = symbols
        return symbols

    def encode(self, text: str) -> list[str]:
        out: list[str] = []
        for piece in PRETOKENIZE.findall(text):
            word = "".join(BYTE_ENCODER[b] for b in piece.encode("utf-8"))
            out.extend(self._bpe(word))
        return out

    def count(self, text: str) -> int:
        return len(self.encode(text))


@lru_cache(maxsize=8)
def load_encoder(vocab_path: str) -> BpeEncoder:
    return BpeEncoder.load(vocab_path)


def count_tokens(text: str, config: TokenCounterConfig = APPROXIMATE) -> int:
    """Approximate mode: ``ceil(utf8_bytes / 4)``. BPE mode: exact token count."""
    if not text:
        return 0
    if config.mode == "approximate":
        return -(-len(text.encode("utf-8", "surrogatepass")) // 4)
    return load_encoder(str(config.vocab_path)).count(text)
