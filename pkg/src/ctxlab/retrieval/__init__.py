"""Lexical (BM25) and structure-aware retrieval tools."""

from ctxlab.retrieval.bm25 import (
    B,
    DEFAULT_WINDOW,
    K1,
    Bm25Index,
    Document,
    SearchHit,
    bm25_score,
    build_chunks,
    index_term_split,
    search_bm25,
)
from ctxlab.retrieval.tools import (
    DEFAULT_LIMIT,
    Tool,
    ToolRegistry,
    ToolResult,
    acr_toolset,
    bm25_toolset,
    search_class,
    search_code,
    search_code_in_file,
    search_method,
    search_method_in_class,
)

__all__ = [
    "B",
    "DEFAULT_LIMIT",
    "DEFAULT_WINDOW",
    "K1",
    "Bm25Index",
    "Document",
    "SearchHit",
    "Tool",
    "ToolRegistry",
    "ToolResult",
    "acr_toolset",
    "bm25_score",
    "bm25_toolset",
    "build_chunks",
    "index_term_split",
    "search_bm25",
    "search_class",
    "search_code",
    "search_code_in_file",
    "search_method",
    "search_method_in_class",
]
