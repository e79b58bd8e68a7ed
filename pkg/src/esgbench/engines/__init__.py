"""The three storage engines behind one query interface."""

from .base import StorageEngine
from .document import DocumentEngine
from .graph import GraphEngine
from .relational import RelationalEngine

ENGINE_NAMES = ("relational", "document", "graph")


def make_engine(name: str, shard_count: int = 1) -> StorageEngine:
    """Engine factory; ``shard_count`` only affects the document engine."""
    if name == "relational":
        return RelationalEngine()
    if name == "document":
        return DocumentEngine(shard_count=shard_count)
    if name == "graph":
        return GraphEngine()
    raise ValueError(f"unknown engine {name!r}; choose from {', '.join(ENGINE_NAMES)}")


__all__ = [
    "StorageEngine",
    "RelationalEngine",
    "DocumentEngine",
    "GraphEngine",
    "ENGINE_NAMES",
    "make_engine",
]
