"""Indexable record sources: the collection contract, an in-memory point
collection, and the proxy sub-collection used for hierarchical subdivision.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Iterable, Sequence

import numpy as np

from .geometry import Extents, bounding_extents

RecordId = int


class EmptySourceError(ValueError):
    """Raised when an operation needs at least one record and has none."""


class Record:
    """Mutable scratch record reused across fetch() calls.

    The base contract carries position only; richer sources may subclass and
    override the source's new_scratch() to carry payloads along.
    """

    __slots__ = ("x", "y")

    def __init__(self, x: float = 0.0, y: float = 0.0) -> None:
        self.x = x
        self.y = y

    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Record({self.x}, {self.y})"


class IndexableSource(ABC):
    """What a collection must expose to be indexable.

    The changed flag is the lazy-rebuild handshake: any mutation sets it,
    and only an index acknowledging a completed rebuild clears it. Reads may
    be concurrent with each other but not with mutation.
    """

    @property
    @abstractmethod
    def record_count(self) -> int: ...

    @property
    @abstractmethod
    def data_extents(self) -> Extents:
        """Tight bounding box of all records; raises EmptySourceError if none."""

    @property
    @abstractmethod
    def changed(self) -> bool: ...

    @changed.setter
    @abstractmethod
    def changed(self, value: bool) -> None: ...

    @abstractmethod
    def fetch(self, rid: RecordId, scratch: Record) -> Record:
        """Overwrite scratch with record rid's data and return it."""

    def new_scratch(self) -> Record:
        """Scratch instance compatible with this source's fetch()."""
        return Record()


class PointCollection(IndexableSource):
    """In-memory 2D point records backed by a float64 array."""

    def __init__(self, points: Iterable[tuple[float, float]] = ()) -> None:
        pts = np.asarray(list(points), dtype=np.float64)
        if pts.size == 0:
            pts = np.empty((0, 2), dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be (x, y) pairs")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        self._pts = pts
        self._changed = True
        self._extents: Extents | None = None

    @property
    def record_count(self) -> int:
        return len(self._pts)

    @property
    def positions(self) -> np.ndarray:
        """Read-only (n, 2) view of the stored points."""
        view = self._pts.view()
        view.flags.writeable = False
        return view

    @property
    def data_extents(self) -> Extents:
        if len(self._pts) == 0:
            raise EmptySourceError("extents of an empty collection")
        if self._extents is None:
            lo = self._pts.min(axis=0)
            hi = self._pts.max(axis=0)
            self._extents = bounding_extents([(lo[0], lo[1]), (hi[0], hi[1])])
        return self._extents

    @property
    def changed(self) -> bool:
        return self._changed

    @changed.setter
    def changed(self, value: bool) -> None:
        self._changed = bool(value)

    def fetch(self, rid: RecordId, scratch: Record) -> Record:
        if not 0 <= rid < len(self._pts):
            raise IndexError(f"record id {rid} out of range [0, {len(self._pts)})")
        row = self._pts[rid]
        scratch.x = float(row[0])
        scratch.y = float(row[1])
        return scratch

    def _mutated(self) -> None:
        self._changed = True
        self._extents = None

    def append(self, x: float, y: float) -> RecordId:
        self._pts = np.vstack([self._pts, np.array([[x, y]], dtype=np.float64)])
        self._mutated()
        return len(self._pts) - 1

    def remove_at(self, rid: RecordId) -> None:
        if not 0 <= rid < len(self._pts):
            raise IndexError(f"record id {rid} out of range")
        self._pts = np.delete(self._pts, rid, axis=0)
        self._mutated()

    def move(self, rid: RecordId, x: float, y: float) -> None:
        if not 0 <= rid < len(self._pts):
            raise IndexError(f"record id {rid} out of range")
        self._pts[rid] = (x, y)
        self._mutated()


class SubGridSource(IndexableSource):
    """Proxy over a shared id list; never copies record payloads.

    Local ids are 0..len(ids)-1 and remap through ids[k] into the parent.
    Tie-breaks inside an index built over this source use local ids; the
    lists produced by grid rendering are ascending, so local order matches
    parent order for every proxy the hierarchy creates.
    """

    def __init__(self, parent: IndexableSource, ids: Sequence[RecordId]) -> None:
        self._parent = parent
        self._ids = ids
        self._changed = True

    @property
    def parent(self) -> IndexableSource:
        return self._parent

    @property
    def ids(self) -> Sequence[RecordId]:
        return self._ids

    def to_parent(self, local: RecordId) -> RecordId:
        return self._ids[local]

    @property
    def record_count(self) -> int:
        return len(self._ids)

    @property
    def data_extents(self) -> Extents:
        if len(self._ids) == 0:
            raise EmptySourceError("extents of an empty proxy")
        scratch = self._parent.new_scratch()

        def _positions():
            for rid in self._ids:
                rec = self._parent.fetch(rid, scratch)
                yield (rec.x, rec.y)

        return bounding_extents(_positions())

    @property
    def changed(self) -> bool:
        return self._changed

    @changed.setter
    def changed(self, value: bool) -> None:
        self._changed = bool(value)

    def fetch(self, rid: RecordId, scratch: Record) -> Record:
        if not 0 <= rid < len(self._ids):
            raise IndexError(f"record id {rid} out of range [0, {len(self._ids)})")
        return self._parent.fetch(self._ids[rid], scratch)

    def new_scratch(self) -> Record:
        return self._parent.new_scratch()


def compute_extents(source: IndexableSource) -> Extents:
    """Tight, degeneracy-inflated bounding box of every record position."""
    if source.record_count < 1:
        raise EmptySourceError("compute_extents of an empty source")
    return source.data_extents


def load_points(path) -> PointCollection:
    """Read the x,y-per-line point file format.

    UTF-8 text; one record per line as two decimal literals separated by a
    comma; blank lines and lines starting with '#' are ignored.
    """
    pts: list[tuple[float, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'x,y', got {raw!r}")
            try:
                pts.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected 'x,y', got {raw!r}") from None
    return PointCollection(pts)


def save_points(path, collection: PointCollection, header: str | None = None) -> None:
    """Write the x,y-per-line point file format (shortest round-trip floats)."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for x, y in collection.positions:
            fh.write(f"{float(x)!r},{float(y)!r}\n")
