"""Hierarchical grid index: overfull bins get their own sub-index.

After the base rebuild, every unique bin list holding more than
max_bin_records records is re-indexed by a child HierGridIndex built over a
SubGridSource proxy (tight bounding extents, no copied payloads), recursing
until lists are small enough or bins reach the minimum dimension. Queries
landing in a subdivided bin are delegated; neighborhood and border scans
consult sub-indexes instead of scanning raw lists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .geometry import (
    BinCoord,
    Extents,
    Point2D,
    default_smallest_dimension,
)
from .gridindex import BinList, GridIndex, _Best, _BuiltState, _scan_list
from .sources import IndexableSource, RecordId, SubGridSource


@dataclass(frozen=True)
class HierConfig:
    """Subdivision policy.

    max_bin_records: bins holding more than this subdivide.
    smallest_bin_dimension: bins this narrow or flat never subdivide; None
        resolves once, at the root rebuild, to a data-diagonal-scaled value.
    sub_divisions: grid divisions for child indexes; None inherits the
        parent's divisions.
    """

    max_bin_records: int
    smallest_bin_dimension: Optional[float] = None
    sub_divisions: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.max_bin_records < 1:
            raise ValueError(f"max_bin_records must be >= 1, got {self.max_bin_records}")
        if self.smallest_bin_dimension is not None and not (self.smallest_bin_dimension > 0):
            raise ValueError("smallest_bin_dimension must be positive")
        if self.sub_divisions is not None:
            sx, sy = self.sub_divisions
            if sx < 1 or sy < 1 or sx * sy < 2:
                raise ValueError(f"sub_divisions must cover >= 2 bins, got {self.sub_divisions}")


class HierGridIndex(GridIndex):
    """Grid index whose overfull bins recurse into child grid indexes."""

    def __init__(
        self,
        source: IndexableSource,
        divisions_x: int,
        divisions_y: int,
        config: HierConfig,
        *,
        _is_sub: bool = False,
        _size_floor: Optional[float] = None,
    ) -> None:
        if divisions_x * divisions_y < 2:
            raise ValueError("a hierarchical grid needs at least 2 bins per level")
        super().__init__(source, divisions_x, divisions_y)
        self.config = config
        self._is_sub = _is_sub
        self._size_floor = _size_floor

    # -- rebuild hooks -------------------------------------------------------

    def _on_before_rebuild(self, state: _BuiltState) -> None:
        state.sub_indexes = []
        state.subs_by_list = {}
        state.sub_table = [None] * (self.divisions_x * self.divisions_y)

    def _on_after_rebuilt(self, state: _BuiltState) -> None:
        cfg = self.config
        floor = self._size_floor
        if floor is None:
            floor = (
                cfg.smallest_bin_dimension
                if cfg.smallest_bin_dimension is not None
                else default_smallest_dimension(state.shape.extents)
            )
        state.size_floor = floor
        shape = state.shape
        if shape.bin_width > floor and shape.bin_height > floor:
            sdx, sdy = cfg.sub_divisions if cfg.sub_divisions is not None else (
                self.divisions_x,
                self.divisions_y,
            )
            for lst in state.rendered.registry:
                if len(lst) <= cfg.max_bin_records:
                    continue
                sub_source = SubGridSource(self._source, lst.ids)
                sub = HierGridIndex(
                    sub_source, sdx, sdy, cfg, _is_sub=True, _size_floor=floor
                )
                sub.rebuild()
                state.sub_indexes.append(sub)
                state.subs_by_list[lst] = sub
        if state.subs_by_list:
            table = state.sub_table
            for flat, lst in enumerate(state.filled.flat):
                table[flat] = state.subs_by_list.get(lst)

    # -- inspection ----------------------------------------------------------

    @property
    def sub_indexes(self) -> list["HierGridIndex"]:
        return list(self.ensure_built().sub_indexes)

    def sub_at(self, c: BinCoord) -> Optional["HierGridIndex"]:
        state = self.ensure_built()
        return state.sub_table[c.j * self.divisions_x + c.i]

    def leaf_occupancies(self) -> list[tuple[Extents, tuple[RecordId, ...]]]:
        """(bin rectangle, ascending root record ids) for every occupied
        leaf bin, i.e. every rendered bin that was not subdivided."""
        state = self.ensure_built()
        out: list[tuple[Extents, tuple[RecordId, ...]]] = []
        self._collect_leaves(state, out, None)
        return out

    def _collect_leaves(self, state, out, id_map) -> None:
        for lst, coord in state.rendered.registry.items():
            sub = state.subs_by_list.get(lst)
            mapped = lst.ids if id_map is None else [id_map[r] for r in lst.ids]
            if sub is None:
                out.append((state.shape.bin_rect(coord), tuple(sorted(mapped))))
            else:
                sub._collect_leaves(sub.ensure_built(), out, mapped)

    # -- queries -------------------------------------------------------------

    def _inside_search(
        self, state: _BuiltState, q: Point2D, c: BinCoord, best: _Best, bound_d2: float
    ) -> bool:
        sub = state.sub_table[c.j * self.divisions_x + c.i]
        if sub is not None:
            self._delegate(sub, q, best, bound_d2)
            return False
        return super()._inside_search(state, q, c, best, bound_d2)

    def _consult(
        self,
        state: _BuiltState,
        coord: BinCoord,
        lst: BinList,
        q: Point2D,
        best: _Best,
        bound_d2: float,
    ) -> None:
        sub = state.subs_by_list.get(lst)
        if sub is None:
            _scan_list(lst, q.x, q.y, best)
        else:
            self._delegate(sub, q, best, bound_d2)

    def _delegate(self, sub: "HierGridIndex", q: Point2D, best: _Best, bound_d2: float) -> None:
        """Run the query in a child index, then translate its local winner
        into this index's id space before comparing."""
        local = _Best()
        sub_state = sub.ensure_built()
        sub._search(sub_state, q, local, min(bound_d2, best.d2))
        best.cost += local.cost
        if local.rid >= 0:
            best.offer(local.d2, sub.source.to_parent(local.rid))

    def _border_search(self, state: _BuiltState, q: Point2D, best: _Best, bound_d2: float) -> None:
        """Out-of-extents scan in nearest-bin-first order with pruning.

        Child indexes cannot hand a whole concatenated border to one vector
        scan the way the flat index does, because consulted bins may
        themselves be subdivided; visiting bins by ascending rectangle
        distance and stopping once no unvisited bin can beat the running
        best keeps delegated edge scans cheap. A standalone index with no
        subdivisions anywhere keeps the flat scan, and with it the exact
        flat-index cost.
        """
        if not self._is_sub and not state.sub_indexes:
            super()._border_search(state, q, best, bound_d2)
            return
        shape = state.shape
        ext = shape.extents
        bw, bh = shape.bin_width, shape.bin_height
        qx, qy = q.x, q.y
        ranked = []
        for c in state.border_coords:
            x0 = ext.min.x + c.i * bw
            x1 = ext.min.x + (c.i + 1) * bw
            y0 = ext.min.y + c.j * bh
            y1 = ext.min.y + (c.j + 1) * bh
            dx = x0 - qx if qx < x0 else (qx - x1 if qx > x1 else 0.0)
            dy = y0 - qy if qy < y0 else (qy - y1 if qy > y1 else 0.0)
            ranked.append((dx * dx + dy * dy, c.j, c.i))
        ranked.sort()
        filled = state.filled
        seen: set[int] = set()
        for rd2, j, i in ranked:
            limit = bound_d2 if bound_d2 < best.d2 else best.d2
            if rd2 > limit:
                break
            lst = filled.at(BinCoord(i, j))
            if id(lst) in seen:
                continue
            seen.add(id(lst))
            self._consult(state, BinCoord(i, j), lst, q, best, bound_d2)
