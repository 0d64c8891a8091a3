"""Single-layer fixed grid spatial index.

Records are rendered into a grid of id lists (the rendered grid, nulls where
empty), every empty bin is then redirected to the list holding the record
nearest its center (the filled grid), and nearest queries scan the query
point's bin plus, when the home-bin short circuit does not fire, its
1-neighborhood. Rebuilds run an 11-step pipeline with two overridable hooks
(steps 6 and 10) that the hierarchical index plugs into.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .geometry import (
    BinCoord,
    Extents,
    GridShape,
    Point2D,
    bin_center,
    dist_to_bin_boundary,
    neighborhood,
    resolve_bin,
)
from .sources import EmptySourceError, IndexableSource, RecordId

# Below this list length a plain Python scan beats the numpy call overhead.
_VECTOR_SCAN_MIN = 24


class OutsideExtentsError(ValueError):
    """A record geometry fell outside the extents its source declared."""


class BinList:
    """One bin's ordered list of record ids.

    Identity-based: the registry, the filled grid and sub-grid proxies all
    share these objects by reference, and scan dedup compares identity, not
    content. Ids stay unique (a record enters a given bin once) and
    ascending, because rendering iterates record ids in order.
    """

    __slots__ = ("ids", "_members", "ids_arr", "xs", "ys", "triples")

    def __init__(self) -> None:
        self.ids: list[RecordId] = []
        self._members: set[RecordId] = set()
        self.ids_arr: np.ndarray | None = None
        self.xs: np.ndarray | None = None
        self.ys: np.ndarray | None = None
        self.triples: list[tuple[int, float, float]] | None = None

    def append(self, rid: RecordId) -> None:
        if rid not in self._members:
            self._members.add(rid)
            self.ids.append(rid)

    def __len__(self) -> int:
        return len(self.ids)

    def freeze(self, positions: np.ndarray) -> None:
        """Cache the member positions for the query scans."""
        idx = np.asarray(self.ids, dtype=np.intp)
        self.ids_arr = idx
        self.xs = positions[idx, 0].copy()
        self.ys = positions[idx, 1].copy()
        if len(idx) < _VECTOR_SCAN_MIN:
            self.triples = [
                (rid, float(self.xs[k]), float(self.ys[k]))
                for k, rid in enumerate(self.ids)
            ]
        else:
            self.triples = None


class RenderedGrid:
    """True occupancy: optional BinList per bin plus the unique-list registry."""

    def __init__(self, shape: GridShape) -> None:
        self.shape = shape
        self._bins: list[Optional[BinList]] = [None] * (shape.divisions_x * shape.divisions_y)
        self.registry: dict[BinList, BinCoord] = {}

    def at(self, c: BinCoord) -> Optional[BinList]:
        return self._bins[c.j * self.shape.divisions_x + c.i]

    def present_coords(self) -> Iterator[BinCoord]:
        nx = self.shape.divisions_x
        for flat, lst in enumerate(self._bins):
            if lst is not None:
                yield BinCoord(flat % nx, flat // nx)

    def _list_at(self, i: int, j: int) -> BinList:
        flat = j * self.shape.divisions_x + i
        lst = self._bins[flat]
        if lst is None:
            lst = BinList()
            self._bins[flat] = lst
            self.registry[lst] = BinCoord(i, j)
        return lst

    def render_point(self, rid: RecordId, p: Point2D) -> None:
        c = resolve_bin(p, self.shape)
        if c is None:
            raise OutsideExtentsError(f"point {p} outside grid extents")
        self._list_at(c.i, c.j).append(rid)

    def render_line(self, rid: RecordId, a: Point2D, b: Point2D) -> None:
        """Add rid to every bin the closed segment [a, b] touches.

        Walks the columns the segment crosses and tests candidate rows with
        closed parametric clipping, so corner- and edge-touched bins are
        never skipped.
        """
        shape = self.shape
        if resolve_bin(a, shape) is None or resolve_bin(b, shape) is None:
            raise OutsideExtentsError(f"segment ({a}, {b}) endpoint outside grid extents")
        # a == b needs no special case: the closed interval tests below
        # cover every bin the point touches, which for a point exactly on
        # a shared edge is all adjacent bins, not render_point's single one
        ext = shape.extents
        nx, ny = shape.divisions_x, shape.divisions_y
        bw, bh = shape.bin_width, shape.bin_height
        dx, dy = b.x - a.x, b.y - a.y

        i_lo = _clamp(math.floor((min(a.x, b.x) - ext.min.x) / bw) - 1, 0, nx - 1)
        i_hi = _clamp(math.floor((max(a.x, b.x) - ext.min.x) / bw) + 1, 0, nx - 1)
        for i in range(i_lo, i_hi + 1):
            x0 = ext.min.x + i * bw
            x1 = ext.min.x + (i + 1) * bw
            if dx == 0.0:
                if not (x0 <= a.x <= x1):
                    continue
                t_lo, t_hi = 0.0, 1.0
            else:
                t0 = (x0 - a.x) / dx
                t1 = (x1 - a.x) / dx
                t_lo, t_hi = (t0, t1) if t0 <= t1 else (t1, t0)
                t_lo = max(t_lo, 0.0)
                t_hi = min(t_hi, 1.0)
                if t_lo > t_hi:
                    continue
            ya = a.y + t_lo * dy
            yb = a.y + t_hi * dy
            ys0, ys1 = (ya, yb) if ya <= yb else (yb, ya)
            j_lo = _clamp(math.floor((ys0 - ext.min.y) / bh) - 1, 0, ny - 1)
            j_hi = _clamp(math.floor((ys1 - ext.min.y) / bh) + 1, 0, ny - 1)
            for j in range(j_lo, j_hi + 1):
                y0 = ext.min.y + j * bh
                y1 = ext.min.y + (j + 1) * bh
                if dy == 0.0:
                    hit = y0 <= a.y <= y1
                else:
                    u0 = (y0 - a.y) / dy
                    u1 = (y1 - a.y) / dy
                    u_lo, u_hi = (u0, u1) if u0 <= u1 else (u1, u0)
                    hit = max(t_lo, u_lo) <= min(t_hi, u_hi)
                if hit:
                    self._list_at(i, j).append(rid)

    def render_area(self, rid: RecordId, rect: Extents) -> None:
        """Add rid to every bin whose rectangle intersects rect (closed)."""
        shape = self.shape
        ext = shape.extents
        if not (ext.contains(rect.min) and ext.contains(rect.max)):
            raise OutsideExtentsError(f"rect {rect} outside grid extents")
        nx, ny = shape.divisions_x, shape.divisions_y
        bw, bh = shape.bin_width, shape.bin_height

        cols = []
        i_lo = _clamp(math.floor((rect.min.x - ext.min.x) / bw) - 1, 0, nx - 1)
        i_hi = _clamp(math.floor((rect.max.x - ext.min.x) / bw) + 1, 0, nx - 1)
        for i in range(i_lo, i_hi + 1):
            if ext.min.x + i * bw <= rect.max.x and ext.min.x + (i + 1) * bw >= rect.min.x:
                cols.append(i)
        rows = []
        j_lo = _clamp(math.floor((rect.min.y - ext.min.y) / bh) - 1, 0, ny - 1)
        j_hi = _clamp(math.floor((rect.max.y - ext.min.y) / bh) + 1, 0, ny - 1)
        for j in range(j_lo, j_hi + 1):
            if ext.min.y + j * bh <= rect.max.y and ext.min.y + (j + 1) * bh >= rect.min.y:
                rows.append(j)
        for j in rows:
            for i in cols:
                self._list_at(i, j).append(rid)


class FilledGrid:
    """Gap-filled view: every bin references a non-empty BinList."""

    def __init__(self, shape: GridShape, bins: list[BinList]) -> None:
        self.shape = shape
        self._bins = bins

    def at(self, c: BinCoord) -> BinList:
        return self._bins[c.j * self.shape.divisions_x + c.i]

    @property
    def flat(self) -> list[BinList]:
        return self._bins


@dataclass(frozen=True)
class QueryResult:
    """One nearest query's outcome.

    records_examined counts distance evaluations (ids iterated, summed
    across every level of a hierarchical search). short_circuit is set only
    when this index's own home-bin scan proved the result exact.
    """

    record: RecordId
    distance: float
    records_examined: int
    short_circuit: bool = False


class _Best:
    """Running best candidate plus the examined-records counter."""

    __slots__ = ("d2", "rid", "cost")

    def __init__(self) -> None:
        self.d2 = math.inf
        self.rid = -1
        self.cost = 0

    def offer(self, d2: float, rid: RecordId) -> None:
        if d2 < self.d2 or (d2 == self.d2 and rid < self.rid):
            self.d2 = d2
            self.rid = rid


class _BuiltState:
    """Everything one rebuild produces, swapped in atomically.

    Queries read a single reference to this object, so a concurrent rebuild
    never exposes a partially built grid. The sub_* fields stay empty for
    the flat index; the hierarchical subclass fills them in its hooks.
    """

    __slots__ = (
        "shape",
        "rendered",
        "filled",
        "positions",
        "border_coords",
        "border_ids",
        "border_xs",
        "border_ys",
        "sub_table",
        "subs_by_list",
        "sub_indexes",
        "size_floor",
    )

    def __init__(self, shape: GridShape) -> None:
        self.shape = shape
        self.rendered = RenderedGrid(shape)
        self.filled: FilledGrid | None = None
        self.positions: np.ndarray | None = None
        self.border_coords: list[BinCoord] = []
        self.border_ids: np.ndarray | None = None
        self.border_xs: np.ndarray | None = None
        self.border_ys: np.ndarray | None = None
        self.sub_table: list | None = None
        self.subs_by_list: dict = {}
        self.sub_indexes: list = []
        self.size_floor: float | None = None


def _clamp(v: int, lo: int, hi: int) -> int:
    return lo if v < lo else hi if v > hi else v


def _scan_list(lst: BinList, qx: float, qy: float, best: _Best) -> None:
    """Linear scan of one list; every id counts as one distance evaluation."""
    n = len(lst.ids)
    best.cost += n
    triples = lst.triples
    if triples is not None:
        for rid, x, y in triples:
            dx = x - qx
            dy = y - qy
            d2 = dx * dx + dy * dy
            if d2 < best.d2 or (d2 == best.d2 and rid < best.rid):
                best.d2 = d2
                best.rid = rid
    else:
        dx = lst.xs - qx
        dy = lst.ys - qy
        d2 = dx * dx + dy * dy
        k = int(d2.argmin())  # first minimum = lowest id (ids ascend)
        m = float(d2[k])
        best.offer(m, int(lst.ids_arr[k]))


def _list_min(lst: BinList, qx: float, qy: float) -> tuple[float, int]:
    """(squared distance, id) of the list member nearest (qx, qy)."""
    triples = lst.triples
    if triples is not None:
        bd = math.inf
        br = -1
        for rid, x, y in triples:
            dx = x - qx
            dy = y - qy
            d2 = dx * dx + dy * dy
            if d2 < bd:
                bd = d2
                br = rid
        return bd, br
    dx = lst.xs - qx
    dy = lst.ys - qy
    d2 = dx * dx + dy * dy
    k = int(d2.argmin())
    return float(d2[k]), int(lst.ids_arr[k])


class GridIndex:
    """Fixed-divisions grid index over an IndexableSource of point records.

    Built lazily: any query first checks the source's changed flag and
    rebuilds if needed. A built index is immutable; concurrent queries are
    safe, and rebuilds swap the whole built state in one assignment.
    """

    def __init__(self, source: IndexableSource, divisions_x: int, divisions_y: int) -> None:
        if divisions_x < 1 or divisions_y < 1:
            raise ValueError(f"divisions must be >= 1, got {divisions_x}x{divisions_y}")
        self._source = source
        self.divisions_x = divisions_x
        self.divisions_y = divisions_y
        self._state: _BuiltState | None = None
        self._lock = threading.Lock()

    # -- inspection --------------------------------------------------------

    @property
    def source(self) -> IndexableSource:
        return self._source

    @property
    def shape(self) -> GridShape:
        return self.ensure_built().shape

    @property
    def rendered(self) -> RenderedGrid:
        return self.ensure_built().rendered

    @property
    def filled(self) -> FilledGrid:
        return self.ensure_built().filled

    # -- rebuild pipeline ---------------------------------------------------

    def ensure_built(self) -> _BuiltState:
        state = self._state
        if state is not None and not self._source.changed:
            return state
        with self._lock:
            if self._state is None or self._source.changed:
                self.rebuild()
            return self._state

    def rebuild(self) -> None:
        """Run the full rebuild pipeline and swap in the new state.

        Steps, in order: 1 fetch extents, 2 fetch record count, 3-4 fresh
        registry and bins, 5 bin sizes, 6 pre-hook, 7 render records,
        8 shallow-copy to the filled grid, 9 gap fill, 10 post-hook,
        11 clear the source's changed flag.
        """
        source = self._source
        if source.record_count < 1:  # step 2 precondition, checked up front
            raise EmptySourceError("cannot build an index over an empty source")
        extents = source.data_extents.inflated_if_degenerate()  # step 1
        n = source.record_count  # step 2
        shape = GridShape(self.divisions_x, self.divisions_y, extents)  # steps 3-5
        state = _BuiltState(shape)
        self._on_before_rebuild(state)  # step 6
        self._render_records(state, n)  # step 7
        for lst in state.rendered.registry:
            lst.freeze(state.positions)
        filled_bins = list(state.rendered._bins)  # step 8, same identities
        self._fill_gaps(state, filled_bins)  # step 9
        state.filled = FilledGrid(shape, filled_bins)
        self._prepare_border(state)
        self._on_after_rebuilt(state)  # step 10
        self._state = state
        source.changed = False  # step 11

    def _on_before_rebuild(self, state: _BuiltState) -> None:
        """Step 6 hook; the base index has nothing to reset."""

    def _on_after_rebuilt(self, state: _BuiltState) -> None:
        """Step 10 hook; the hierarchical index subdivides here."""

    def _render_records(self, state: _BuiltState, n: int) -> None:
        """Fetch every record once (one scratch object) and render it."""
        source = self._source
        scratch = source.new_scratch()
        positions = np.empty((n, 2), dtype=np.float64)
        rendered = state.rendered
        for rid in range(n):
            rec = source.fetch(rid, scratch)
            positions[rid, 0] = rec.x
            positions[rid, 1] = rec.y
            rendered.render_point(rid, Point2D(rec.x, rec.y))
        state.positions = positions

    def _fill_gaps(self, state: _BuiltState, bins: list) -> None:
        """Point every empty bin at the list holding the record nearest its
        center (ties to the lowest id), via expanding Chebyshev ring search
        over the rendered grid."""
        shape = state.shape
        rendered = state.rendered
        nx, ny = shape.divisions_x, shape.divisions_y
        min_dim = min(shape.bin_width, shape.bin_height)
        max_ring = max(nx, ny)
        for flat, lst in enumerate(bins):
            if lst is not None:
                continue
            c = BinCoord(flat % nx, flat // nx)
            center = bin_center(c, shape)
            cx, cy = center.x, center.y
            best_d2 = math.inf
            best_rid = -1
            best_list = None
            for ring in range(1, max_ring + 1):
                if best_list is not None:
                    reach = (ring - 0.5) * min_dim
                    if reach * reach > best_d2:
                        break
                coords = neighborhood(c, ring, shape)
                if not coords:
                    break
                for nc in coords:
                    cand = rendered.at(nc)
                    if cand is None:
                        continue
                    d2, rid = _list_min(cand, cx, cy)
                    if d2 < best_d2 or (d2 == best_d2 and rid < best_rid):
                        best_d2 = d2
                        best_rid = rid
                        best_list = cand
            bins[flat] = best_list

    def _prepare_border(self, state: _BuiltState) -> None:
        """Border ring coords (row-major) and the flat concatenated scan."""
        shape = state.shape
        nx, ny = shape.divisions_x, shape.divisions_y
        coords = []
        for j in range(ny):
            for i in range(nx):
                if i == 0 or j == 0 or i == nx - 1 or j == ny - 1:
                    coords.append(BinCoord(i, j))
        state.border_coords = coords
        seen: set[int] = set()
        lists = []
        for c in coords:
            lst = state.filled.at(c)
            if id(lst) not in seen:
                seen.add(id(lst))
                lists.append(lst)
        state.border_ids = np.concatenate([lst.ids_arr for lst in lists])
        state.border_xs = np.concatenate([lst.xs for lst in lists])
        state.border_ys = np.concatenate([lst.ys for lst in lists])

    # -- queries ------------------------------------------------------------

    def nearest(self, q: Point2D) -> QueryResult:
        """Nearest indexed record to q; always returns one when non-empty."""
        state = self.ensure_built()
        best = _Best()
        sc = self._search(state, q, best, math.inf)
        return QueryResult(best.rid, math.sqrt(best.d2), best.cost, sc)

    def _search(self, state: _BuiltState, q: Point2D, best: _Best, bound_d2: float) -> bool:
        c = resolve_bin(q, state.shape)
        if c is None:
            self._border_search(state, q, best, bound_d2)
            return False
        return self._inside_search(state, q, c, best, bound_d2)

    def _inside_search(
        self, state: _BuiltState, q: Point2D, c: BinCoord, best: _Best, bound_d2: float
    ) -> bool:
        filled = state.filled
        home = filled.at(c)
        _scan_list(home, q.x, q.y, best)
        boundary = dist_to_bin_boundary(q, c, state.shape)
        if best.d2 < boundary * boundary:
            return True
        seen = {home}
        for nc in neighborhood(c, 1, state.shape):
            lst = filled.at(nc)
            if lst in seen:
                continue
            seen.add(lst)
            self._consult(state, nc, lst, q, best, bound_d2)
        return False

    def _consult(
        self,
        state: _BuiltState,
        coord: BinCoord,
        lst: BinList,
        q: Point2D,
        best: _Best,
        bound_d2: float,
    ) -> None:
        _scan_list(lst, q.x, q.y, best)

    def _border_search(self, state: _BuiltState, q: Point2D, best: _Best, bound_d2: float) -> None:
        """Out-of-extents edge scan: every border-ring list, each once."""
        dx = state.border_xs - q.x
        dy = state.border_ys - q.y
        d2 = dx * dx + dy * dy
        best.cost += len(d2)
        m = float(d2.min())
        rid = int(state.border_ids[d2 == m].min())  # ties: lowest id
        best.offer(m, rid)

    def range_query(self, rect: Extents) -> list[RecordId]:
        """Ids of records inside the closed rectangle, ascending."""
        state = self.ensure_built()
        shape = state.shape
        ext = shape.extents
        if (
            rect.max.x < ext.min.x
            or rect.min.x > ext.max.x
            or rect.max.y < ext.min.y
            or rect.min.y > ext.max.y
        ):
            return []
        nx, ny = shape.divisions_x, shape.divisions_y
        bw, bh = shape.bin_width, shape.bin_height
        i_lo = _clamp(math.floor((rect.min.x - ext.min.x) / bw) - 1, 0, nx - 1)
        i_hi = _clamp(math.floor((rect.max.x - ext.min.x) / bw) + 1, 0, nx - 1)
        j_lo = _clamp(math.floor((rect.min.y - ext.min.y) / bh) - 1, 0, ny - 1)
        j_hi = _clamp(math.floor((rect.max.y - ext.min.y) / bh) + 1, 0, ny - 1)
        rendered = state.rendered
        seen: set[int] = set()
        hits: set[int] = set()
        for j in range(j_lo, j_hi + 1):
            for i in range(i_lo, i_hi + 1):
                lst = rendered.at(BinCoord(i, j))
                if lst is None or id(lst) in seen:
                    continue
                seen.add(id(lst))
                mask = (
                    (lst.xs >= rect.min.x)
                    & (lst.xs <= rect.max.x)
                    & (lst.ys >= rect.min.y)
                    & (lst.ys <= rect.max.y)
                )
                if mask.any():
                    hits.update(int(r) for r in lst.ids_arr[mask])
        return sorted(hits)
