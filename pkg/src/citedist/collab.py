"""Windowed co-authorship networks and distances over them.

A network for year ``y`` connects two authors iff they co-authored at
least one paper published in ``[y - window_length + 1, y]``.  Edges are
undirected and unweighted; collaboration multiplicity is ignored.  The
node set contains every author of a window paper, including authors of
single-author papers (degree 0).

Adjacency is a CSR layout over plain ``array`` buffers with sorted
neighbour lists, indexed directly by interned author id, so windows over
million-author corpora stay compact.  Networks are immutable after
construction; queries are read-only.

Hop distances come in three flavours: a finite count, INFINITE (no path,
proven by exhausting the search), or "exceeds cap" when a capped search
stopped while the frontier was still alive.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .corpus import CorpusStore


@dataclass(frozen=True)
class Distance:
    """Result of a shortest-path query.

    ``hops`` is set for finite results.  ``cap`` is set when a capped
    search gave up with the frontier still alive (true distance > cap,
    or no path at all).  Neither set means INFINITE: no path exists.
    """

    hops: int | None = None
    cap: int | None = None

    def __post_init__(self):
        if self.hops is not None and self.cap is not None:
            raise ValueError("a distance is finite or capped, not both")
        if self.hops is not None and self.hops < 0:
            raise ValueError("hop count must be >= 0")

    @classmethod
    def finite(cls, hops: int) -> "Distance":
        return cls(hops=hops)

    @classmethod
    def exceeds(cls, cap: int) -> "Distance":
        return cls(cap=cap)

    @property
    def is_finite(self) -> bool:
        return self.hops is not None

    @property
    def is_infinite(self) -> bool:
        return self.hops is None and self.cap is None

    @property
    def exceeds_cap(self) -> bool:
        return self.cap is not None

    def label(self) -> str:
        if self.is_finite:
            return str(self.hops)
        if self.exceeds_cap:
            return f">{self.cap}"
        return "INF"


INFINITE = Distance()


class CollabNetwork:
    def __init__(self, year: int, window_length: int, num_slots: int,
                 nodes: frozenset[int], indptr: array, indices: array, edge_count: int):
        self.year = year
        self.window_length = window_length
        self.num_slots = num_slots
        self.nodes = nodes
        self.edge_count = edge_count
        self._indptr = indptr
        self._indices = indices

    @classmethod
    def _from_parts(cls, year: int, window_length: int, num_slots: int,
                    nodes: Iterable[int], edges: Iterable[tuple[int, int]]) -> "CollabNetwork":
        adjacency: dict[int, list[int]] = {}
        edge_count = 0
        for a, b in edges:
            adjacency.setdefault(a, []).append(b)
            adjacency.setdefault(b, []).append(a)
            edge_count += 1
        indptr = array("q", [0] * (num_slots + 1))
        flat: list[int] = []
        cursor = 0
        for u in range(num_slots):
            neigh = adjacency.get(u)
            if neigh:
                neigh.sort()
                flat.extend(neigh)
                cursor += len(neigh)
            indptr[u + 1] = cursor
        return cls(year, window_length, num_slots, frozenset(nodes),
                   indptr, array("i", flat), edge_count)

    @classmethod
    def from_edges(cls, nodes: Iterable[int], edges: Iterable[tuple[int, int]],
                   year: int = 0, window_length: int = 1,
                   num_slots: int | None = None) -> "CollabNetwork":
        """Build a network directly from node/edge lists (tests, debugging)."""
        nodes = set(nodes)
        dedup = set()
        for a, b in edges:
            if a == b:
                continue
            dedup.add((a, b) if a < b else (b, a))
            nodes.add(a)
            nodes.add(b)
        if num_slots is None:
            num_slots = max(nodes) + 1 if nodes else 0
        return cls._from_parts(year, window_length, num_slots, nodes, dedup)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def has_node(self, author: int) -> bool:
        return author in self.nodes

    def degree(self, author: int) -> int:
        return self._indptr[author + 1] - self._indptr[author]

    def neighbors(self, author: int) -> list[int]:
        return self._indices[self._indptr[author]:self._indptr[author + 1]].tolist()

    def edges(self) -> Iterator[tuple[int, int]]:
        indptr, indices = self._indptr, self._indices
        for u in range(self.num_slots):
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if u < v:
                    yield u, v

    @property
    def average_degree(self) -> float:
        return 2.0 * self.edge_count / self.node_count if self.node_count else 0.0


def build_window(store: CorpusStore, year: int, window_length: int = 5) -> CollabNetwork:
    """Co-authorship network over papers published in the closed window
    ``[year - window_length + 1, year]`` (truncated at the corpus start)."""
    if window_length < 1:
        raise ValueError("window_length must be >= 1")
    nodes: set[int] = set()
    edges: set[tuple[int, int]] = set()
    for yy in range(year - window_length + 1, year + 1):
        for pid in store.papers_in_year(yy):
            authors = store.paper_authors[pid]
            nodes.update(authors)
            if len(authors) > 1:
                edges.update(combinations(sorted(authors), 2))
    return CollabNetwork._from_parts(year, window_length, store.num_authors, nodes, edges)


class BFSSearcher:
    """Multi-source breadth-first search with reusable stamp buffers.

    One searcher serves many queries on the same network without
    reallocating visit arrays (epoch stamping).  Not thread-safe; create
    one searcher per worker.
    """

    def __init__(self, net: CollabNetwork):
        self.net = net
        self._seen = [0] * net.num_slots
        self._tgt = [0] * net.num_slots
        self._epoch = 0
        self._tgt_epoch = 0

    def set_distance(self, sources: Iterable[int], targets: Iterable[int],
                     cap: int | None = None) -> Distance:
        """Minimum hop distance from any source to any target.

        Expands level by level from the source side; returns on the
        first target reached.  With a cap, at most ``cap`` levels are
        explored: the result is exact when <= cap, EXCEEDS_CAP when the
        frontier was still alive, and INFINITE only when the reachable
        set was provably exhausted.
        """
        net = self.net
        indptr, indices, seen, tgt = net._indptr, net._indices, self._seen, self._tgt
        self._tgt_epoch += 1
        tepoch = self._tgt_epoch
        for t in targets:
            tgt[t] = tepoch
        self._epoch += 1
        epoch = self._epoch
        frontier: list[int] = []
        for s in sources:
            if seen[s] != epoch:
                seen[s] = epoch
                if tgt[s] == tepoch:
                    return Distance.finite(0)
                frontier.append(s)
        level = 0
        while frontier:
            if cap is not None and level >= cap:
                return Distance.exceeds(cap)
            nxt: list[int] = []
            for u in frontier:
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if seen[v] == epoch:
                        continue
                    if tgt[v] == tepoch:
                        return Distance.finite(level + 1)
                    seen[v] = epoch
                    nxt.append(v)
            frontier = nxt
            level += 1
        return INFINITE

    def distances_to(self, sources: Iterable[int], targets: Iterable[int],
                     cap: int | None = None) -> tuple[dict[int, int], bool]:
        """Hop distance from the source set to each reachable target.

        Returns ``(found, exhausted)``.  The search stops once every
        target is found, the cap is hit, or the frontier dies; targets
        missing from ``found`` are unreachable when ``exhausted`` is
        True, otherwise only known to be farther than explored.
        """
        net = self.net
        indptr, indices, seen, tgt = net._indptr, net._indices, self._seen, self._tgt
        self._tgt_epoch += 1
        tepoch = self._tgt_epoch
        remaining = 0
        for t in targets:
            if tgt[t] != tepoch:
                tgt[t] = tepoch
                remaining += 1
        self._epoch += 1
        epoch = self._epoch
        found: dict[int, int] = {}
        frontier: list[int] = []
        for s in sources:
            if seen[s] != epoch:
                seen[s] = epoch
                frontier.append(s)
                if tgt[s] == tepoch:
                    found[s] = 0
                    remaining -= 1
        level = 0
        while frontier and remaining:
            if cap is not None and level >= cap:
                return found, False
            nxt: list[int] = []
            for u in frontier:
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if seen[v] == epoch:
                        continue
                    seen[v] = epoch
                    nxt.append(v)
                    if tgt[v] == tepoch:
                        found[v] = level + 1
                        remaining -= 1
            frontier = nxt
            level += 1
        return found, not frontier


def shortest_distance(net: CollabNetwork, source_set: Iterable[int],
                      target_set: Iterable[int], cap: int | None = None) -> Distance:
    """Minimum collaboration distance between two author sets.

    0 when the sets share an author (an author is at distance 0 from
    themself, network membership notwithstanding); authors absent from
    the window behave as isolated nodes.
    """
    sources = set(source_set)
    targets = set(target_set)
    if not sources or not targets:
        raise ValueError("author sets must be non-empty")
    for a in sources | targets:
        if not (0 <= a < net.num_slots):
            raise ValueError(f"author id {a} outside the network's id space")
    if sources & targets:
        return Distance.finite(0)
    if len(targets) < len(sources):  # expand from the smaller side
        sources, targets = targets, sources
    return BFSSearcher(net).set_distance(sources, targets, cap)


# -- network statistics ----------------------------------------------------


def assortativity(net: CollabNetwork) -> float | None:
    """Pearson correlation of remaining degrees across edge endpoints.

    Computed over both orientations of every edge with integer sums, so
    the zero-variance case is detected exactly and reported as None
    (UNDEFINED) rather than dividing by zero.
    """
    if net.edge_count == 0:
        raise ValueError("assortativity needs at least one edge")
    sum_xy = 0
    sum_x = 0
    sum_x2 = 0
    for u, v in net.edges():
        x = net.degree(u) - 1
        y = net.degree(v) - 1
        sum_xy += x * y
        sum_x += x + y
        sum_x2 += x * x + y * y
    m = 2 * net.edge_count
    num = m * 2 * sum_xy - sum_x * sum_x
    den = m * sum_x2 - sum_x * sum_x
    if den == 0:
        return None
    return num / den


def avg_clustering(net: CollabNetwork) -> float:
    """Mean over all nodes of (triangles through the node) / (pairs of
    neighbours); nodes of degree < 2 contribute 0."""
    if net.node_count == 0:
        raise ValueError("clustering needs at least one node")
    neighbor_sets: dict[int, set[int]] = {}
    total = 0.0
    for u in net.nodes:
        l = net.degree(u)
        if l < 2:
            continue
        su = neighbor_sets.get(u)
        if su is None:
            su = neighbor_sets[u] = set(net.neighbors(u))
        closed2 = 0  # twice the number of edges among u's neighbours
        for v in su:
            sv = neighbor_sets.get(v)
            if sv is None:
                sv = neighbor_sets[v] = set(net.neighbors(v))
            closed2 += len(su & sv)
        total += closed2 / (l * (l - 1))
    return total / net.node_count


@dataclass(frozen=True)
class ComponentStats:
    members: frozenset[int]
    node_count: int
    edge_count: int
    node_pct: float
    edge_pct: float


def connected_components(net: CollabNetwork) -> list[ComponentStats]:
    """Components sorted by node count descending, ties broken by the
    smallest contained author id."""
    indptr, indices = net._indptr, net._indices
    seen: set[int] = set()
    raw: list[tuple[list[int], int]] = []
    for start in sorted(net.nodes):
        if start in seen:
            continue
        members = [start]
        seen.add(start)
        stack = [start]
        degree_sum = 0
        while stack:
            u = stack.pop()
            degree_sum += indptr[u + 1] - indptr[u]
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if v not in seen:
                    seen.add(v)
                    members.append(v)
                    stack.append(v)
        raw.append((members, degree_sum // 2))
    raw.sort(key=lambda item: (-len(item[0]), min(item[0])))
    total_nodes = net.node_count
    total_edges = net.edge_count
    out = []
    for members, edge_count in raw:
        out.append(
            ComponentStats(
                members=frozenset(members),
                node_count=len(members),
                edge_count=edge_count,
                node_pct=100.0 * len(members) / total_nodes if total_nodes else 0.0,
                edge_pct=100.0 * edge_count / total_edges if total_edges else 0.0,
            )
        )
    return out


def diameter(net: CollabNetwork, members: Iterable[int]) -> int:
    """Longest shortest path within one component (quadratic; desk scale)."""
    indptr, indices = net._indptr, net._indices
    members = list(members)
    best = 0
    for source in members:
        depth = {source: 0}
        frontier = [source]
        level = 0
        while frontier:
            nxt = []
            for u in frontier:
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if v not in depth:
                        depth[v] = level + 1
                        nxt.append(v)
            frontier = nxt
            level += 1
        if depth:
            best = max(best, max(depth.values()))
    return best


@dataclass(frozen=True)
class NetworkStats:
    node_count: int
    edge_count: int
    average_degree: float
    assortativity: float | None
    avg_clustering: float | None
    first_component: ComponentStats | None
    second_component: ComponentStats | None
    diameter: int | None

    CSV_HEADER = (
        "year,nodes,edges,avg_degree,assortativity,avg_clustering,"
        "c1_nodes,c1_nodes_pct,c1_edges,c1_edges_pct,"
        "c2_nodes,c2_nodes_pct,c2_edges,c2_edges_pct,diameter"
    )

    def csv_row(self, year: int | str = "") -> str:
        def num(x, fmt="{:.4f}"):
            return "" if x is None else (fmt.format(x) if isinstance(x, float) else str(x))

        def comp(c: ComponentStats | None):
            if c is None:
                return ["", "", "", ""]
            return [
                str(c.node_count),
                f"{c.node_pct:.2f}",
                str(c.edge_count),
                f"{c.edge_pct:.2f}",
            ]

        cells = [
            str(year),
            str(self.node_count),
            str(self.edge_count),
            f"{self.average_degree:.4f}",
            num(self.assortativity),
            num(self.avg_clustering),
            *comp(self.first_component),
            *comp(self.second_component),
            num(self.diameter),
        ]
        return ",".join(cells)


def network_report(net: CollabNetwork, with_diameter: bool = False) -> NetworkStats:
    """Assemble the summary statistics row for one window network.

    Undefined assortativity propagates as None.  The diameter of the
    largest component is opt-in: it is quadratic in component size.
    """
    comps = connected_components(net)
    r = assortativity(net) if net.edge_count else None
    cbar = avg_clustering(net) if net.node_count else None
    diam = None
    if with_diameter and comps:
        diam = diameter(net, comps[0].members)
    return NetworkStats(
        node_count=net.node_count,
        edge_count=net.edge_count,
        average_degree=net.average_degree,
        assortativity=r,
        avg_clustering=cbar,
        first_component=comps[0] if comps else None,
        second_component=comps[1] if len(comps) > 1 else None,
        diameter=diam,
    )
