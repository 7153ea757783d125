"""Graph models of a CNF formula (VIG, CVIG, CIG) plus BFS utilities.

Graphs are stored in CSR form with adjacency sorted by neighbor id, so that
degree-tie iteration downstream is canonical. Distances are unweighted hop
counts; edge weights only matter for modularity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cnf import CnfFormula, _var_groups

VARIABLE = "variable"
CLAUSE = "clause"


class Graph:
    """Undirected weighted graph; no self-loops, no parallel edges."""

    __slots__ = ("node_count", "indptr", "indices", "weights", "variable_count")

    def __init__(self, node_count, indptr, indices, weights, variable_count):
        self.node_count = int(node_count)
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        self.variable_count = int(variable_count)

    @classmethod
    def from_edges(cls, node_count: int, u, v, w=None, variable_count=None,
                   weight_mode: str = "sum") -> "Graph":
        """Build from parallel edge arrays.

        Coinciding edges collapse into one; weight_mode 'sum' adds their
        weights, 'unit' sets every retained edge weight to 1. Self-loops are
        rejected.
        """
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if w is None:
            w = np.ones(u.size, dtype=np.float64)
        else:
            w = np.asarray(w, dtype=np.float64)
        if u.size and (u == v).any():
            raise ValueError("self-loops are not allowed")
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        if u.size:
            key = lo * np.int64(node_count) + hi
            # secondary sort on w keeps float summation order canonical
            order = np.lexsort((w, key))
            key = key[order]
            w = w[order]
            boundary = np.empty(key.size, dtype=bool)
            boundary[0] = True
            np.not_equal(key[1:], key[:-1], out=boundary[1:])
            starts = np.nonzero(boundary)[0]
            ukey = key[starts]
            if weight_mode == "unit":
                uw = np.ones(starts.size, dtype=np.float64)
            elif weight_mode == "sum":
                uw = np.add.reduceat(w, starts)
            else:
                raise ValueError(f"unknown weight_mode {weight_mode!r}")
            eu = ukey // node_count
            ev = ukey % node_count
        else:
            eu = np.empty(0, dtype=np.int64)
            ev = np.empty(0, dtype=np.int64)
            uw = np.empty(0, dtype=np.float64)
        src = np.concatenate((eu, ev))
        dst = np.concatenate((ev, eu))
        ww = np.concatenate((uw, uw))
        order = np.lexsort((dst, src))
        src = src[order]
        dst = dst[order]
        ww = ww[order]
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=node_count), out=indptr[1:])
        if variable_count is None:
            variable_count = node_count
        return cls(node_count, indptr, dst, ww, variable_count)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def edge_weights(self, u: int) -> np.ndarray:
        return self.weights[self.indptr[u]:self.indptr[u + 1]]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum()) / 2.0

    def node_kind(self, u: int) -> str:
        return VARIABLE if u < self.variable_count else CLAUSE

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once, as (u, v, w) arrays with u < v."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        mask = src < self.indices
        return src[mask], self.indices[mask], self.weights[mask]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)


# ---------------------------------------------------------------------------
# Builders


def build_vig(f: CnfFormula, weighted: bool = False) -> Graph:
    """Variable incidence graph: one node per variable, edges between
    variables sharing a clause. Weighted mode spreads weight 1 over the
    C(k,2) pairs of each clause with k distinct variables."""
    groups = _var_groups(f)
    us, vs, ws = [], [], []
    for k, (_, V) in sorted(groups.items()):
        if k < 2:
            continue
        wgt = 1.0 / (k * (k - 1) / 2) if weighted else 1.0
        for i in range(k):
            for j in range(i + 1, k):
                a, b = V[:, i], V[:, j]
                us.append(np.minimum(a, b))
                vs.append(np.maximum(a, b))
                ws.append(np.full(a.size, wgt))
    if us:
        u = np.concatenate(us)
        v = np.concatenate(vs)
        w = np.concatenate(ws)
    else:
        u = v = np.empty(0, dtype=np.int64)
        w = np.empty(0, dtype=np.float64)
    mode = "sum" if weighted else "unit"
    return Graph.from_edges(f.num_vars, u, v, w, variable_count=f.num_vars,
                            weight_mode=mode)


def build_cvig(f: CnfFormula, weighted: bool = False) -> Graph:
    """Clause-variable incidence graph: bipartite, variable nodes 0..n-1
    followed by clause nodes n..n+m-1, one edge per occurrence. Weighted mode
    gives each clause's star total weight 1."""
    n, m = f.num_vars, f.num_clauses
    groups = _var_groups(f)
    us, vs, ws = [], [], []
    for k, (cids, V) in sorted(groups.items()):
        if k < 1:
            continue
        us.append(V.ravel())
        vs.append(np.repeat(cids + n, k))
        wgt = 1.0 / k if weighted else 1.0
        ws.append(np.full(V.size, wgt))
    if us:
        u = np.concatenate(us)
        v = np.concatenate(vs)
        w = np.concatenate(ws)
    else:
        u = v = np.empty(0, dtype=np.int64)
        w = np.empty(0, dtype=np.float64)
    mode = "sum" if weighted else "unit"
    return Graph.from_edges(n + m, u, v, w, variable_count=n, weight_mode=mode)


def build_cig(f: CnfFormula) -> Graph:
    """Clause incidence graph: one node per clause, an edge when two clauses
    contain complementary occurrences of some variable. Unweighted."""
    pos: dict[int, list[int]] = {}
    neg: dict[int, list[int]] = {}
    for ci, clause in enumerate(f.clauses):
        for lit in set(clause):
            (pos if lit > 0 else neg).setdefault(abs(lit), []).append(ci)
    us, vs = [], []
    for var, plist in pos.items():
        nlist = neg.get(var)
        if not nlist:
            continue
        p = np.asarray(plist, dtype=np.int64)
        q = np.asarray(nlist, dtype=np.int64)
        uu = np.repeat(p, q.size)
        vv = np.tile(q, p.size)
        keep = uu != vv
        us.append(uu[keep])
        vs.append(vv[keep])
    if us:
        u = np.concatenate(us)
        v = np.concatenate(vs)
    else:
        u = v = np.empty(0, dtype=np.int64)
    return Graph.from_edges(f.num_clauses, u, v, variable_count=0,
                            weight_mode="unit")


# ---------------------------------------------------------------------------
# BFS machinery


def gather_neighbors(g: Graph, frontier: np.ndarray) -> np.ndarray:
    """Concatenated neighbor lists of all frontier nodes (with repeats)."""
    starts = g.indptr[frontier]
    counts = g.indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=g.indices.dtype)
    offsets = np.cumsum(counts) - counts
    idx = np.repeat(starts - offsets, counts) + np.arange(total, dtype=np.int64)
    return g.indices[idx]


def bfs_distances(g: Graph, source: int, radius_cap: int | None = None) -> np.ndarray:
    """Hop distances from source (np.inf when unreachable or beyond the cap)."""
    if source < 0 or source >= g.node_count:
        raise ValueError(f"source {source} out of range")
    dist = np.full(g.node_count, np.inf)
    dist[source] = 0.0
    frontier = np.array([source], dtype=np.int64)
    depth = 0
    while frontier.size:
        if radius_cap is not None and depth >= radius_cap:
            break
        neigh = gather_neighbors(g, frontier)
        if neigh.size == 0:
            break
        fresh = neigh[np.isinf(dist[neigh])]
        if fresh.size == 0:
            break
        frontier = np.unique(fresh)
        depth += 1
        dist[frontier] = depth
    return dist


def connected_components(g: Graph) -> tuple[int, np.ndarray]:
    """(component_count, component id per node), BFS sweep."""
    comp = np.full(g.node_count, -1, dtype=np.int64)
    count = 0
    for start in range(g.node_count):
        if comp[start] != -1:
            continue
        comp[start] = count
        frontier = np.array([start], dtype=np.int64)
        while frontier.size:
            neigh = gather_neighbors(g, frontier)
            if neigh.size == 0:
                break
            fresh = neigh[comp[neigh] == -1]
            if fresh.size == 0:
                break
            frontier = np.unique(fresh)
            comp[frontier] = count
        count += 1
    return count, comp


def eccentricities(g: Graph, max_nodes: int = 5000) -> np.ndarray:
    """Per-node eccentricity within its component (all-pairs BFS; guarded)."""
    if g.node_count > max_nodes:
        raise ValueError(f"graph too large for all-pairs BFS ({g.node_count} nodes)")
    ecc = np.zeros(g.node_count)
    for u in range(g.node_count):
        d = bfs_distances(g, u)
        finite = d[np.isfinite(d)]
        ecc[u] = finite.max() if finite.size else 0.0
    return ecc


@dataclass(frozen=True)
class GraphStats:
    diameter: int
    typical_distance: float
    connected_components: int
    diameter_is_exact: bool


def _double_sweep(g: Graph, start: int) -> int:
    d = bfs_distances(g, start)
    d[np.isinf(d)] = -1.0
    far = int(np.argmax(d))
    d2 = bfs_distances(g, far)
    d2[np.isinf(d2)] = -1.0
    return int(d2.max())


def graph_stats(g: Graph, sample_pairs: int = 1000, seed: int = 42) -> GraphStats:
    """Diameter, typical distance L, component count.

    The diameter is exact (all-pairs BFS) up to 2000 nodes, else a double
    sweep lower bound flagged via diameter_is_exact=False. On disconnected
    graphs the maximum over components is reported. L averages the distance
    of sample_pairs random reachable node pairs, deterministically per seed.
    """
    n = g.node_count
    ncomp, comp = connected_components(g)
    if n <= 2000:
        diameter = int(eccentricities(g).max()) if n else 0
        exact = True
    else:
        diameter = 0
        for c in range(ncomp):
            start = int(np.argmax(comp == c))
            diameter = max(diameter, _double_sweep(g, start))
        exact = False
    rng = np.random.default_rng(seed)
    total = 0.0
    got = 0
    attempts = 0
    max_attempts = max(20 * sample_pairs, 100)
    dist_cache: dict[int, np.ndarray] = {}
    while got < sample_pairs and attempts < max_attempts and n > 1:
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        attempts += 1
        if u == v or comp[u] != comp[v]:
            continue
        if u not in dist_cache:
            if len(dist_cache) > 64:
                dist_cache.clear()
            dist_cache[u] = bfs_distances(g, u)
        total += float(dist_cache[u][v])
        got += 1
    typical = total / got if got else 0.0
    return GraphStats(diameter, typical, ncomp, exact)


def write_edgelist(g: Graph) -> str:
    """One `u v w` line per undirected edge, 0-based node ids."""
    u, v, w = g.edge_arrays()
    return "".join(f"{a} {b} {c:g}\n" for a, b, c in zip(u.tolist(), v.tolist(), w.tolist()))
