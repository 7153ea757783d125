"""Box/circle covering of graphs: greedy burning N(r), exact covers on small
graphs, and the log-log / semilog regressions giving the pseudo-dimension d
and the exponential decay beta.

A circle of radius r around center c is the set of nodes at hop distance
strictly below r, so r=1 covers just the center and N(1) equals the node
count. The greedy pass visits nodes by degree and selects every still-unburned
node as a center, burning its circle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, bfs_distances, connected_components, gather_neighbors

ORDERINGS = ("desc_degree", "asc_degree")


def _node_order(g: Graph, ordering: str) -> np.ndarray:
    ids = np.arange(g.node_count, dtype=np.int64)
    deg = g.degrees
    if ordering == "desc_degree":
        return np.lexsort((ids, -deg))
    if ordering == "asc_degree":
        return np.lexsort((ids, deg))
    raise ValueError(f"unknown ordering {ordering!r} (expected one of {ORDERINGS})")


class _BallScratch:
    """Reusable epoch-stamped visit buffer for repeated truncated BFS."""

    def __init__(self, n: int):
        self.stamp = np.zeros(n, dtype=np.int64)
        self.epoch = 0

    def ball(self, g: Graph, source: int, max_depth: int) -> np.ndarray:
        """Nodes within max_depth hops of source (inclusive)."""
        if max_depth == 0:
            return np.array([source], dtype=np.int64)
        if max_depth == 1:
            return np.concatenate((np.array([source], dtype=np.int64),
                                   g.neighbors(source)))
        self.epoch += 1
        epoch = self.epoch
        stamp = self.stamp
        stamp[source] = epoch
        frontier = np.array([source], dtype=np.int64)
        parts = [frontier]
        for _ in range(max_depth):
            neigh = gather_neighbors(g, frontier)
            if neigh.size == 0:
                break
            fresh = neigh[stamp[neigh] != epoch]
            if fresh.size == 0:
                break
            frontier = np.unique(fresh)
            stamp[frontier] = epoch
            parts.append(frontier)
        return np.concatenate(parts)


def greedy_cover_count(g: Graph, r: int, ordering: str = "desc_degree"
                       ) -> tuple[int, np.ndarray]:
    """Greedy burning estimate of N(r); returns (count, selected centers).

    Nodes are visited by the chosen degree ordering (ascending node id breaks
    ties); an unburned node is selected as a center and its radius-r circle
    burned. The selected circles always cover the whole graph.
    """
    if r < 1:
        raise ValueError("radius must be >= 1")
    order = _node_order(g, ordering)
    if r == 1:
        return g.node_count, order.copy()
    burned = np.zeros(g.node_count, dtype=bool)
    scratch = _BallScratch(g.node_count)
    centers = []
    for u in order.tolist():
        if burned[u]:
            continue
        ball = scratch.ball(g, u, r - 1)
        burned[ball] = True
        centers.append(u)
    return len(centers), np.asarray(centers, dtype=np.int64)


def verify_cover(g: Graph, centers, r: int) -> bool:
    """True when every node lies within hop distance < r of some center."""
    centers = np.unique(np.asarray(centers, dtype=np.int64))
    if centers.size == 0:
        return g.node_count == 0
    covered = np.zeros(g.node_count, dtype=bool)
    covered[centers] = True
    frontier = centers
    for _ in range(r - 1):
        neigh = gather_neighbors(g, frontier)
        if neigh.size == 0:
            break
        fresh = neigh[~covered[neigh]]
        if fresh.size == 0:
            break
        frontier = np.unique(fresh)
        covered[frontier] = True
    return bool(covered.all())


# ---------------------------------------------------------------------------
# Exact covers (exponential search; the general problem is intractable, which
# is why the greedy estimate exists at all).


def _ball_masks(g: Graph, r: int) -> list[int]:
    masks = []
    for c in range(g.node_count):
        d = bfs_distances(g, c, radius_cap=r - 1)
        mask = 0
        for v in np.nonzero(np.isfinite(d))[0]:
            mask |= 1 << int(v)
        masks.append(mask)
    return masks


def exact_cover_count(g: Graph, r: int, max_nodes: int = 20) -> int:
    """Minimum number of radius-r circles covering the graph.

    Exhaustive branch and bound over center subsets: the lowest uncovered
    node must lie in some selected circle, so only circles containing it
    branch. Guarded to small graphs (the problem is NP-hard).
    """
    n = g.node_count
    if n > max_nodes:
        raise ValueError(f"graph too large for exact cover ({n} > {max_nodes} nodes)")
    if r < 1:
        raise ValueError("radius must be >= 1")
    if n == 0:
        return 0
    if r == 1:
        return n
    masks = _ball_masks(g, r)
    full = (1 << n) - 1
    # drop duplicate and dominated circles; a minimum cover never needs a
    # circle strictly contained in another
    balls = sorted(set(masks), key=lambda b: -bin(b).count("1"))
    kept: list[int] = []
    for b in balls:
        if not any(b & ~k == 0 for k in kept):
            kept.append(b)
    balls_at = [[b for b in kept if b >> i & 1] for i in range(n)]
    best = n  # one singleton circle per node always covers

    def search(covered: int, used: int):
        nonlocal best
        if covered == full:
            best = min(best, used)
            return
        if used + 1 >= best:
            return
        low = (~covered & full)
        low = (low & -low).bit_length() - 1
        for b in balls_at[low]:
            search(covered | b, used + 1)

    search(0, 0)
    return best


def _maximal_cliques(adj: list[int], n: int) -> list[int]:
    """Bron-Kerbosch with pivoting on bitmask adjacency."""
    out: list[int] = []

    def bk(r: int, p: int, x: int):
        if p == 0 and x == 0:
            out.append(r)
            return
        pux = p | x
        pivot, best = -1, -1
        t = pux
        while t:
            u = (t & -t).bit_length() - 1
            t &= t - 1
            c = bin(p & adj[u]).count("1")
            if c > best:
                best, pivot = c, u
        cand = p & ~adj[pivot]
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            bit = 1 << v
            bk(r | bit, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit
    bk(0, (1 << n) - 1, 0)
    return out


def exact_box_cover_count(g: Graph, size: int, max_nodes: int = 16) -> int:
    """Minimum number of boxes of the given size covering the graph.

    A box is a node set with all pairwise hop distances < size, i.e. a clique
    of the (size-1)-th power graph. Covers by maximal boxes are enumerated by
    dynamic programming over node subsets.
    """
    n = g.node_count
    if n > max_nodes:
        raise ValueError(f"graph too large for exact box cover ({n} > {max_nodes})")
    if size < 1:
        raise ValueError("box size must be >= 1")
    if n == 0:
        return 0
    if size == 1:
        return n
    # close[i] = bitmask of j != i with dist(i, j) < size
    close = []
    for i in range(n):
        d = bfs_distances(g, i, radius_cap=size - 1)
        mask = 0
        for v in np.nonzero(np.isfinite(d))[0]:
            mask |= 1 << int(v)
        close.append(mask & ~(1 << i))
    maximal = _maximal_cliques(close, n)
    by_low: dict[int, list[int]] = {i: [] for i in range(n)}
    for b in maximal:
        t = b
        while t:
            i = (t & -t).bit_length() - 1
            t &= t - 1
            by_low[i].append(b)
    best = {0: 0}

    def solve(mask: int) -> int:
        if mask in best:
            return best[mask]
        low = (mask & -mask).bit_length() - 1
        res = min(solve(mask & ~b) for b in by_low[low]) + 1
        best[mask] = res
        return res

    return solve((1 << n) - 1)


# ---------------------------------------------------------------------------
# Cover curves and dimension fits


@dataclass(frozen=True)
class CoverCurve:
    """The sequence N(r) for r = 1..len(counts).

    r_max is the smallest radius with N(r) = 1 when the curve reached it.
    counts are floats so synthetic curves can be fitted too.
    """

    counts: np.ndarray
    r_max: int | None = None
    clamped: bool = False

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.float64)
        object.__setattr__(self, "counts", counts)
        if counts.size == 0:
            raise ValueError("empty cover curve")
        if (counts < 1).any():
            raise ValueError("cover counts must be >= 1")
        if self.r_max is not None:
            if counts[self.r_max - 1] != 1 or (counts[:self.r_max - 1] == 1).any():
                raise ValueError("r_max inconsistent with counts")

    @property
    def rs(self) -> np.ndarray:
        return np.arange(1, self.counts.size + 1)

    @property
    def normalized(self) -> np.ndarray:
        """N(r) / N(1)."""
        return self.counts / self.counts[0]

    def __len__(self) -> int:
        return self.counts.size


def cover_curve(g: Graph, r_stop: int | None = None,
                ordering: str = "desc_degree",
                monotone_clamp: bool = False) -> CoverCurve:
    """Greedy N(r) for r = 1, 2, ... until a single circle suffices, the
    curve bottoms out at the component count, or r_stop is reached."""
    counts: list[int] = []
    r_max = None
    ncomp = None
    r = 1
    while True:
        count, _ = greedy_cover_count(g, r, ordering)
        counts.append(count)
        if count == 1:
            r_max = r
            break
        if r_stop is not None and r >= r_stop:
            break
        if len(counts) >= 2 and counts[-1] == counts[-2]:
            if ncomp is None:
                ncomp = connected_components(g)[0]
            if counts[-1] == ncomp:
                break
        if r > g.node_count:
            break
        r += 1
    arr = np.asarray(counts, dtype=np.float64)
    if monotone_clamp:
        arr = np.minimum.accumulate(arr)
        return CoverCurve(arr, r_max, clamped=True)
    return CoverCurve(arr, r_max)


@dataclass(frozen=True)
class DimensionFit:
    """Least-squares fits of a cover curve over a radius window.

    d is the magnitude of the log N vs log r slope (pseudo-dimension), beta
    the magnitude of the log N vs r slope (exponential decay). The intercepts
    are the constants C in N(r) = C * r**-d and N(r) = C * exp(-beta * r).
    residual is the largest absolute log-residual of the power-law fit.
    """

    d: float
    beta: float
    r_range: tuple[int, int]
    residual: float
    intercept_loglog: float
    intercept_semilog: float


def fit_dimension(curve: CoverCurve, r_lo: int = 1, r_hi: int = 5) -> DimensionFit:
    """Fit d and beta on the window r = r_lo..r_hi, truncated at the end of
    the curve. Requires at least two points."""
    hi = min(r_hi, len(curve))
    if hi - r_lo + 1 < 2:
        raise ValueError(
            f"need >= 2 curve points in [{r_lo}, {r_hi}], have {max(hi - r_lo + 1, 0)}")
    rs = np.arange(r_lo, hi + 1, dtype=np.float64)
    ys = np.log(curve.counts[r_lo - 1:hi])
    xs = np.log(rs)
    slope_ll, icpt_ll = np.polyfit(xs, ys, 1)
    slope_sl, icpt_sl = np.polyfit(rs, ys, 1)
    residual = float(np.abs(ys - (icpt_ll + slope_ll * xs)).max())
    return DimensionFit(
        d=float(-slope_ll),
        beta=float(-slope_sl),
        r_range=(r_lo, hi),
        residual=residual,
        intercept_loglog=float(np.exp(icpt_ll)),
        intercept_semilog=float(np.exp(icpt_sl)),
    )


# ---------------------------------------------------------------------------
# Export helpers


def curve_to_csv(curve: CoverCurve, fit: DimensionFit | None = None) -> str:
    lines = ["r,N,N_norm\n"]
    norm = curve.normalized
    for r, n_r, nn in zip(curve.rs.tolist(), curve.counts.tolist(), norm.tolist()):
        n_txt = str(int(n_r)) if float(n_r).is_integer() else repr(float(n_r))
        lines.append(f"{r},{n_txt},{nn!r}\n")
    if fit is not None:
        lines.append(f"d,{fit.d!r}\n")
        lines.append(f"beta,{fit.beta!r}\n")
    return "".join(lines)


def fit_to_dict(fit: DimensionFit) -> dict:
    return {
        "d": fit.d,
        "beta": fit.beta,
        "r_lo": fit.r_range[0],
        "r_hi": fit.r_range[1],
        "residual": fit.residual,
        "intercept_loglog": fit.intercept_loglog,
        "intercept_semilog": fit.intercept_semilog,
    }


def fit_to_csv(fit: DimensionFit) -> str:
    d = fit_to_dict(fit)
    keys = list(d)
    return ",".join(keys) + "\n" + ",".join(repr(d[k]) for k in keys) + "\n"
