"""The evolving undirected network of experts.

Nodes carry per-expert error statistics; topology evolves by error-
adapted preferential attachment and by removal with rewiring. New nodes
attach to existing nodes with probability proportional to how much each
node's error deviates from the others':

    raw_k = (1 / sum_j phi_j) * sum_i |phi_i - phi_k|

renormalized into a distribution (uniform when degenerate). Removal may
split the graph; every orphaned component is then reconnected to the
largest surviving component by a single new edge, keeping the network
one component at all times.

Vote weights come from one of five centrality metrics computed on the
current topology: degree, closeness, betweenness, eigenvector, and
pagerank. Graphs here are tiny (the ensemble caps size around ten), so
every metric is recomputed from scratch at each topology change.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

CENTRALITY_METRICS = ("degree", "closeness", "betweenness", "eigenvector", "pagerank")

_RESYNC_EVERY = 4096  # exact error-window resummation cadence


def node_rmse(errors) -> float:
    """Root mean squared error over a node's recorded absolute errors.

    Defined as 0 for an empty window (a fresh node has no record yet).
    """
    errors = list(errors)
    if not errors:
        return 0.0
    return math.sqrt(math.fsum(e * e for e in errors) / len(errors))


def attach_probabilities(phis) -> np.ndarray:
    """Attachment distribution from node errors.

    Each node's raw weight is the total absolute deviation of its error
    from every node's error, scaled by the error total, then the raw
    vector is normalized to sum to one. All-equal errors (including the
    all-zero fresh start) fall back to the uniform distribution.
    """
    phis = np.asarray(list(phis), dtype=float)
    if phis.size == 0:
        raise ValueError("need at least one node")
    if (phis < 0).any():
        raise ValueError("node errors must be non-negative")
    n = phis.size
    total = float(phis.sum())
    if total == 0.0:
        return np.full(n, 1.0 / n)
    raw = np.abs(phis[:, None] - phis[None, :]).sum(axis=0) / total
    raw_sum = float(raw.sum())
    if raw_sum == 0.0:
        return np.full(n, 1.0 / n)
    return raw / raw_sum


def degree_attach_probabilities(degrees) -> np.ndarray:
    """Classic degree-proportional attachment distribution.

    All-zero degrees (an edgeless seed) give the uniform distribution.
    """
    degrees = np.asarray(list(degrees), dtype=float)
    if degrees.size == 0:
        raise ValueError("need at least one node")
    if (degrees < 0).any():
        raise ValueError("degrees must be non-negative")
    total = float(degrees.sum())
    if total == 0.0:
        return np.full(degrees.size, 1.0 / degrees.size)
    return degrees / total


def weighted_sample_without_replacement(probs, k: int, rng: np.random.Generator) -> list[int]:
    """Draw ``k`` distinct indices, sequentially, weighted by ``probs``.

    After each pick the picked entry is excluded and the rest
    renormalized. If all remaining weight is zero, picks fall back to
    uniform over the remaining indices.
    """
    p = np.asarray(probs, dtype=float)
    if k > p.size:
        raise ValueError(f"cannot draw {k} distinct indices from {p.size}")
    available = np.ones(p.size, dtype=bool)
    picks: list[int] = []
    for _ in range(k):
        weights = np.where(available, p, 0.0)
        cum = np.cumsum(weights)
        if cum[-1] > 0.0:
            r = rng.random() * cum[-1]
            idx = int(np.searchsorted(cum, r, side="right"))
            idx = min(idx, p.size - 1)
        else:
            open_idx = np.flatnonzero(available)
            idx = int(open_idx[rng.integers(open_idx.size)])
        picks.append(idx)
        available[idx] = False
    return picks


class NodeStats:
    """Error bookkeeping for one expert node."""

    __slots__ = ("error_window", "zeta", "born_at", "_sumsq", "_since_resync")

    def __init__(self, window_len: int, born_at: int = 0):
        self.error_window: deque[float] = deque(maxlen=window_len)
        self.zeta = 1.0
        self.born_at = born_at
        self._sumsq = 0.0
        self._since_resync = 0

    def record_error(self, error: float) -> None:
        error = abs(float(error))
        if len(self.error_window) == self.error_window.maxlen:
            evicted = self.error_window[0]
            self._sumsq -= evicted * evicted
        self.error_window.append(error)
        self._sumsq += error * error
        self._since_resync += 1
        if self._since_resync >= _RESYNC_EVERY:
            # periodic exact resummation keeps incremental float drift
            # from ever accumulating past tolerance
            self._sumsq = math.fsum(e * e for e in self.error_window)
            self._since_resync = 0

    @property
    def phi(self) -> float:
        if not self.error_window:
            return 0.0
        return math.sqrt(max(self._sumsq, 0.0) / len(self.error_window))


class ExpertNetwork:
    """Undirected, always-connected graph of expert nodes.

    Parameters
    ----------
    k_max : int
        Target maximum node count (enforced by the ensemble's
        remove-then-add cycle; the graph itself only tracks it).
    m_a : int
        Edges a new node brings, clamped to the current size.
    error_window_len : int
        Length of each node's error window.
    """

    def __init__(self, k_max: int = 10, m_a: int = 2, error_window_len: int = 1000):
        if k_max < 1 or m_a < 1 or error_window_len < 1:
            raise ValueError("k_max, m_a and error_window_len must be positive")
        self.k_max = k_max
        self.m_a = m_a
        self.error_window_len = error_window_len
        self.nodes: dict[int, NodeStats] = {}
        self.adj: dict[int, set[int]] = {}

    @classmethod
    def from_edges(cls, node_ids, edges, k_max: int = 10, m_a: int = 2,
                   error_window_len: int = 1000) -> "ExpertNetwork":
        """Build a network with a fixed topology (e.g. a reloaded snapshot)."""
        net = cls(k_max=k_max, m_a=m_a, error_window_len=error_window_len)
        for v in node_ids:
            if v in net.nodes:
                raise ValueError(f"duplicate node {v}")
            net.nodes[v] = NodeStats(error_window_len)
            net.adj[v] = set()
        for u, v in edges:
            if u == v or u not in net.nodes or v not in net.nodes:
                raise ValueError(f"bad edge ({u}, {v})")
            net._add_edge(u, v)
        net._assert_connected("from_edges")
        return net

    def __len__(self) -> int:
        return len(self.nodes)

    def node_ids(self) -> list[int]:
        return sorted(self.nodes)

    def degree(self, node_id: int) -> int:
        return len(self.adj[node_id])

    def edges(self) -> list[tuple[int, int]]:
        return sorted((min(u, v), max(u, v)) for u in self.adj for v in self.adj[u] if u < v)

    def add_node(self, node_id: int, rng: np.random.Generator, born_at: int = 0,
                 attach: str = "error") -> None:
        """Add a node, wiring it to min(m_a, existing) sampled targets.

        ``attach`` selects the sampling weights: "error" uses the
        error-deviation law over current node errors, "degree" uses
        degree-proportional attachment. The very first node is the seed
        and gets no edges.
        """
        if node_id in self.nodes:
            raise ValueError(f"node {node_id} already present")
        if attach not in ("error", "degree"):
            raise ValueError(f"unknown attachment mode {attach!r}")
        existing = sorted(self.nodes)
        self.nodes[node_id] = NodeStats(self.error_window_len, born_at=born_at)
        self.adj[node_id] = set()
        if existing:
            if attach == "error":
                probs = attach_probabilities([self.nodes[i].phi for i in existing])
            else:
                probs = degree_attach_probabilities([len(self.adj[i]) for i in existing])
            m = min(self.m_a, len(existing))
            for pick in weighted_sample_without_replacement(probs, m, rng):
                self._add_edge(node_id, existing[pick])
        self._assert_connected("add_node")

    def remove_node(self, victim_id: int, rng: np.random.Generator) -> None:
        """Remove a node and rewire any components it held together.

        Each non-largest component (largest by size, ties to the one
        holding the smallest node id) contributes one uniformly chosen
        node, which is linked to a node of the largest component drawn
        by the error-deviation attachment law.
        """
        if victim_id not in self.nodes:
            raise KeyError(f"node {victim_id} not in network")
        if len(self.nodes) < 2:
            raise ValueError("cannot remove the last node")
        for u in self.adj.pop(victim_id):
            self.adj[u].discard(victim_id)
        del self.nodes[victim_id]
        comps = self._components()
        if len(comps) > 1:
            comps.sort(key=lambda c: (-len(c), c[0]))
            largest = comps[0]
            largest_phis = [self.nodes[i].phi for i in largest]
            for comp in comps[1:]:
                orphan = comp[int(rng.integers(len(comp)))]
                probs = attach_probabilities(largest_phis)
                pick = weighted_sample_without_replacement(probs, 1, rng)[0]
                self._add_edge(orphan, largest[pick])
        self._assert_connected("remove_node")

    def worst_node(self) -> int:
        """Node id with the highest error, lowest id winning ties."""
        if not self.nodes:
            raise ValueError("empty network")
        best_id = None
        best_phi = -1.0
        for v in sorted(self.nodes):
            p = self.nodes[v].phi
            if p > best_phi:
                best_id, best_phi = v, p
        return best_id

    def is_connected(self) -> bool:
        """True when one breadth-first sweep reaches every node."""
        if len(self.nodes) <= 1:
            return True
        start = next(iter(self.nodes))
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in self.adj[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == len(self.nodes)

    def centrality(self, metric: str) -> dict[int, float]:
        """Per-node centrality under the chosen metric.

        Any metric on a single node is defined as {node: 1.0}.
        """
        if metric not in CENTRALITY_METRICS:
            raise ValueError(f"unknown metric {metric!r}; choose from {CENTRALITY_METRICS}")
        if not self.nodes:
            raise ValueError("empty network")
        if not self.is_connected():
            raise ValueError("centrality requires a connected network")
        ids = sorted(self.nodes)
        if len(ids) == 1:
            return {ids[0]: 1.0}
        if metric == "degree":
            return {v: float(len(self.adj[v])) for v in ids}
        if metric == "closeness":
            return self._closeness(ids)
        if metric == "betweenness":
            return self._betweenness(ids)
        if metric == "eigenvector":
            return self._eigenvector(ids)
        return self._pagerank(ids)

    def dump_edge_list(self, path) -> None:
        """Write the topology as one "u v" pair per line."""
        with open(path, "w", encoding="utf-8") as fh:
            for u, v in self.edges():
                fh.write(f"{u} {v}\n")

    def dump_node_table(self, path) -> None:
        """Write "id,phi,zeta,degree" rows for offline inspection."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("id,phi,zeta,degree\n")
            for v in self.node_ids():
                st = self.nodes[v]
                fh.write(f"{v},{st.phi!r},{st.zeta!r},{len(self.adj[v])}\n")

    # -- internals ----------------------------------------------------

    def _add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError("self-loops are not allowed")
        self.adj[u].add(v)
        self.adj[v].add(u)

    def _assert_connected(self, op: str) -> None:
        if not self.is_connected():
            raise RuntimeError(f"network disconnected after {op}")

    def _components(self) -> list[list[int]]:
        remaining = set(self.nodes)
        comps: list[list[int]] = []
        while remaining:
            start = min(remaining)
            seen = {start}
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for u in self.adj[v]:
                    if u not in seen:
                        seen.add(u)
                        queue.append(u)
            comps.append(sorted(seen))
            remaining -= seen
        return comps

    def _bfs_distances(self, source: int) -> dict[int, int]:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for u in self.adj[v]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        return dist

    def _closeness(self, ids: list[int]) -> dict[int, float]:
        n = len(ids)
        out = {}
        for v in ids:
            total = sum(self._bfs_distances(v).values())
            out[v] = (n - 1) / total
        return out

    def _betweenness(self, ids: list[int]) -> dict[int, float]:
        n = len(ids)
        if n < 3:
            return {v: 0.0 for v in ids}
        accum = dict.fromkeys(ids, 0.0)
        for s in ids:
            # Brandes: BFS counting shortest paths, then dependency
            # accumulation in reverse finish order.
            stack: list[int] = []
            preds: dict[int, list[int]] = {v: [] for v in ids}
            sigma = dict.fromkeys(ids, 0.0)
            sigma[s] = 1.0
            dist = dict.fromkeys(ids, -1)
            dist[s] = 0
            queue = deque([s])
            while queue:
                v = queue.popleft()
                stack.append(v)
                for w in self.adj[v]:
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        queue.append(w)
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
                        preds[w].append(v)
            delta = dict.fromkeys(ids, 0.0)
            while stack:
                w = stack.pop()
                for v in preds[w]:
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
                if w != s:
                    accum[w] += delta[w]
        # accumulation visits each unordered pair from both endpoints;
        # halve, then scale by the pair count (n-1)(n-2)/2
        scale = 1.0 / ((n - 1) * (n - 2))
        return {v: accum[v] * scale for v in ids}

    def _eigenvector(self, ids: list[int]) -> dict[int, float]:
        n = len(ids)
        pos = {v: i for i, v in enumerate(ids)}
        a = np.zeros((n, n))
        for v in ids:
            for u in self.adj[v]:
                a[pos[v], pos[u]] = 1.0
        vec = np.full(n, 1.0 / math.sqrt(n))
        for _ in range(1000):
            # iterate on A + I: identical principal eigenvector, but the
            # shift keeps the iteration from oscillating on bipartite
            # topologies (stars, paths) where A alone never settles
            nxt = a @ vec + vec
            nxt /= np.linalg.norm(nxt)
            if float(np.max(np.abs(nxt - vec))) < 1e-10:
                vec = nxt
                break
            vec = nxt
        vec = np.abs(vec)
        return {v: float(vec[pos[v]]) for v in ids}

    def _pagerank(self, ids: list[int], damping: float = 0.85) -> dict[int, float]:
        n = len(ids)
        pos = {v: i for i, v in enumerate(ids)}
        neighbors = [np.fromiter((pos[u] for u in sorted(self.adj[v])), dtype=int) for v in ids]
        degrees = np.array([len(self.adj[v]) for v in ids], dtype=float)
        ranks = np.full(n, 1.0 / n)
        base = (1.0 - damping) / n
        for _ in range(1000):
            nxt = np.full(n, base)
            share = damping * ranks / degrees
            for i, nbrs in enumerate(neighbors):
                nxt[nbrs] += share[i]
            if float(np.abs(nxt - ranks).sum()) < 1e-10:
                ranks = nxt
                break
            ranks = nxt
        return {v: float(ranks[pos[v]]) for v in ids}
