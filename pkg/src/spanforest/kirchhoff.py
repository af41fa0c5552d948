"""Exact spanning-structure counting and edge inclusion probabilities.

Tree and rooted-forest counts come from Laplacian determinants: an exact
integer path (fraction-free Bareiss elimination over Python ints) for graphs
up to :data:`EXACT_VERTEX_CAP` vertices and a floating log-determinant path
above it.  Edge marginals come from effective resistances via a reduced
Laplacian solve.  A brute-force forest enumerator provides the independent
oracle that the determinant paths are tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, ValidationError
from .graphs import Forest, Graph, contract

#: Switch from exact integer determinants to floating log-determinants here.
EXACT_VERTEX_CAP = 64

#: Dense linear algebra below this many vertices, sparse above.
DENSE_VERTEX_CAP = 2048

#: enumerate_forests refuses graphs with more edges than this.
ENUMERATION_EDGE_CAP = 28


@dataclass(frozen=True)
class LogCount:
    """A count reported in the log domain, exact when small enough.

    ``value`` is log(count); ``exact_count`` is the arbitrary-precision
    integer when the exact path ran.  A zero count carries value -inf.
    """

    value: float
    exact_count: int | None = None

    def __post_init__(self):
        if self.exact_count is not None:
            if self.exact_count == 0:
                if self.value != float("-inf"):
                    raise ValidationError("zero count must carry -inf log")
            elif abs(self.value - _log_int(self.exact_count)) > 1e-9:
                raise ValidationError("log value inconsistent with exact count")

    @property
    def is_zero(self) -> bool:
        return self.value == float("-inf")


def _log_int(n: int) -> float:
    """log(n) for arbitrary-precision positive ints without overflow."""
    if n <= 0:
        return float("-inf")
    if n.bit_length() <= 900:
        return math.log(n)
    shift = n.bit_length() - 900
    return math.log(n >> shift) + shift * math.log(2)


@dataclass(frozen=True)
class MarginalTable:
    """Exact edge inclusion probabilities under the uniform spanning tree law."""

    host: Graph
    probs: dict

    def __post_init__(self):
        total = sum(self.probs.values())
        expect = self.host.n - 1
        if abs(total - expect) > 1e-9:
            raise ValidationError(
                f"marginals sum to {total!r}, expected |V|-1 = {expect}"
            )
        for eid, p in self.probs.items():
            if not -1e-12 <= p <= 1 + 1e-12:
                raise ValidationError(f"marginal for edge {eid} outside [0,1]: {p}")


# -- Laplacian determinants -----------------------------------------------------


def _laplacian_minor_int(g: Graph, removed: set) -> list[list[int]]:
    keep = [v for v in range(g.n) if v not in removed]
    idx = {v: i for i, v in enumerate(keep)}
    k = len(keep)
    L = [[0] * k for _ in range(k)]
    for u, v in g.edges:
        if u == v:
            continue  # self-loops never enter trees
        iu, iv = idx.get(u), idx.get(v)
        if iu is not None:
            L[iu][iu] += 1
        if iv is not None:
            L[iv][iv] += 1
        if iu is not None and iv is not None:
            L[iu][iv] -= 1
            L[iv][iu] -= 1
    return L


def _det_bareiss(L: list[list[int]]) -> int:
    """Exact determinant by fraction-free elimination with row pivoting."""
    a = [row[:] for row in L]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            row_i, row_k = a[i], a[k]
            factor = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def _logdet_minor_float(g: Graph, removed: set) -> float:
    """log det of the Laplacian minor; -inf when singular (disconnected)."""
    keep = [v for v in range(g.n) if v not in removed]
    k = len(keep)
    if k == 0:
        return 0.0
    idx = {v: i for i, v in enumerate(keep)}
    if k <= DENSE_VERTEX_CAP:
        L = np.zeros((k, k))
        for u, v in g.edges:
            if u == v:
                continue
            iu, iv = idx.get(u), idx.get(v)
            if iu is not None:
                L[iu, iu] += 1
            if iv is not None:
                L[iv, iv] += 1
            if iu is not None and iv is not None:
                L[iu, iv] -= 1
                L[iv, iu] -= 1
        sign, logdet = np.linalg.slogdet(L)
        return logdet if sign > 0 else float("-inf")
    rows, cols, vals = [], [], []
    diag = np.zeros(k)
    for u, v in g.edges:
        if u == v:
            continue
        iu, iv = idx.get(u), idx.get(v)
        if iu is not None:
            diag[iu] += 1
        if iv is not None:
            diag[iv] += 1
        if iu is not None and iv is not None:
            rows.extend((iu, iv))
            cols.extend((iv, iu))
            vals.extend((-1.0, -1.0))
    rows.extend(range(k))
    cols.extend(range(k))
    vals.extend(diag)
    L = sp.csc_matrix((vals, (rows, cols)), shape=(k, k))
    try:
        lu = spla.splu(L)
    except RuntimeError:
        return float("-inf")
    u_diag = lu.U.diagonal()
    if np.any(u_diag == 0):
        return float("-inf")
    return float(np.sum(np.log(np.abs(u_diag))))


def _minor_count(g: Graph, removed: set) -> LogCount:
    if g.n <= EXACT_VERTEX_CAP:
        count = _det_bareiss(_laplacian_minor_int(g, removed))
        if count < 0:
            raise ValidationError("negative determinant from a Laplacian minor")
        return LogCount(value=_log_int(count), exact_count=count)
    return LogCount(value=_logdet_minor_float(g, removed))


def count_spanning_trees(g: Graph) -> LogCount:
    """Number of spanning trees (any Laplacian cofactor); 0 if disconnected."""
    if g.n == 0:
        raise ValidationError("empty graph has no spanning tree count")
    if g.n == 1:
        return LogCount(value=0.0, exact_count=1)
    if not g.is_connected:
        return LogCount(value=float("-inf"), exact_count=0 if g.n <= EXACT_VERTEX_CAP else None)
    return _minor_count(g, {g.n - 1})


def count_rooted_forests(g: Graph, roots) -> LogCount:
    """Spanning forests with exactly one root per component.

    Computed as the principal Laplacian minor with the root rows and columns
    removed, and cross-checked against the spanning-tree count of the quotient
    in which the roots are joined into a single vertex.
    """
    roots = set(int(r) for r in roots)
    if not roots:
        raise ValidationError("roots must be nonempty")
    if any(not 0 <= r < g.n for r in roots):
        raise ValidationError("root out of range")
    minor = _minor_count(g, roots)
    quotient = contract(g, [sorted(roots)]).graph if len(roots) > 1 else None
    via_quotient = count_spanning_trees(quotient) if quotient is not None else count_spanning_trees(g)
    _check_agreement(minor, via_quotient)
    return minor


def _check_agreement(a: LogCount, b: LogCount):
    if a.exact_count is not None and b.exact_count is not None:
        if a.exact_count != b.exact_count:
            raise ValidationError(
                f"count cross-check failed: {a.exact_count} != {b.exact_count}"
            )
        return
    if a.is_zero and b.is_zero:
        return
    if abs(a.value - b.value) > 1e-6 * max(1.0, abs(a.value)):
        raise ValidationError(f"count cross-check failed: {a.value} vs {b.value}")


# -- edge marginals ----------------------------------------------------------------


def _reduced_laplacian_solver(g: Graph):
    """Factorized solve of L with the last vertex grounded."""
    k = g.n - 1
    if k <= DENSE_VERTEX_CAP:
        L = np.zeros((k, k))
        for u, v in g.edges:
            if u == v:
                continue
            if u < k:
                L[u, u] += 1
            if v < k:
                L[v, v] += 1
            if u < k and v < k:
                L[u, v] -= 1
                L[v, u] -= 1
        lu = sla.lu_factor(L)
        return lambda b: sla.lu_solve(lu, b)
    diag = np.zeros(k)
    rows, cols, vals = [], [], []
    for u, v in g.edges:
        if u == v:
            continue
        if u < k:
            diag[u] += 1
        if v < k:
            diag[v] += 1
        if u < k and v < k:
            rows.extend((u, v))
            cols.extend((v, u))
            vals.extend((-1.0, -1.0))
    rows.extend(range(k))
    cols.extend(range(k))
    vals.extend(diag)
    L = sp.csc_matrix((vals, (rows, cols)), shape=(k, k))
    lu = spla.splu(L)
    return lu.solve


def edge_marginal(g: Graph, eid: int) -> float:
    """P(edge in T) under the uniform spanning tree law of g.

    Equals the effective resistance between the edge's endpoints at unit
    conductances; parallel edges each get the same probability, self-loops 0.
    """
    if not g.is_connected:
        raise ValidationError("edge marginals need a connected graph")
    if not 0 <= eid < len(g.edges):
        raise ValidationError(f"unknown edge id {eid}")
    u, v = g.edges[eid]
    if u == v:
        return 0.0
    return _effective_resistance(g, _reduced_laplacian_solver(g), u, v)


def _effective_resistance(g: Graph, solve, u: int, v: int) -> float:
    k = g.n - 1
    b = np.zeros(k)
    if u < k:
        b[u] += 1.0
    if v < k:
        b[v] -= 1.0
    x = solve(b)
    xu = x[u] if u < k else 0.0
    xv = x[v] if v < k else 0.0
    return float(xu - xv)


def edge_marginals(g: Graph) -> MarginalTable:
    """Marginal table for every edge, sharing one factorization."""
    if not g.is_connected:
        raise ValidationError("edge marginals need a connected graph")
    solve = _reduced_laplacian_solver(g)
    probs = {}
    for eid, (u, v) in enumerate(g.edges):
        probs[eid] = 0.0 if u == v else _effective_resistance(g, solve, u, v)
    return MarginalTable(host=g, probs=probs)


def deletion_contraction_marginal(g: Graph, eid: int) -> float:
    """Oracle marginal: trees containing e over all trees, both by counting."""
    u, v = g.edges[eid]
    if u == v:
        return 0.0
    total = count_spanning_trees(g)
    if total.is_zero:
        raise ValidationError("no spanning trees")
    shrunk = contract(g, [{u, v}]).graph
    containing = count_spanning_trees(shrunk)
    if total.exact_count is not None and containing.exact_count is not None:
        return containing.exact_count / total.exact_count
    return math.exp(containing.value - total.value)


# -- brute-force enumeration ----------------------------------------------------


def enumerate_forests(g: Graph, constraint: str = "all-trees", roots=None) -> list[Forest]:
    """Exhaustive list of acyclic edge subsets meeting a support constraint.

    constraint:
      * ``all-trees``: connected and spanning (spanning trees).
      * ``rooted-exactly-one``: each component contains exactly one of
        ``roots``.
      * ``boundary-at-least-one``: each component (isolated vertices
        included) contains at least one boundary vertex.

    Results are ordered by ascending edge bit-mask.  The recursion walks only
    acyclic subsets, so runtime scales with the forest count, not 2^edges.
    """
    m = len(g.edges)
    if m > ENUMERATION_EDGE_CAP:
        raise CapacityError(f"{m} edges exceeds the enumeration cap of {ENUMERATION_EDGE_CAP}")
    if constraint == "rooted-exactly-one":
        if not roots:
            raise ValidationError("rooted-exactly-one needs roots")
        roots = frozenset(int(r) for r in roots)
    elif constraint == "boundary-at-least-one":
        if not g.boundary:
            raise ValidationError("boundary-at-least-one needs a nonempty boundary")
    elif constraint != "all-trees":
        raise ValidationError(f"unknown constraint {constraint!r}")

    real_edges = [(eid, u, v) for eid, (u, v) in enumerate(g.edges) if u != v]
    found: list[tuple[int, tuple]] = []

    # Rollback union-find: no path compression, union by size, undo by
    # unlinking the recorded child root.  Compression would survive the undo
    # and corrupt the structure.
    parent = list(range(g.n))
    size = [1] * g.n

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def admissible():
        comp: dict[int, list[int]] = {}
        for v in range(g.n):
            comp.setdefault(find(v), []).append(v)
        if constraint == "all-trees":
            return len(comp) == 1
        if constraint == "rooted-exactly-one":
            return all(sum(v in roots for v in vs) == 1 for vs in comp.values())
        return all(any(v in g.boundary for v in vs) for vs in comp.values())

    chosen: list[int] = []

    def rec(i):
        if i == len(real_edges):
            if admissible():
                mask = 0
                for e in chosen:
                    mask |= 1 << e
                found.append((mask, tuple(chosen)))
            return
        rec(i + 1)
        eid, u, v = real_edges[i]
        ru, rv = find(u), find(v)
        if ru != rv:
            if size[ru] > size[rv]:
                ru, rv = rv, ru
            parent[ru] = rv
            size[rv] += size[ru]
            chosen.append(eid)
            rec(i + 1)
            chosen.pop()
            size[rv] -= size[ru]
            parent[ru] = ru

    rec(0)
    found.sort()
    out = []
    for _, ids in found:
        out.append(
            Forest(g, ids, roots=roots if constraint == "rooted-exactly-one" else None)
        )
    return out
