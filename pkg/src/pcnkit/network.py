"""Contact networks, SE/LE link partitions, reference lattices and the .pcn file format."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .errors import (
    EmptyTrace,
    InvalidSpec,
    ParseError,
    PartitionMismatch,
    TooFewNodes,
    VersionMismatch,
)

DEFAULT_TH = 7.0
DEFAULT_LE_TH = 9
FORMAT_VERSION = "v1"


def _canonical_edges(edges, n: int) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if arr.size == 0:
        out = np.empty((0, 2), dtype=np.int64)
        out.flags.writeable = False
        return out
    arr = np.sort(arr, axis=1)
    if (arr[:, 0] == arr[:, 1]).any():
        raise ValueError("self-loop in edge list")
    if arr.min() < 0 or arr.max() >= n:
        raise ValueError("edge endpoint outside [0, n)")
    arr = np.unique(arr, axis=0)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ContactNetwork:
    """Simple undirected graph on nodes ``0..n-1``.

    ``edges`` is an (M, 2) array with ``i < j`` in ascending lexicographic order.
    ``ring`` switches sequence distance to the circular form ``min(d, n - d)``;
    it is only set by the ring variant of the generative model and ring lattices.
    """

    n: int
    edges: np.ndarray
    th: float = DEFAULT_TH
    source: str = ""
    ring: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative node count")
        object.__setattr__(self, "edges", _canonical_edges(self.edges, self.n))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def seq_dist(self) -> np.ndarray:
        d = self.edges[:, 1] - self.edges[:, 0]
        if self.ring:
            d = np.minimum(d, self.n - d)
        d.flags.writeable = False
        return d

    @cached_property
    def csr(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency with sorted column indices."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * self.m, dtype=np.int8)
        mat = sparse.csr_matrix(
            (data, (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(self.n, self.n)
        )
        mat.sort_indices()
        return mat

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        deg.flags.writeable = False
        return deg

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edges}

    def with_edges(self, edges, source: str | None = None) -> "ContactNetwork":
        return ContactNetwork(self.n, edges, self.th, self.source if source is None else source, self.ring)

    def __eq__(self, other):
        if not isinstance(other, ContactNetwork):
            return NotImplemented
        return (
            self.n == other.n
            and self.ring == other.ring
            and self.source == other.source
            and round(self.th, 3) == round(other.th, 3)
            and np.array_equal(self.edges, other.edges)
        )

    def __hash__(self):
        return hash((self.n, self.m, self.source))

    def __repr__(self):
        return f"ContactNetwork(n={self.n}, m={self.m}, th={self.th}, source={self.source!r})"


@dataclass(frozen=True)
class LinkPartition:
    le_th: int
    se: np.ndarray
    le: np.ndarray
    se_nodes: frozenset[int]
    le_nodes: frozenset[int]
    n: int
    m: int
    source: str = ""
    ratios: dict[str, float] = field(default_factory=dict)

    @property
    def le_fraction(self) -> float:
        return self.ratios["le_fraction"]


@dataclass(frozen=True)
class LatticeSpec:
    n: int
    v: int
    topology: str = "linear"

    def __post_init__(self):
        if self.v < 2 or self.v % 2:
            raise InvalidSpec(f"V must be even and >= 2, got {self.v}")
        if self.topology not in ("linear", "ring"):
            raise InvalidSpec(f"unknown topology {self.topology!r}")
        if self.n < 1:
            raise InvalidSpec("lattice needs at least one node")
        if self.topology == "ring" and self.n <= self.v:
            raise InvalidSpec(f"ring lattice needs n > V ({self.n} <= {self.v})")


def build_contact_network(trace, th: float = DEFAULT_TH, source: str | None = None) -> ContactNetwork:
    """Link every residue pair closer than ``th`` angstrom (strictly)."""
    if th <= 0:
        raise ValueError("contact threshold must be positive")
    pos = trace.positions() if hasattr(trace, "positions") else np.asarray(trace, dtype=float)
    if len(pos) == 0:
        raise EmptyTrace("cannot build a network from an empty trace")
    tree = cKDTree(pos)
    # query_pairs uses <=; filter the boundary afterwards on exact distances
    pairs = tree.query_pairs(th, output_type="ndarray")
    if len(pairs):
        d = np.linalg.norm(pos[pairs[:, 0]] - pos[pairs[:, 1]], axis=1)
        pairs = pairs[d < th]
    if source is None:
        source = getattr(trace, "source_id", "")
    return ContactNetwork(len(pos), pairs, float(th), source)


def partition_links(net: ContactNetwork, le_th: int = DEFAULT_LE_TH) -> LinkPartition:
    """Split links into short-range (seq_dist <= le_th) and long-range (> le_th)."""
    if le_th < 1:
        raise ValueError("le_th must be >= 1")
    long_mask = net.seq_dist > le_th
    se = net.edges[~long_mask]
    le = net.edges[long_mask]
    se_nodes = frozenset(np.unique(se).tolist())
    le_nodes = frozenset(np.unique(le).tolist())
    n, m = net.n, net.m
    ratios = {
        "le_fraction": len(le) / m if m else 0.0,
        "se_nodes_fraction": len(se_nodes) / n if n and m else 0.0,
        "le_nodes_fraction": len(le_nodes) / n if n and m else 0.0,
        "both_nodes_fraction": len(se_nodes & le_nodes) / n if n and m else 0.0,
        "not_le_nodes_fraction": (n - len(le_nodes)) / n if n and m else 0.0,
    }
    return LinkPartition(le_th, se, le, se_nodes, le_nodes, n, m, net.source, ratios)


def link_density(net: ContactNetwork) -> float:
    if net.n < 2:
        raise TooFewNodes("link density needs at least two nodes")
    return 2.0 * net.m / (net.n * (net.n - 1))


def make_lattice(spec: LatticeSpec) -> ContactNetwork:
    half = spec.v // 2
    idx = np.arange(spec.n)
    parts = []
    for d in range(1, half + 1):
        if spec.topology == "linear":
            a = idx[: spec.n - d]
            parts.append(np.column_stack([a, a + d]))
        else:
            parts.append(np.column_stack([idx, (idx + d) % spec.n]))
    edges = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    return ContactNetwork(
        spec.n, edges, 0.0, f"lattice{spec.v}-{spec.topology}", ring=spec.topology == "ring"
    )


def subnetwork(net: ContactNetwork, part: LinkPartition, which: str) -> ContactNetwork:
    """Keep all ``n`` nodes and only the SE or LE links."""
    if part.n != net.n or part.m != net.m or len(part.se) + len(part.le) != net.m:
        raise PartitionMismatch("partition was not derived from this network")
    which = which.upper()
    if which not in ("SE", "LE"):
        raise ValueError("which must be 'SE' or 'LE'")
    edges = part.se if which == "SE" else part.le
    return ContactNetwork(net.n, edges, net.th, f"{net.source}:{which}" if net.source else which, net.ring)


def connected_components(net: ContactNetwork) -> int:
    if net.n == 0:
        return 0
    ncomp, _ = csgraph.connected_components(net.csr, directed=False)
    return int(ncomp)


def save_network(net: ContactNetwork) -> bytes:
    buf = io.StringIO()
    buf.write(f"#pcn {FORMAT_VERSION}\n")
    buf.write(f"#source {net.source}\n")
    buf.write(f"#n {net.n}\n")
    buf.write(f"#th {net.th:.3f}\n")
    if net.ring:
        buf.write("#topology ring\n")
    for a, b in net.edges:
        buf.write(f"{a} {b}\n")
    return buf.getvalue().encode("utf-8")


def _header_value(header, key, line_no, convert):
    try:
        return convert(header)
    except ValueError:
        raise ParseError(line_no, f"bad '#{key}' value {header!r}") from None


def load_network(data) -> ContactNetwork:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    lines = data.splitlines()
    if not lines or not lines[0].startswith("#pcn"):
        raise ParseError(1, "missing '#pcn' header")
    version = lines[0][4:].strip()
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported network file version {version!r}")

    source = None
    n_nodes = None
    th = None
    ring = False
    edges = []
    seen = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if line.startswith("#"):
            key, _, value = line[1:].partition(" ")
            if key == "source":
                source = value
            elif key == "n":
                n_nodes = _header_value(value, key, line_no, int)
                if n_nodes < 0:
                    raise ParseError(line_no, f"negative node count {n_nodes}")
            elif key == "th":
                th = _header_value(value, key, line_no, float)
            elif key == "topology":
                if value.strip() not in ("linear", "ring"):
                    raise ParseError(line_no, f"unknown topology {value!r}")
                ring = value.strip() == "ring"
            else:
                raise ParseError(line_no, f"unknown header '#{key}'")
            continue
        if not line.strip():
            continue
        if n_nodes is None:
            raise ParseError(line_no, "edge before '#n' header")
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(line_no, f"expected 'i j', got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(line_no, f"non-integer endpoint in {line!r}") from None
        if a == b:
            raise ParseError(line_no, f"self-loop {a} {b}")
        if a > b:
            raise ParseError(line_no, f"endpoints not ordered: {a} {b}")
        if a < 0 or b >= n_nodes:
            raise ParseError(line_no, f"endpoint outside [0, {n_nodes})")
        if (a, b) in seen:
            raise ParseError(line_no, f"duplicate edge {a} {b}")
        seen.add((a, b))
        edges.append((a, b))

    for key, value in (("source", source), ("n", n_nodes), ("th", th)):
        if value is None:
            raise ParseError(len(lines), f"missing '#{key}' header")
    return ContactNetwork(n_nodes, edges, th, source, ring=ring)


def read_network(path) -> ContactNetwork:
    with open(path, "rb") as fh:
        return load_network(fh.read())
