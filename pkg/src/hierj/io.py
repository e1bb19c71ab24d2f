"""File formats: tree text files, PGM/PPM images, edge weights, curve CSV."""

from __future__ import annotations

import io as _io
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import PgmFormatError, PpmFormatError, TreeFormatError, WeightFileError
from .hierarchy import Tree, build_tree

# ---------------------------------------------------------------------------
# tree text format: "bpt <node_count> <leaf_count>" then one parent per line


def write_tree(tree: Tree, path) -> None:
    lines = [f"bpt {tree.node_count} {tree.leaf_count}\n"]
    lines.extend(f"{int(p)}\n" for p in tree.parent)
    Path(path).write_bytes("".join(lines).encode("ascii"))


def read_tree(path) -> Tree:
    text = Path(path).read_bytes().decode("ascii", errors="replace")
    lines = text.splitlines()
    if not lines:
        raise TreeFormatError("empty tree file", line=1)
    head = lines[0].split()
    if len(head) != 3 or head[0] != "bpt":
        raise TreeFormatError(f"expected header 'bpt <nodes> <leaves>', got {lines[0]!r}", line=1)
    try:
        node_count = int(head[1])
        leaf_count = int(head[2])
    except ValueError:
        raise TreeFormatError(f"non-integer counts in header {lines[0]!r}", line=1) from None
    if node_count != 2 * leaf_count - 1:
        raise TreeFormatError(
            f"node count {node_count} does not match 2*{leaf_count}-1", line=1
        )
    if len(lines) - 1 < node_count:
        raise TreeFormatError(
            f"expected {node_count} parent lines, found {len(lines) - 1}", line=len(lines)
        )
    parent = []
    for i in range(node_count):
        raw = lines[1 + i].strip()
        try:
            parent.append(int(raw))
        except ValueError:
            raise TreeFormatError(f"invalid parent entry {raw!r}", line=i + 2) from None
    return build_tree(parent, leaf_count)


# ---------------------------------------------------------------------------
# PGM (P2/P5) and PPM (P3/P6), maxval up to 65535


def _read_token(buf: _io.BytesIO) -> bytes:
    """Next whitespace-delimited token, skipping '#' comments."""
    token = b""
    while True:
        ch = buf.read(1)
        if not ch:
            if token:
                return token
            raise PgmFormatError("unexpected end of header", offset=buf.tell())
        if ch == b"#":
            while ch and ch != b"\n":
                ch = buf.read(1)
            continue
        if ch.isspace():
            if token:
                return token
            continue
        token += ch


def _read_netpbm(data: bytes, magics: dict[bytes, tuple[str, int]], err):
    buf = _io.BytesIO(data)
    magic = buf.read(2)
    if magic not in magics:
        raise err(f"unsupported format magic {magic!r}", offset=0)
    kind, channels = magics[magic]

    def intval(name: str) -> int:
        tok = _read_token(buf)
        try:
            return int(tok)
        except ValueError:
            raise err(f"invalid {name} {tok!r}", offset=buf.tell()) from None

    width = intval("width")
    height = intval("height")
    maxval = intval("maxval")
    if width < 1 or height < 1:
        raise err(f"invalid extent {width}x{height}", offset=buf.tell())
    if not 0 < maxval <= 65535:
        raise err(f"maxval {maxval} outside 1..65535", offset=buf.tell())
    count = width * height * channels
    if kind == "ascii":
        values = []
        rest = buf.read().split()
        if len(rest) < count:
            raise err(f"expected {count} samples, found {len(rest)}", offset=len(data))
        for tok in rest[:count]:
            try:
                v = int(tok)
            except ValueError:
                raise err(f"invalid sample {tok!r}", offset=buf.tell()) from None
            values.append(v)
        arr = np.array(values, dtype=np.int64)
    else:
        # single whitespace byte separates the header from binary samples
        width_bytes = 2 if maxval > 255 else 1
        raw = buf.read(count * width_bytes)
        if len(raw) < count * width_bytes:
            raise err(
                f"truncated pixel data, expected {count * width_bytes} bytes, "
                f"found {len(raw)}",
                offset=buf.tell(),
            )
        dtype = ">u2" if maxval > 255 else "u1"
        arr = np.frombuffer(raw, dtype=dtype).astype(np.int64)
    if arr.size and int(arr.max()) > maxval:
        raise err(f"sample {int(arr.max())} exceeds maxval {maxval}")
    if channels == 1:
        return arr.reshape(height, width), maxval
    return arr.reshape(height, width, channels), maxval


def read_pgm(path) -> np.ndarray:
    """Grayscale PGM as an int array of shape (height, width)."""
    arr, _ = _read_netpbm(
        Path(path).read_bytes(),
        {b"P2": ("ascii", 1), b"P5": ("binary", 1)},
        PgmFormatError,
    )
    return arr


def write_pgm(path, array, maxval: int | None = None) -> None:
    arr = np.asarray(array)
    if arr.ndim != 2:
        raise ValueError(f"PGM needs a 2-d array, got shape {arr.shape}")
    if maxval is None:
        maxval = max(1, int(arr.max()) if arr.size else 1)
    if not 0 < maxval <= 65535:
        raise ValueError(f"maxval {maxval} outside 1..65535")
    if arr.size and (int(arr.min()) < 0 or int(arr.max()) > maxval):
        raise ValueError("samples outside 0..maxval")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        body = arr.astype(">u2").tobytes()
    else:
        body = arr.astype("u1").tobytes()
    Path(path).write_bytes(header + body)


def read_ppm(path) -> np.ndarray:
    """Color PPM as an int array of shape (height, width, 3)."""
    arr, _ = _read_netpbm(
        Path(path).read_bytes(),
        {b"P3": ("ascii", 3), b"P6": ("binary", 3)},
        PpmFormatError,
    )
    return arr


# ---------------------------------------------------------------------------
# edge weight files: one "u v w" triple per line


def read_edge_weights(path) -> tuple[list[tuple[int, int, Fraction]], int]:
    """Edges with exact decimal weights, plus the implied vertex count."""
    edges: list[tuple[int, int, Fraction]] = []
    max_vertex = -1
    for lineno, raw in enumerate(Path(path).read_text(encoding="ascii").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise WeightFileError(f"expected 'u v w', got {raw!r}", line=lineno)
        try:
            u = int(parts[0])
            v = int(parts[1])
        except ValueError:
            raise WeightFileError(f"invalid vertex id in {raw!r}", line=lineno) from None
        try:
            w = Fraction(parts[2])
        except ValueError:
            raise WeightFileError(f"invalid weight {parts[2]!r}", line=lineno) from None
        if u < 0 or v < 0:
            raise WeightFileError(f"negative vertex id in {raw!r}", line=lineno)
        if w < 0:
            raise WeightFileError(f"negative weight in {raw!r}", line=lineno)
        edges.append((u, v, w))
        max_vertex = max(max_vertex, u, v)
    return edges, max_vertex + 1


# ---------------------------------------------------------------------------
# curve CSV


@dataclass(frozen=True)
class CurveRecord:
    """One optimized (consistency, budget) cell; exact fields are authoritative."""

    image_id: str
    consistency: str
    k: int
    jaccard_num: int
    jaccard_den: int
    complemented: bool
    iterations: int
    millis: int

    @property
    def jaccard_float(self) -> str:
        return f"{self.jaccard_num / self.jaccard_den:.6f}"


CSV_HEADER = (
    "image_id,consistency,k,jaccard_num,jaccard_den,jaccard_float,"
    "complemented,iterations,millis"
)


def write_curve_csv(path, records) -> None:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.image_id},{r.consistency},{r.k},{r.jaccard_num},{r.jaccard_den},"
            f"{r.jaccard_float},{'true' if r.complemented else 'false'},"
            f"{r.iterations},{r.millis}"
        )
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("ascii"))
