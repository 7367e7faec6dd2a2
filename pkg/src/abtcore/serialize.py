"""Binary index files.

Layout (little-endian)::

    b"BCIX" | u16 version | u8 kind | u8 reserved | u64 graph checksum
            | u64 payload length (in int64 words) | payload (int64[])

The payload is a flat integer array.  A chain is encoded as
``nblocks, key_0..key_k, size_0..size_k, vertices...`` plus its pointer level
``depth, ptr_0..ptr_d``.  A total index is ``alpha_max`` rows, each row
``beta_len`` chains; a 2D index is one list of chains (two for AB).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .graph import BipartiteGraph
from .index import Chain, TotalIndex, TwoDIndex

MAGIC = b"BCIX"
VERSION = 1
KIND_CODES = {"total": 0, "ab": 1, "bt": 2, "at": 3}
_KIND_NAMES = {v: k for k, v in KIND_CODES.items()}
_HEADER = struct.Struct("<4sHBBQQ")


class IndexFormatError(ValueError):
    """Corrupt or truncated index data."""


class IndexMismatchError(IndexFormatError):
    """Index is incompatible with this build or with the supplied graph."""


def _put_chain(out: list[int], ch: Chain) -> None:
    out.append(len(ch.blocks))
    out.extend(ch.keys)
    out.extend(len(b) for b in ch.blocks)
    for b in ch.blocks:
        out.extend(b)
    out.append(len(ch.ptr))
    out.extend(ch.ptr)


def _put_chains(out: list[int], chains: list[Chain]) -> None:
    out.append(len(chains))
    for ch in chains:
        _put_chain(out, ch)


class _Reader:
    def __init__(self, words: np.ndarray):
        self.w = words
        self.i = 0

    def take(self, k: int) -> list[int]:
        if k < 0 or self.i + k > len(self.w):
            raise IndexFormatError("payload ends prematurely")
        out = self.w[self.i : self.i + k].tolist()
        self.i += k
        return out

    def one(self) -> int:
        return self.take(1)[0]

    def chain(self) -> Chain:
        nb = self.one()
        keys = self.take(nb)
        sizes = self.take(nb)
        blocks = [tuple(self.take(s)) for s in sizes]
        ptr = self.take(self.one())
        if any(p < 0 or p >= nb for p in ptr):
            raise IndexFormatError("block pointer out of range")
        return Chain(keys, blocks, ptr)

    def chains(self) -> list[Chain]:
        return [self.chain() for _ in range(self.one())]


def serialize_index(idx, g: BipartiteGraph) -> bytes:
    """Encode ``idx`` (built on ``g``) as bytes."""
    words: list[int] = [idx.upper_count]
    if isinstance(idx, TotalIndex):
        words.append(len(idx.levels))
        for row in idx.levels:
            _put_chains(words, row)
    else:
        _put_chains(words, idx.chains)
        if idx.kind == "ab":
            _put_chains(words, idx.lower_chains)
    payload = np.asarray(words, dtype="<i8").tobytes()
    head = _HEADER.pack(MAGIC, VERSION, KIND_CODES[idx.kind], 0, g.checksum(), len(words))
    return head + payload


def deserialize_index(data: bytes, g: BipartiteGraph | None = None):
    """Decode bytes from :func:`serialize_index`.  With ``g`` the stored graph
    checksum must match."""
    if len(data) < _HEADER.size:
        raise IndexFormatError("truncated header")
    magic, version, kind, _, checksum, nwords = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    if version != VERSION:
        raise IndexMismatchError(f"index format version {version}, expected {VERSION}")
    if kind not in _KIND_NAMES:
        raise IndexFormatError(f"unknown index kind code {kind}")
    if g is not None and checksum != g.checksum():
        raise IndexMismatchError("index was built for a different graph (checksum mismatch)")
    body = data[_HEADER.size :]
    if len(body) != 8 * nwords:
        raise IndexFormatError(f"payload is {len(body)} bytes, expected {8 * nwords}")
    r = _Reader(np.frombuffer(body, dtype="<i8"))
    nu = r.one()
    name = _KIND_NAMES[kind]
    if name == "total":
        idx = TotalIndex(nu, [r.chains() for _ in range(r.one())])
    elif name == "ab":
        up = r.chains()
        idx = TwoDIndex("ab", nu, up, r.chains())
    else:
        idx = TwoDIndex(name, nu, r.chains())
    if r.i != len(r.w):
        raise IndexFormatError("trailing data after index payload")
    return idx


def read_header(data: bytes) -> dict:
    magic, version, kind, _, checksum, nwords = _HEADER.unpack_from(data)
    return {"magic": magic, "version": version, "kind": _KIND_NAMES.get(kind), "checksum": checksum, "words": nwords}


def save_index(idx, g: BipartiteGraph, path: str | Path) -> int:
    """Write atomically; returns the file size in bytes."""
    path = Path(path)
    blob = serialize_index(idx, g)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(blob)
    tmp.replace(path)
    return len(blob)


def load_index(path: str | Path, g: BipartiteGraph | None = None):
    return deserialize_index(Path(path).read_bytes(), g)
