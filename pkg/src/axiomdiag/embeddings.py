"""Term vectors and the cosine-based similarity functions used by the
semantic matching heuristics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from axiomdiag.errors import DataError


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    def add(self, term: str, vector) -> None:
        vec = np.asarray(vector, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise DataError(f"vector for {term!r} has length {vec.shape}, expected {self.dim}")
        self.vectors[term] = vec

    def __contains__(self, term: str) -> bool:
        return term in self.vectors


def load_vectors(path) -> EmbeddingTable:
    """Read a plain-text vector file: `term v1 v2 ... vdim` per line.

    An optional `count dim` header line is auto-detected.
    """
    table = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if table is None and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                except ValueError:
                    pass
                else:
                    continue  # header line
            if table is None:
                table = EmbeddingTable(dim=len(parts) - 1)
            try:
                values = [float(v) for v in parts[1:]]
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric vector component") from None
            if len(values) != table.dim:
                raise DataError(f"{path}:{lineno}: expected {table.dim} components, got {len(values)}")
            table.add(parts[0], values)
    if table is None:
        raise DataError(f"{path}: no vectors found")
    return table


def cosine(u: np.ndarray, v: np.ndarray):
    """Cosine of two vectors, clipped to [-1, 1]; None on a zero norm."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return None
    value = float(np.dot(u, v) / (nu * nv))
    return max(-1.0, min(1.0, value))


def mean_vector(tokens, table: EmbeddingTable):
    """Occurrence-weighted mean of the in-vocabulary token vectors; None when
    no token has a vector."""
    total = np.zeros(table.dim, dtype=np.float64)
    count = 0
    for token in tokens:
        vec = table.vectors.get(token)
        if vec is not None:
            total += vec
            count += 1
    if count == 0:
        return None
    return total / count


def sigma(t1: str, t2: str, table: EmbeddingTable):
    """Cosine similarity of two term vectors; None if either is missing or
    has zero norm."""
    u = table.vectors.get(t1)
    v = table.vectors.get(t2)
    if u is None or v is None:
        return None
    return cosine(u, v)


def sigma_prime(tokens1, tokens2, table: EmbeddingTable):
    """Cosine similarity of the mean vectors of two token multisets; None if
    either side is fully out of vocabulary or has a zero-norm mean."""
    m1 = mean_vector(tokens1, table)
    if m1 is None:
        return None
    m2 = mean_vector(tokens2, table)
    if m2 is None:
        return None
    return cosine(m1, m2)
