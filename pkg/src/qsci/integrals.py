"""FCIDUMP ingestion and molecular-integral storage.

Two-electron integrals are chemists' (pq|rs), kept in a packed array
indexed by the composite pair index, so all eight permutational
symmetries resolve to one stored value.  Storage is spatial; spin is
resolved at matrix-element time (restricted reference).  Indices are
0-based internally and 1-based at file boundaries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import FcidumpParseError


def _pair(p: int, q: int) -> int:
    return p * (p + 1) // 2 + q if p >= q else q * (q + 1) // 2 + p


def _composite(p: int, q: int, r: int, s: int) -> int:
    return _pair(_pair(p, q), _pair(r, s))


@dataclass
class IntegralStore:
    """Core energy plus one- and two-electron integrals in Hartree."""

    norb: int
    n_elec: int
    ms2: int
    core_energy: float = 0.0
    h: np.ndarray = field(default=None)  # (norb, norb), symmetric
    g: np.ndarray = field(default=None)  # packed (pq|rs), 8-fold symmetric

    def __post_init__(self):
        if self.norb < 1:
            raise ValueError("norb must be positive")
        if self.h is None:
            self.h = np.zeros((self.norb, self.norb))
        if self.g is None:
            n_pair = self.norb * (self.norb + 1) // 2
            self.g = np.zeros(n_pair * (n_pair + 1) // 2)

    @property
    def n_alpha(self) -> int:
        return (self.n_elec + self.ms2) // 2

    @property
    def n_beta(self) -> int:
        return (self.n_elec - self.ms2) // 2

    @property
    def sector(self) -> tuple[int, int]:
        return (self.n_alpha, self.n_beta)

    def _check_index(self, *idx: int):
        for i in idx:
            if not 0 <= i < self.norb:
                raise IndexError(f"orbital index {i} out of range [0, {self.norb})")

    def one_body(self, p: int, q: int) -> float:
        self._check_index(p, q)
        return float(self.h[p, q])

    def two_body(self, p: int, q: int, r: int, s: int) -> float:
        """Chemists' (pq|rs); any of the eight equivalent index orders."""
        self._check_index(p, q, r, s)
        return float(self.g[_composite(p, q, r, s)])

    def set_one_body(self, p: int, q: int, value: float):
        self._check_index(p, q)
        self.h[p, q] = value
        self.h[q, p] = value

    def set_two_body(self, p: int, q: int, r: int, s: int, value: float):
        self._check_index(p, q, r, s)
        self.g[_composite(p, q, r, s)] = value


_HEADER_KV = re.compile(r"([A-Za-z0-9_]+)\s*=\s*([^=]*?)(?=(?:,?\s*[A-Za-z0-9_]+\s*=)|$)")


def parse_fcidump(text: str) -> IntegralStore:
    """Parse FCIDUMP content into an :class:`IntegralStore`.

    Header keys NORB, NELEC, MS2 are honoured; ORBSYM/ISYM and unknown
    keys are ignored.  Body lines are ``value p q r s`` with 1-based
    indices: all-zero indices set the core energy, ``p q 0 0`` a
    one-electron integral, four nonzero indices a two-electron integral.
    Orbital-energy lines (``p 0 0 0``) are skipped.  Duplicates overwrite
    with the latest value.
    """
    lines = text.splitlines()
    header_parts: list[str] = []
    body_start = None
    for ln, line in enumerate(lines, start=1):
        stripped = line.strip()
        if ln == 1:
            if not stripped.upper().startswith("&FCI"):
                raise FcidumpParseError("missing &FCI header", ln)
            stripped = stripped[4:]
        if "&END" in stripped.upper() or stripped.startswith("/"):
            marker = stripped.upper().find("&END")
            cut = marker if marker >= 0 else stripped.find("/")
            header_parts.append(stripped[:cut])
            body_start = ln + 1
            break
        header_parts.append(stripped)
    if body_start is None:
        raise FcidumpParseError("header never terminated with &END or /", len(lines))

    header = " ".join(header_parts)
    keys = {m.group(1).upper(): m.group(2).strip().rstrip(",") for m in _HEADER_KV.finditer(header)}
    try:
        norb = int(keys["NORB"])
        n_elec = int(keys["NELEC"])
    except KeyError as missing:
        raise FcidumpParseError(f"header missing {missing} entry", 1)
    except ValueError:
        raise FcidumpParseError("NORB/NELEC must be integers", 1)
    ms2 = int(keys.get("MS2", "0") or 0)

    store = IntegralStore(norb=norb, n_elec=n_elec, ms2=ms2)
    for ln in range(body_start, len(lines) + 1):
        raw = lines[ln - 1].strip()
        if not raw:
            continue
        tokens = raw.split()
        if len(tokens) != 5:
            raise FcidumpParseError(f"expected 'value p q r s', got {raw!r}", ln)
        try:
            value = float(tokens[0])
            p, q, r, s = (int(t) for t in tokens[1:])
        except ValueError:
            raise FcidumpParseError(f"non-numeric field in {raw!r}", ln)
        if min(p, q, r, s) < 0 or max(p, q, r, s) > norb:
            raise FcidumpParseError(f"orbital index out of range in {raw!r}", ln)
        if p == q == r == s == 0:
            store.core_energy = value
        elif q == r == s == 0:
            continue  # orbital energy line; not part of the Hamiltonian
        elif r == s == 0:
            if p == 0 or q == 0:
                raise FcidumpParseError(f"bad one-electron indices in {raw!r}", ln)
            store.set_one_body(p - 1, q - 1, value)
        elif min(p, q, r, s) >= 1:
            store.set_two_body(p - 1, q - 1, r - 1, s - 1, value)
        else:
            raise FcidumpParseError(f"unsupported index pattern in {raw!r}", ln)
    return store


def load_fcidump(path) -> IntegralStore:
    with open(path, "r", encoding="ascii") as handle:
        return parse_fcidump(handle.read())


def write_fcidump(store: IntegralStore) -> str:
    """Serialize in canonical order; ``parse_fcidump`` round-trips exactly."""
    out = [
        f"&FCI NORB={store.norb},NELEC={store.n_elec},MS2={store.ms2},",
        " ORBSYM=" + ",".join(["1"] * store.norb),
        " ISYM=1,",
        "&END",
    ]

    def fmt(value, p, q, r, s):
        return f" {float(value)!r} {p} {q} {r} {s}"

    for p in range(store.norb):
        for q in range(p + 1):
            for r in range(p + 1):
                s_max = q if r == p else r
                for s in range(s_max + 1):
                    value = store.g[_composite(p, q, r, s)]
                    if value != 0.0:
                        out.append(fmt(value, p + 1, q + 1, r + 1, s + 1))
    for p in range(store.norb):
        for q in range(p + 1):
            if store.h[p, q] != 0.0:
                out.append(fmt(store.h[p, q], p + 1, q + 1, 0, 0))
    out.append(fmt(store.core_energy, 0, 0, 0, 0))
    return "\n".join(out) + "\n"


def dump_fcidump(store: IntegralStore, path):
    with open(path, "w", encoding="ascii") as handle:
        handle.write(write_fcidump(store))
