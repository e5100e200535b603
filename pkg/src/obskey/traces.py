"""Persistence of traces and protocol artifacts.

CSV trace format: header ``round,party,antenna,subcarrier,re,im``, one row
per complex CSI value, floats with 12 significant digits.  Estimated-CSI
traces use antenna 0 (the estimating party does not know which antenna was
scheduled); ground-truth channel exports use 1-based antenna indices.

The public artifact set visible to an eavesdropper is exactly: the Eve CSI
trace, the basis file, the kept-index message, the syndrome file, and the
discard list.  The obfuscation secrets file is private and written only on
explicit request.
"""

import json
import struct
from pathlib import Path

import numpy as np

from .errors import ParameterError, TraceFormatError
from .kl import BlockShape, TransformBasis

TRACE_HEADER = "round,party,antenna,subcarrier,re,im"
SECRETS_HEADER = "round,m_k,tap_index,re,im"
KEPT_INDEX_HEADER = "component,part,column,index"
_FLOAT_FMT = "{:.12g}"

PUBLIC_ARTIFACTS = (
    "eve_csi.csv",
    "basis.csv",
    "kept_indexes.csv",
    "syndromes.bin",
    "discards.csv",
)


def save_trace(path, csi, party, antenna=0):
    """Write an N x K CSI matrix as one row per (round, subcarrier)."""
    csi = np.asarray(csi, dtype=complex)
    if csi.ndim != 2:
        raise ParameterError("trace expects an N x K matrix")
    n, k = csi.shape
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRACE_HEADER + "\n")
        for rnd in range(1, k + 1):
            col = csi[:, rnd - 1]
            for sub in range(n):
                fh.write(
                    f"{rnd},{party},{antenna},{sub},"
                    f"{_FLOAT_FMT.format(col[sub].real)},{_FLOAT_FMT.format(col[sub].imag)}\n"
                )


def load_trace(path):
    """Read a trace back into {party: N x K matrix} keyed by party label."""
    path = str(path)
    entries = {}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRACE_HEADER:
            raise TraceFormatError(path, 1, f"bad header {header!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 6:
                raise TraceFormatError(path, line_no, f"expected 6 fields, got {len(parts)}")
            try:
                rnd = int(parts[0])
                party = parts[1]
                sub = int(parts[3])
                value = complex(float(parts[4]), float(parts[5]))
            except ValueError as exc:
                raise TraceFormatError(path, line_no, str(exc)) from None
            entries.setdefault(party, {})[(rnd, sub)] = value
    result = {}
    for party, cells in entries.items():
        rounds = sorted({rnd for rnd, _ in cells})
        subs = sorted({sub for _, sub in cells})
        n, k = len(subs), len(rounds)
        if len(cells) != n * k:
            raise TraceFormatError(path, 0, f"party {party}: incomplete grid ({len(cells)} cells)")
        matrix = np.empty((n, k), dtype=complex)
        for (rnd, sub), value in cells.items():
            matrix[sub, rounds.index(rnd)] = value
        result[party] = matrix
    return result


def save_secrets(path, secrets):
    """Private ground truth: per-round antenna index and filter taps."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SECRETS_HEADER + "\n")
        for state in secrets:
            for tap_index, tap in enumerate(state.taps.a, start=1):
                fh.write(
                    f"{state.round_no},{state.antenna},{tap_index},"
                    f"{_FLOAT_FMT.format(tap.real)},{_FLOAT_FMT.format(tap.imag)}\n"
                )


def save_basis(path, basis):
    """Public basis file: JSON-like header line, then row,col,re,im rows of
    the projection matrix."""
    header = {
        "components": int(basis.n_components),
        "energy_fraction": float(basis.energy_fraction),
        "block_len_freq": int(basis.shape.len_freq),
        "block_len_time": int(basis.shape.len_time),
    }
    projection = basis.projection
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        fh.write("row,col,re,im\n")
        for r in range(projection.shape[0]):
            for c in range(projection.shape[1]):
                v = projection[r, c]
                fh.write(
                    f"{r},{c},{_FLOAT_FMT.format(v.real)},{_FLOAT_FMT.format(v.imag)}\n"
                )


def load_basis(path):
    path = str(path)
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
        if not first.startswith("# "):
            raise TraceFormatError(path, 1, "missing header line")
        meta = json.loads(first[2:])
        header = fh.readline().strip()
        if header != "row,col,re,im":
            raise TraceFormatError(path, 2, f"bad column header {header!r}")
        cells = {}
        for line_no, line in enumerate(fh, start=3):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise TraceFormatError(path, line_no, "expected 4 fields")
            r, c = int(parts[0]), int(parts[1])
            cells[(r, c)] = complex(float(parts[2]), float(parts[3]))
    n_rows = max(r for r, _ in cells) + 1
    n_cols = max(c for _, c in cells) + 1
    projection = np.zeros((n_rows, n_cols), dtype=complex)
    for (r, c), v in cells.items():
        projection[r, c] = v
    shape = BlockShape(meta["block_len_freq"], meta["block_len_time"])
    eigenvectors = projection.conj().T
    return TransformBasis(
        eigenvectors=eigenvectors,
        eigenvalues=np.zeros(n_rows),
        n_components=meta["components"],
        energy_fraction=meta["energy_fraction"],
        shape=shape,
    )


def save_kept_indexes(path, dropped):
    """Public message of dropped sample positions."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(KEPT_INDEX_HEADER + "\n")
        for comp, part, col in np.asarray(dropped, dtype=int):
            fh.write(f"{comp},{part},{col},{col}\n")


def save_syndromes(path, syndromes, params, pad_len):
    """Binary syndrome file: little-endian header (n, k, block count, pad
    length), then each syndrome packed MSB-first and padded to whole bytes."""
    syndromes = np.asarray(syndromes, dtype=np.uint8)
    n_blocks = syndromes.shape[0] if syndromes.ndim == 2 else 0
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4I", params.n, params.k, n_blocks, pad_len))
        for row in syndromes:
            fh.write(np.packbits(row).tobytes())


def load_syndromes(path):
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise TraceFormatError(str(path), 0, "truncated syndrome header")
        n, k, n_blocks, pad_len = struct.unpack("<4I", header)
        syn_len = n - k
        n_bytes = (syn_len + 7) // 8
        rows = []
        for idx in range(n_blocks):
            chunk = fh.read(n_bytes)
            if len(chunk) != n_bytes:
                raise TraceFormatError(str(path), idx, "truncated syndrome block")
            bits = np.unpackbits(np.frombuffer(chunk, dtype=np.uint8))[:syn_len]
            rows.append(bits)
    syndromes = np.stack(rows) if rows else np.zeros((0, n - k), dtype=np.uint8)
    return syndromes, (n, k, n_blocks, pad_len)


def save_discards(path, discarded_blocks):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("block\n")
        for idx in discarded_blocks:
            fh.write(f"{idx}\n")


def save_report(path, rows):
    """Report CSV: one (metric, value, pass) row per metric; pass may be
    empty for informational rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("metric,value,pass\n")
        for metric, value, ok in rows:
            if isinstance(value, float):
                value = _FLOAT_FMT.format(value)
            fh.write(f"{metric},{value},{'' if ok is None else str(ok).lower()}\n")


def save_nd_histogram(path, dist):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("nd,empirical,theoretical\n")
        for d in range(dist.group_size + 1):
            fh.write(
                f"{d},{_FLOAT_FMT.format(dist.histogram[d])},"
                f"{_FLOAT_FMT.format(dist.reference[d])}\n"
            )


def ensure_dir(path):
    Path(path).mkdir(parents=True, exist_ok=True)
    return Path(path)
