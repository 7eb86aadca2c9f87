"""Second piggybacking layout C(n, k, s, k'=0).

Columns 1..s hold (n, k) codewords; column s+1 carries no data, its n
entries are the piggyback sums p_1..p_n with
p_m = a_{1, m-1} + a_{2, m-2} + ... + a_{s, m-s} (row indices wrapped to
[1, n], parity positions addressed as rows k+1..n of each codeword).

Any single node repairs with exactly s + s^2 reads. Up to r = n-k
simultaneous failures decode column by column; r+1 failures are
recoverable by a sequential sweep whenever k > (s-1)(r+1)+1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import (
    DecodeError,
    InsufficientDataError,
    ParameterError,
    UnsupportedPatternError,
)
from .field import symbols_equal
from .params import (
    CodeParams,
    ReadTracker,
    RepairReport,
    SymbolGrid,
    Variant,
    grid_from_rows,
)


def _require_design2(params: CodeParams):
    if params.variant is not Variant.DESIGN2:
        raise ParameterError("operation needs kprime = 0 (design2 layout)")


def wrap(params: CodeParams, x: int) -> int:
    """Normalize a row offset into [1, n] (circular row indexing)."""
    n = params.n
    if not -params.s + 1 <= x <= n + params.s:
        raise ParameterError(f"offset {x} out of [{-params.s + 1}, {n + params.s}]")
    if x <= 0:
        return x + n
    if x > n:
        return x - n
    return x


def piggyback_target(params: CodeParams, i: int, j: int) -> int:
    """Row of column s+1 whose piggyback sum absorbs source cell (i, j)."""
    _require_design2(params)
    if not 1 <= i <= params.s:
        raise ParameterError(f"column {i} out of [1, {params.s}]")
    if not 1 <= j <= params.n:
        raise ParameterError(f"row {j} out of [1, {params.n}]")
    return i + j if i + j <= params.n else i + j - params.n


def piggyback_sources(params: CodeParams, m: int) -> tuple[tuple[int, int], ...]:
    """Source cells (column i, row) summed into p_m: row = wrap(m - i)."""
    _require_design2(params)
    if not 1 <= m <= params.n:
        raise ParameterError(f"row {m} out of [1, {params.n}]")
    return tuple((i, wrap(params, m - i)) for i in range(1, params.s + 1))


@dataclass(frozen=True)
class FailurePattern:
    """Sorted failed rows plus the circular gaps between them.

    gaps[i] counts surviving rows strictly between failed[i] and the next
    failed row (wrapping around after the last). With m = r+1 failures the
    gaps sum to k-1.
    """

    failed: tuple[int, ...]
    gaps: tuple[int, ...]

    @classmethod
    def from_failed(cls, params: CodeParams, failed) -> "FailurePattern":
        rows = tuple(sorted(set(failed)))
        if not rows:
            raise ParameterError("no failed rows given")
        if rows[0] < 1 or rows[-1] > params.n:
            raise ParameterError(f"failed rows out of [1, {params.n}]: {rows}")
        m = len(rows)
        gaps = tuple(
            rows[i + 1] - rows[i] - 1 if i + 1 < m else params.n - rows[-1] + rows[0] - 1
            for i in range(m)
        )
        return cls(rows, gaps)


def encode_stripe(params: CodeParams, data) -> SymbolGrid:
    """Encode s*k data symbols into the n x (s+1) stripe."""
    _require_design2(params)
    data = list(data)
    if len(data) != params.data_symbols:
        raise ParameterError(
            f"expected {params.data_symbols} data symbols, got {len(data)}"
        )
    s, k = params.s, params.k
    cols = [
        params.mds_first.encode(data[(i - 1) * k : i * k]) for i in range(1, s + 1)
    ]
    pvals = []
    for m in range(1, params.n + 1):
        acc = None
        for i, row in piggyback_sources(params, m):
            v = cols[i - 1][row - 1]
            acc = v if acc is None else acc ^ v
        pvals.append(acc)
    rows = [[cols[i][j] for i in range(s)] + [pvals[j]] for j in range(params.n)]
    return grid_from_rows(params, rows)


def repair_node(
    params: CodeParams, f: int, read: Callable[[int, int], object]
) -> tuple[list, RepairReport]:
    """Rebuild node f with exactly s + s^2 reads.

    s reads rebuild the lost piggyback sum p_f; each of the s lost
    codeword symbols then costs one piggyback read plus s-1 contributor
    reads. All reads are distinct and avoid row f.
    """
    _require_design2(params)
    if not 1 <= f <= params.n:
        raise ParameterError(f"node {f} out of [1, {params.n}]")
    s = params.s
    last_col = s + 1
    tracker = ReadTracker(read, (f,))

    p_f = None
    for i, row in piggyback_sources(params, f):
        v = tracker.fetch(row, i)
        p_f = v if p_f is None else p_f ^ v

    row_syms = []
    for j in range(1, s + 1):
        m = wrap(params, j + f)
        acc = tracker.fetch(m, last_col)
        for i, row in piggyback_sources(params, m):
            if (i, row) != (j, f):
                acc = acc ^ tracker.fetch(row, i)
        row_syms.append(acc)
    row_syms.append(p_f)

    reads = tracker.reads()
    report = RepairReport(node=f, bandwidth=len(reads), reads=reads, symbols=row_syms)
    return row_syms, report


def recover_failures(
    params: CodeParams, failed, read: Callable[[int, int], object]
) -> dict[int, list]:
    """Recover up to r+1 failed nodes; returns {node: its s+1 symbols}.

    Up to r failures decode each codeword column directly. Exactly r+1
    failures run the sequential sweep: pick the failed node with the
    largest circular gap of survivors after it (smallest index on ties),
    pull one of its symbols out of a piggyback sum, decode that column,
    and repeat for all s columns; needs k > (s-1)(r+1)+1.
    """
    _require_design2(params)
    pattern = FailurePattern.from_failed(params, failed)
    rows_failed = pattern.failed
    m = len(rows_failed)
    r, k, s, n = params.r, params.k, params.s, params.n
    if m > r + 1:
        raise UnsupportedPatternError(
            f"{m} failures exceed the guaranteed capability r+1={r + 1}"
        )
    if m == r + 1 and k <= (s - 1) * (r + 1) + 1:
        raise UnsupportedPatternError(
            f"recovering r+1={r + 1} failures needs k > (s-1)(r+1)+1 = "
            f"{(s - 1) * (r + 1) + 1}, got k={k}"
        )

    failed_set = set(rows_failed)
    survivors = [row for row in range(1, n + 1) if row not in failed_set]
    tracker = ReadTracker(read, failed_set)
    cols_full: list[list | None] = [None] * (s + 1)  # 1-based columns

    def column_decode(i: int, extra: dict | None = None) -> list:
        helpers = survivors if extra else survivors[:k]
        known = {row: tracker.fetch(row, i) for row in helpers}
        if extra:
            known.update(extra)
        return params.mds_first.decode(known, verify=False)

    if m <= r:
        for i in range(1, s + 1):
            cols_full[i] = column_decode(i)
    else:
        t_max = max(pattern.gaps)
        if t_max < s:
            raise AssertionError(
                f"max gap {t_max} < s={s} despite k > (s-1)(r+1)+1"
            )
        f_j = rows_failed[pattern.gaps.index(t_max)]
        for ell in range(s):
            col = s - ell
            m_target = wrap(params, f_j + col)
            acc = tracker.fetch(m_target, s + 1)
            for i, row in piggyback_sources(params, m_target):
                if (i, row) == (col, f_j):
                    continue
                if row in failed_set:
                    decoded = cols_full[i]
                    if decoded is None:
                        raise AssertionError(
                            f"needed cell (node={row}, column={i}) before "
                            f"column {i} was decoded"
                        )
                    acc = acc ^ decoded[row - 1]
                else:
                    acc = acc ^ tracker.fetch(row, i)
            cols_full[col] = column_decode(col, extra={f_j: acc})

    out = {}
    for f in rows_failed:
        syms = [cols_full[i][f - 1] for i in range(1, s + 1)]
        p = None
        for i, row in piggyback_sources(params, f):
            v = cols_full[i][row - 1]
            p = v if p is None else p ^ v
        syms.append(p)
        out[f] = syms
    return out


def decode_from_k(params: CodeParams, rows: Mapping[int, object]) -> list:
    """Recover all s*k data symbols from any k surviving rows."""
    _require_design2(params)
    if len(rows) < params.k:
        raise InsufficientDataError(
            f"need {params.k} rows to decode, got {len(rows)}"
        )
    s, k = params.s, params.k
    for node, row in rows.items():
        if not 1 <= node <= params.n:
            raise ParameterError(f"node {node} out of [1, {params.n}]")
        if len(row) != s + 1:
            raise ParameterError(f"row {node} must hold {s + 1} symbols")

    cols = []
    for i in range(1, s + 1):
        known = {node: row[i - 1] for node, row in rows.items()}
        cols.append(params.mds_first.decode(known, verify=False))
    data = [sym for i in range(s) for sym in cols[i][:k]]

    grid = encode_stripe(params, data)
    for node, row in rows.items():
        for c in range(s + 1):
            if not symbols_equal(grid.cells[node - 1][c], row[c]):
                raise DecodeError(
                    f"supplied row {node} disagrees with re-encoded stripe"
                )
    return data
