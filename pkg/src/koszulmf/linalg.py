"""Exact linear algebra over Q for finite (co)chain complexes.

Everything here works with `fractions.Fraction` coefficients, so ranks,
kernels and homology are exact.  Matrices are sparse (dict keyed by
(row, col)); reduction uses a fixed pivoting rule so that repeated runs
produce identical output.

The main consumers are the bigraded pieces of the operator algebra and
the zonotope cell complex, both of which are small enough that dense
fallbacks are never needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class NotAComplex(ValueError):
    """Raised when consecutive maps do not compose to zero."""


class SparseMatrix:
    """Immutable-by-convention sparse matrix over Q.

    Entries are stored as a dict {(row, col): Fraction} holding only
    nonzeros.  Construction copies and drops explicit zeros.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimensions")
        self.rows = rows
        self.cols = cols
        cleaned = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ValueError(f"entry ({r},{c}) out of range")
                v = Fraction(v)
                if v:
                    cleaned[(r, c)] = v
        self.entries = cleaned

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def from_rows(cls, rows_data):
        """Build from a list of row lists (dense input, e.g. in tests)."""
        nrows = len(rows_data)
        ncols = len(rows_data[0]) if rows_data else 0
        entries = {}
        for r, row in enumerate(rows_data):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for c, v in enumerate(row):
                v = Fraction(v)
                if v:
                    entries[(r, c)] = v
        return cls(nrows, ncols, entries)

    @classmethod
    def from_columns(cls, nrows, columns):
        """Build from a list of sparse columns (dict row -> value)."""
        entries = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                v = Fraction(v)
                if v:
                    entries[(r, c)] = v
        return cls(nrows, len(columns), entries)

    def get(self, r, c):
        return self.entries.get((r, c), ZERO)

    def column(self, c):
        return {r: v for (r, cc), v in self.entries.items() if cc == c}

    def columns(self):
        cols = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def row_dicts(self):
        rows = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def transpose(self):
        return SparseMatrix(
            self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()}
        )

    def __mul__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        by_row = {}
        for (r, c), v in self.entries.items():
            by_row.setdefault(r, {})[c] = v
        other_rows = {}
        for (r, c), v in other.entries.items():
            other_rows.setdefault(r, {})[c] = v
        entries = {}
        for r, row in by_row.items():
            acc = {}
            for k, v in row.items():
                orow = other_rows.get(k)
                if not orow:
                    continue
                for c, w in orow.items():
                    acc[c] = acc.get(c, ZERO) + v * w
            for c, total in acc.items():
                if total:
                    entries[(r, c)] = total
        return SparseMatrix(self.rows, other.cols, entries)

    def __add__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in matrix sum")
        entries = dict(self.entries)
        for key, v in other.entries.items():
            entries[key] = entries.get(key, ZERO) + v
        return SparseMatrix(self.rows, self.cols, entries)

    def __sub__(self, other):
        return self + other.scale(Fraction(-1))

    def scale(self, a):
        a = Fraction(a)
        return SparseMatrix(
            self.rows, self.cols, {k: a * v for k, v in self.entries.items()}
        )

    def apply(self, vec):
        """Apply to a sparse vector (dict index -> Fraction)."""
        out = {}
        for (r, c), v in self.entries.items():
            x = vec.get(c)
            if x:
                out[r] = out.get(r, ZERO) + v * x
        return {r: v for r, v in out.items() if v}

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        raise TypeError("SparseMatrix is not hashable")

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _rref_rows(row_dicts, ncols):
    """Reduced row echelon form of a list of sparse rows, in place.

    Pivots are chosen deterministically: columns are scanned in
    ascending order and the first remaining row with a nonzero entry in
    the column becomes the pivot.  Returns the list of pivot columns;
    after the call row i (for i < rank) is the row with pivot column
    pivots[i], normalized to a leading 1 and fully back-eliminated.
    """
    pivots = []
    nrows = len(row_dicts)
    cur = 0
    for col in range(ncols):
        sel = None
        for r in range(cur, nrows):
            if row_dicts[r].get(col):
                sel = r
                break
        if sel is None:
            continue
        row_dicts[cur], row_dicts[sel] = row_dicts[sel], row_dicts[cur]
        piv = row_dicts[cur]
        inv = ONE / piv[col]
        if inv != 1:
            for k in list(piv):
                piv[k] *= inv
        for r in range(nrows):
            if r == cur:
                continue
            factor = row_dicts[r].get(col)
            if not factor:
                continue
            target = row_dicts[r]
            for k, v in piv.items():
                newv = target.get(k, ZERO) - factor * v
                if newv:
                    target[k] = newv
                else:
                    target.pop(k, None)
        pivots.append(col)
        cur += 1
        if cur == nrows:
            break
    return pivots


def reduce(matrix):
    """Echelon data of a matrix: (rank, kernel_basis, pivot_columns).

    The kernel basis is the standard one read off the reduced row
    echelon form: one vector per free column f, with entry 1 at f and
    -R[i, f] at the i-th pivot column.  Vectors are returned as dense
    lists of Fractions, ordered by ascending free column, so the output
    is canonical (RREF is unique).
    """
    rows = matrix.row_dicts()
    pivots = _rref_rows(rows, matrix.cols)
    rank = len(pivots)
    pivot_set = set(pivots)
    kernel = []
    for f in range(matrix.cols):
        if f in pivot_set:
            continue
        vec = [ZERO] * matrix.cols
        vec[f] = ONE
        for i, p in enumerate(pivots):
            coef = rows[i].get(f)
            if coef:
                vec[p] = -coef
        kernel.append(vec)
    return rank, kernel, list(pivots)


@dataclass
class ChainComplexPiece:
    """A bounded complex of Q-vector spaces.

    dims[i] is the dimension of the i-th space and maps[i] sends space i
    to space i+1 (so maps[i] has shape dims[i+1] x dims[i]).  Whether
    the index is a chain or cochain degree is up to the caller.
    """

    dims: list
    maps: list

    def __post_init__(self):
        if len(self.maps) != max(len(self.dims) - 1, 0):
            raise ValueError("need exactly len(dims)-1 maps")
        for i, m in enumerate(self.maps):
            if (m.rows, m.cols) != (self.dims[i + 1], self.dims[i]):
                raise ValueError(f"map {i} has shape {m.rows}x{m.cols}, "
                                 f"expected {self.dims[i + 1]}x{self.dims[i]}")

    def check_composes_to_zero(self):
        for i in range(len(self.maps) - 1):
            if not (self.maps[i + 1] * self.maps[i]).is_zero():
                raise NotAComplex(f"d o d != 0 between degrees {i} and {i + 2}")


def homology_ranks(piece):
    """Homology dimensions of a bounded complex, one per degree.

    Raises NotAComplex when consecutive maps fail to compose to zero.
    """
    piece.check_composes_to_zero()
    ranks = [reduce(m)[0] for m in piece.maps]
    out = []
    for i, dim in enumerate(piece.dims):
        r_out = ranks[i] if i < len(ranks) else 0
        r_in = ranks[i - 1] if i > 0 else 0
        out.append(dim - r_out - r_in)
    return out


@dataclass
class Contraction:
    """Contraction data (i, p, h) of a bounded complex onto its homology.

    Per degree k: inject[k] maps homology coordinates into space k,
    project[k] goes the other way, and homotopy[k] maps space k to space
    k-1 (homotopy[0] is the zero map).  The five identities

        p i = 1,  d h + h d = 1 - i p,  h i = 0,  p h = 0,  h h = 0

    hold exactly; tests verify them by matrix multiplication.
    """

    piece: ChainComplexPiece
    homology_dims: list
    inject: list
    project: list
    homotopy: list


def _extend_in_order(base_cols, nrows, candidates):
    """Greedily extend independent columns by candidates, in order.

    Returns the indices of accepted candidates.  Membership is tested by
    incremental elimination, so the result is deterministic.
    """
    reduced = []  # list of (pivot_row, column dict with leading 1)
    def absorb(col):
        col = dict(col)
        for prow, pcol in reduced:
            f = col.get(prow)
            if f:
                for r, v in pcol.items():
                    newv = col.get(r, ZERO) - f * v
                    if newv:
                        col[r] = newv
                    else:
                        col.pop(r, None)
        if not col:
            return False
        prow = min(col)
        inv = ONE / col[prow]
        if inv != 1:
            col = {r: v * inv for r, v in col.items()}
        reduced.append((prow, col))
        return True

    for col in base_cols:
        if not absorb(col):
            raise ValueError("base columns are dependent")
    accepted = []
    for idx, col in enumerate(candidates):
        if absorb(col):
            accepted.append(idx)
    return accepted


def _invert(matrix):
    """Inverse of a square SparseMatrix via augmented reduction."""
    n = matrix.rows
    rows = matrix.row_dicts()
    aug = [dict(row) for row in rows]
    for r in range(n):
        aug[r][n + r] = ONE
    pivots = _rref_rows(aug, 2 * n)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    entries = {}
    for r in range(n):
        for c, v in aug[r].items():
            if c >= n and v:
                entries[(r, c - n)] = v
    return SparseMatrix(n, n, entries)


def build_contraction(piece, forced=None):
    """Deterministic contraction of a bounded complex onto its homology.

    Per degree the space is split as im(d) + harmonic + complement:
    the image basis consists of d applied to the standard basis vectors
    at the pivot columns one degree down, the harmonic basis extends it
    inside ker(d) by scanning the canonical kernel basis in order, and
    the complement is spanned by the standard basis vectors at the pivot
    columns of the outgoing map.  h inverts d from the complement onto
    the image and vanishes elsewhere; a final h -> h d h pass enforces
    the side conditions (a no-op for this splitting, kept to match the
    documented construction).

    forced, if given, maps a degree to a list of sparse columns (dict
    row -> Fraction) to use as the leading harmonic representatives at
    that degree.  Forced columns must be cycles independent of the
    image, else ValueError.
    """
    piece.check_composes_to_zero()
    forced = forced or {}
    ndeg = len(piece.dims)
    # Echelon data of every map.
    red = []
    for m in piece.maps:
        rank, kernel, pivots = reduce(m)
        red.append({"rank": rank, "kernel": kernel, "pivots": pivots, "mat": m})
    inject, project, homotopy = [], [], []
    hdims = []
    im_data = []  # per degree: list of (source pivot column, image column dict)
    for k in range(ndeg):
        dim = piece.dims[k]
        if k > 0:
            below = red[k - 1]
            im_cols = [
                (c, below["mat"].column(c)) for c in below["pivots"]
            ]
        else:
            im_cols = []
        im_data.append(im_cols)
        if k < ndeg - 1:
            here = red[k]
            kernel_cols = [
                {i: v for i, v in enumerate(vec) if v} for vec in here["kernel"]
            ]
            compl_cols = [c for c in here["pivots"]]
        else:
            kernel_cols = [{i: ONE} for i in range(dim)]
            compl_cols = []
        base = [col for _, col in im_cols]
        forced_cols = [
            {r: Fraction(v) for r, v in col.items() if v}
            for col in forced.get(k, [])
        ]
        if k < ndeg - 1:
            for col in forced_cols:
                if piece.maps[k].apply(col):
                    raise ValueError(f"forced column at degree {k} is not a cycle")
        try:
            harm_idx = _extend_in_order(base + forced_cols, dim, kernel_cols)
        except ValueError:
            raise ValueError(
                f"forced columns at degree {k} are dependent with the image"
            )
        harm_cols = forced_cols + [kernel_cols[i] for i in harm_idx]
        hdims.append(len(harm_cols))
        # Assemble the square change of basis [im | harm | compl].
        columns = base + harm_cols + [{c: ONE} for c in compl_cols]
        if len(columns) != dim:
            raise ValueError("splitting does not span the space")
        basis = SparseMatrix.from_columns(dim, columns)
        inv = _invert(basis) if dim else SparseMatrix.zero(0, 0)
        n_im = len(base)
        n_h = len(harm_cols)
        inject.append(
            SparseMatrix.from_columns(dim, harm_cols)
            if n_h
            else SparseMatrix.zero(dim, 0)
        )
        proj_entries = {
            (r - n_im, c): v
            for (r, c), v in inv.entries.items()
            if n_im <= r < n_im + n_h
        }
        project.append(SparseMatrix(n_h, dim, proj_entries))
        if k == 0:
            homotopy.append(SparseMatrix.zero(0, dim))
        else:
            # h sends the im-coordinate i back to the source pivot column.
            prev_dim = piece.dims[k - 1]
            inv_rows = inv.row_dicts()
            h_entries = {}
            for i, (src_col, _) in enumerate(im_data[k]):
                for c, v in inv_rows[i].items():
                    h_entries[(src_col, c)] = v
            homotopy.append(SparseMatrix(prev_dim, dim, h_entries))
    # Side conditions via h -> h d h.
    massaged = list(homotopy)
    for k in range(1, ndeg):
        # (h d h)_k = h_k o d_{k-1} o h_k
        massaged[k] = homotopy[k] * piece.maps[k - 1] * homotopy[k]
    return Contraction(piece, hdims, inject, project, massaged)


class LinSolver:
    """Repeated exact solves against a fixed sparse column set.

    The columns are mutually reduced once, with the change of basis
    recorded, so that solve(rhs) can express rhs in terms of the
    *original* columns.  solve returns (coefficients, ok); ok is False
    when rhs lies outside the span.  Used for the per-piece homotopy and
    projection of the operator complex, where one system is solved for
    many right-hand sides.
    """

    __slots__ = ("ncols", "_pivrows", "_cols", "_exprs")

    def __init__(self, columns):
        self.ncols = len(columns)
        self._pivrows = []
        self._cols = []   # reduced columns: 1 at own pivot row, 0 at the others
        self._exprs = []  # reduced column j = sum_i exprs[j][i] * original column i
        for idx, col in enumerate(columns):
            col = {r: Fraction(v) for r, v in col.items() if v}
            expr = {idx: ONE}
            for prow, stored, sexpr in zip(self._pivrows, self._cols, self._exprs):
                f = col.get(prow)
                if f:
                    _axpy(col, stored, -f)
                    _axpy(expr, sexpr, -f)
            if not col:
                raise ValueError("dependent column passed to LinSolver")
            prow = min(col)
            inv = ONE / col[prow]
            if inv != 1:
                col = {r: v * inv for r, v in col.items()}
                expr = {r: v * inv for r, v in expr.items()}
            for stored, sexpr in zip(self._cols, self._exprs):
                f = stored.get(prow)
                if f:
                    _axpy(stored, col, -f)
                    _axpy(sexpr, expr, -f)
            self._pivrows.append(prow)
            self._cols.append(col)
            self._exprs.append(expr)

    def solve(self, rhs):
        vec = {r: Fraction(v) for r, v in rhs.items() if v}
        out = {}
        for prow, col, expr in zip(self._pivrows, self._cols, self._exprs):
            f = vec.get(prow)
            if f:
                _axpy(vec, col, -f)
                _axpy(out, expr, f)
        coefs = [ZERO] * self.ncols
        for i, v in out.items():
            coefs[i] = v
        return coefs, not vec


def _axpy(target, source, factor):
    """target += factor * source for sparse dict vectors, dropping zeros."""
    for k, v in source.items():
        newv = target.get(k, ZERO) + factor * v
        if newv:
            target[k] = newv
        else:
            target.pop(k, None)
