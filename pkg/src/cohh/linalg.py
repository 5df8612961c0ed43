"""Exact sparse linear algebra over Q and F_p.

Everything downstream (equalizers, cotensor products, homology) reduces to
the operations here: matrix algebra, canonical reduced row echelon form,
kernels, images, solves, and canonical subspaces.  All results are exact and
deterministic; two equal subspaces are represented by bit-identical bases.
"""

from .fields import Field, FieldMismatch, ShapeMismatch


class Matrix:
    """Immutable sparse matrix; entries stored as {(row, col): nonzero}."""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field, rows, cols, entries=None):
        self.field = field
        self.rows = rows
        self.cols = cols
        zero = field.zero()
        ent = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ShapeMismatch("entry (%d,%d) outside %dx%d" % (i, j, rows, cols))
                if v != zero:
                    ent[(i, j)] = v
        self.entries = ent

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_rows(cls, field, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ShapeMismatch("ragged rows")
            for j, v in enumerate(row):
                ent[(i, j)] = field.of(v)
        return cls(field, rows, cols, ent)

    @classmethod
    def identity(cls, field, n):
        one = field.one()
        return cls(field, n, n, {(i, i): one for i in range(n)})

    @classmethod
    def zero(cls, field, rows, cols):
        return cls(field, rows, cols, {})

    @classmethod
    def permutation(cls, field, perm):
        """Matrix sending basis vector j to basis vector perm[j]."""
        one = field.one()
        return cls(field, len(perm), len(perm), {(perm[j], j): one for j in range(len(perm))})

    # -- basics ---------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.field == other.field
                and self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))

    def __repr__(self):
        return "Matrix(%r, %dx%d, %d nonzero)" % (self.field, self.rows, self.cols, len(self.entries))

    def is_zero(self):
        return not self.entries

    def __getitem__(self, ij):
        return self.entries.get(ij, self.field.zero())

    def _check_field(self, other):
        if self.field != other.field:
            raise FieldMismatch("%r vs %r" % (self.field, other.field))

    def to_lists(self):
        z = self.field.zero()
        out = [[z] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def col(self, j):
        """Column j as a sparse {row: value} dict."""
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def row(self, i):
        return {j: v for (ii, j), v in self.entries.items() if ii == i}

    def row_dicts(self):
        out = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    # -- algebra ----------------------------------------------------------------

    def __add__(self, other):
        self._check_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("add %dx%d + %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        f = self.field
        ent = dict(self.entries)
        for ij, v in other.entries.items():
            w = f.add(ent.get(ij, f.zero()), v)
            if w == f.zero():
                ent.pop(ij, None)
            else:
                ent[ij] = w
        return Matrix(f, self.rows, self.cols, ent)

    def __neg__(self):
        f = self.field
        return Matrix(f, self.rows, self.cols, {ij: f.neg(v) for ij, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        f = self.field
        if c == f.zero():
            return Matrix.zero(f, self.rows, self.cols)
        return Matrix(f, self.rows, self.cols, {ij: f.mul(c, v) for ij, v in self.entries.items()})

    def __matmul__(self, other):
        self._check_field(other)
        if self.cols != other.rows:
            raise ShapeMismatch("mul %dx%d by %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        f = self.field
        zero = f.zero()
        brows = {}
        for (k, j), v in other.entries.items():
            brows.setdefault(k, []).append((j, v))
        acc = {}
        for (i, k), a in self.entries.items():
            for j, b in brows.get(k, ()):
                ij = (i, j)
                w = f.add(acc.get(ij, zero), f.mul(a, b))
                if w == zero:
                    acc.pop(ij, None)
                else:
                    acc[ij] = w
        return Matrix(f, self.rows, other.cols, acc)

    def transpose(self):
        return Matrix(self.field, self.cols, self.rows,
                      {(j, i): v for (i, j), v in self.entries.items()})

    def kron(self, other):
        """Kronecker product on lexicographic tensor bases, (i,j) -> i*cols_b + j."""
        self._check_field(other)
        f = self.field
        ent = {}
        for (ia, ja), a in self.entries.items():
            for (ib, jb), b in other.entries.items():
                ent[(ia * other.rows + ib, ja * other.cols + jb)] = f.mul(a, b)
        return Matrix(f, self.rows * other.rows, self.cols * other.cols, ent)

    def direct_sum(self, other):
        self._check_field(other)
        ent = dict(self.entries)
        for (i, j), v in other.entries.items():
            ent[(i + self.rows, j + self.cols)] = v
        return Matrix(self.field, self.rows + other.rows, self.cols + other.cols, ent)

    def stack(self, other):
        """Vertical stack (rows of self above rows of other)."""
        self._check_field(other)
        if self.cols != other.cols:
            raise ShapeMismatch("stack with %d vs %d columns" % (self.cols, other.cols))
        ent = dict(self.entries)
        for (i, j), v in other.entries.items():
            ent[(i + self.rows, j)] = v
        return Matrix(self.field, self.rows + other.rows, self.cols, ent)

    def hstack(self, other):
        self._check_field(other)
        if self.rows != other.rows:
            raise ShapeMismatch("hstack with %d vs %d rows" % (self.rows, other.rows))
        ent = dict(self.entries)
        for (i, j), v in other.entries.items():
            ent[(i, j + self.cols)] = v
        return Matrix(self.field, self.rows, self.cols + other.cols, ent)

    def rank(self):
        rows, _ = _rref(self.field, self.row_dicts())
        return len(rows)


def matrix_algebra(op, a, b=None):
    """Dispatch form of the basic matrix operations (mul, add, kron,
    direct_sum, transpose)."""
    if op == "transpose":
        return a.transpose()
    if b is None:
        raise ShapeMismatch("binary op %r needs two matrices" % op)
    if op == "mul":
        return a @ b
    if op == "add":
        return a + b
    if op == "kron":
        return a.kron(b)
    if op == "direct_sum":
        return a.direct_sum(b)
    raise ValueError("unknown op %r" % op)


# -- reduced row echelon form -------------------------------------------------

def _rref(field, row_dicts):
    """Incremental RREF on sparse row dicts.

    Returns (rows, pivots) with rows sorted by strictly increasing pivot
    column, each row normalized to a leading 1 and fully reduced.  The
    output is the unique RREF of the row span, hence canonical.
    """
    zero = field.zero()
    one = field.one()
    out = []  # list of (pivot_col, row_dict), kept sorted by pivot_col

    for r in row_dicts:
        r = {j: v for j, v in r.items() if v != zero}
        for pc, prow in out:
            c = r.get(pc)
            if c is None:
                continue
            # r -= c * prow
            for j, v in prow.items():
                w = field.sub(r.get(j, zero), field.mul(c, v))
                if w == zero:
                    r.pop(j, None)
                else:
                    r[j] = w
        if not r:
            continue
        lead = min(r)
        c = r[lead]
        if c != one:
            inv = field.inv(c)
            r = {j: field.mul(inv, v) for j, v in r.items()}
        # back-substitute into existing rows
        for k, (pc, prow) in enumerate(out):
            c = prow.get(lead)
            if c is None:
                continue
            new = dict(prow)
            for j, v in r.items():
                w = field.sub(new.get(j, zero), field.mul(c, v))
                if w == zero:
                    new.pop(j, None)
                else:
                    new[j] = w
            out[k] = (pc, new)
        out.append((lead, r))
        out.sort(key=lambda t: t[0])

    return [row for _, row in out], [pc for pc, _ in out]


def rref(matrix):
    """Canonical RREF of a matrix, with its pivot columns."""
    rows, pivots = _rref(matrix.field, matrix.row_dicts())
    ent = {}
    for i, r in enumerate(rows):
        for j, v in r.items():
            ent[(i, j)] = v
    return Matrix(matrix.field, len(rows), matrix.cols, ent), pivots


def solve(a, target):
    """A deterministic solution x of a @ x = target, or None.

    Free variables are set to zero under the canonical pivot order; None is
    returned iff some column of ``target`` is outside the column span of
    ``a``.
    """
    if a.field != target.field:
        raise FieldMismatch("%r vs %r" % (a.field, target.field))
    if a.rows != target.rows:
        raise ShapeMismatch("solve with %d vs %d rows" % (a.rows, target.rows))
    aug = a.hstack(target)
    rows, pivots = _rref(aug.field, aug.row_dicts())
    ent = {}
    for pc, r in zip(pivots, rows):
        if pc >= a.cols:
            return None  # pivot in the augmented block: inconsistent
        for j, v in r.items():
            if j >= a.cols:
                ent[(pc, j - a.cols)] = v
    return Matrix(a.field, a.cols, target.cols, ent)


def invert(a):
    """Inverse of a square matrix, or None if singular."""
    if a.rows != a.cols:
        raise ShapeMismatch("invert %dx%d" % (a.rows, a.cols))
    x = solve(a, Matrix.identity(a.field, a.rows))
    if x is None:
        return None
    if (a @ x) != Matrix.identity(a.field, a.rows):
        return None
    return x


# -- canonical subspaces ------------------------------------------------------

class Subspace:
    """A subspace of k^n, stored as the canonical RREF basis (rows)."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field, ambient_dim, spanning_rows):
        """``spanning_rows``: a Matrix whose rows span the space."""
        self.field = field
        self.ambient_dim = ambient_dim
        if spanning_rows.cols != ambient_dim:
            raise ShapeMismatch("spanning rows have %d cols, ambient %d"
                                % (spanning_rows.cols, ambient_dim))
        self.basis, self.pivots = rref(spanning_rows)

    @classmethod
    def full(cls, field, n):
        return cls(field, n, Matrix.identity(field, n))

    @classmethod
    def zero(cls, field, n):
        return cls(field, n, Matrix.zero(field, 0, n))

    @property
    def dim(self):
        return self.basis.rows

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.field == other.field
                and self.ambient_dim == other.ambient_dim and self.basis == other.basis)

    def __repr__(self):
        return "Subspace(dim %d of k^%d)" % (self.dim, self.ambient_dim)

    def inclusion(self):
        """ambient_dim x dim matrix whose columns are the basis vectors."""
        return self.basis.transpose()

    def coords(self, vectors):
        """Express ambient column vectors in basis coordinates; None if any
        column is not in the subspace."""
        return solve(self.inclusion(), vectors)

    def contains_vector(self, column):
        return self.coords(column) is not None

    def contains(self, other):
        return self.coords(other.inclusion()) is not None

    def intersection(self, other):
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.ambient_dim)
        # vectors u*self.basis = w*other.basis: kernel of [basis^T | -basis^T]
        m = self.inclusion().hstack(-other.inclusion())
        k = kernel(m)
        coeffs = Matrix(self.field, k.basis.rows, self.dim,
                        {(i, j): v for (i, j), v in k.basis.entries.items() if j < self.dim})
        return Subspace(self.field, self.ambient_dim, coeffs @ self.basis)

    def sum(self, other):
        self._check(other)
        return Subspace(self.field, self.ambient_dim, self.basis.stack(other.basis))

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch("%r vs %r" % (self.field, other.field))
        if self.ambient_dim != other.ambient_dim:
            raise ShapeMismatch("ambient %d vs %d" % (self.ambient_dim, other.ambient_dim))


def kernel(matrix):
    """ker(matrix) as a canonical subspace of k^cols."""
    field = matrix.field
    rows, pivots = _rref(field, matrix.row_dicts())
    pivot_set = set(pivots)
    free = [j for j in range(matrix.cols) if j not in pivot_set]
    ent = {}
    one = field.one()
    for r, fcol in enumerate(free):
        ent[(r, fcol)] = one
        for pc, row in zip(pivots, rows):
            v = row.get(fcol)
            if v is not None:
                ent[(r, pc)] = field.neg(v)
    return Subspace(field, matrix.cols, Matrix(field, len(free), matrix.cols, ent))


def image(matrix):
    """Column span of ``matrix`` as a canonical subspace of k^rows."""
    return Subspace(matrix.field, matrix.rows, matrix.transpose())


def quotient_basis(sub, ambient):
    """Basis of ambient/sub: (representatives Subspace, projection Matrix).

    ``ambient`` may be a Subspace or None for the full space.  The
    projection maps ambient coordinates to coordinates in the chosen coset
    representatives; projection o inclusion(sub) = 0.
    """
    field = sub.field
    n = sub.ambient_dim
    if ambient is None:
        ambient = Subspace.full(field, n)
    sub._check(ambient)
    if not ambient.contains(sub):
        raise ShapeMismatch("quotient by a non-subspace")
    # greedily extend sub's basis by ambient basis rows, then by standard
    # vectors, to a full basis of k^n
    reps = []
    reduced, _ = _rref(field, sub.basis.row_dicts())
    one = field.one()
    candidates = ambient.basis.row_dicts() + [{j: one} for j in range(n)]
    for cand in candidates:
        trial, _ = _rref(field, reduced + [cand])
        if len(trial) > len(reduced):
            reduced = trial
            reps.append(cand)
    # split representatives: first (ambient.dim - sub.dim) lie in ambient
    quot = reps[:ambient.dim - sub.dim]
    fill = reps[ambient.dim - sub.dim:]
    order = sub.basis.row_dicts() + quot + fill
    ent = {}
    for i, r in enumerate(order):
        for j, v in r.items():
            ent[(i, j)] = v
    full = Matrix(field, n, n, ent)
    inv = invert(full.transpose())
    assert inv is not None
    lo, hi = sub.dim, sub.dim + len(quot)
    proj = Matrix(field, len(quot), n,
                  {(i - lo, j): v for (i, j), v in inv.entries.items() if lo <= i < hi})
    rep_rows = Matrix(field, len(quot), n,
                      {(i, j): v for i, r in enumerate(quot) for j, v in r.items()})
    return Subspace(field, n, rep_rows), proj


def subspace_calculus(op, a, b=None):
    """Dispatch form: kernel/image take a Matrix; intersection/sum take two
    Subspaces; quotient_basis takes (sub, ambient-or-None)."""
    if op == "kernel":
        return kernel(a)
    if op == "image":
        return image(a)
    if op == "intersection":
        return a.intersection(b)
    if op == "sum":
        return a.sum(b)
    if op == "quotient_basis":
        return quotient_basis(a, b)
    raise ValueError("unknown op %r" % op)


def restrict_map(a, source, target):
    """Matrix of ``a`` restricted to ``source`` and corestricted to
    ``target`` (both Subspaces of the ambient domain/codomain of ``a``);
    None if the image does not lie in ``target``."""
    return target.coords(a @ source.inclusion())


def format_combination(coords, labels, field):
    """Human form of a vector: '2*g + h', 'E11 + E22', 'g - h', '0'."""
    terms = []
    zero = field.zero()
    one = field.one()
    minus_one = field.neg(one)
    for i, label in enumerate(labels):
        c = coords.get(i, zero) if isinstance(coords, dict) else coords[i]
        if c == zero:
            continue
        if c == one:
            terms.append((False, label))
        elif field.p is None and c == minus_one:
            terms.append((True, label))
        elif field.p is None and c < 0:
            terms.append((True, "%s*%s" % (field.to_str(-c), label)))
        else:
            terms.append((False, "%s*%s" % (field.to_str(c), label)))
    if not terms:
        return "0"
    out = []
    for k, (neg, text) in enumerate(terms):
        if k == 0:
            out.append("-" + text if neg else text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out)
