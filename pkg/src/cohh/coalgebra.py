"""Finite-dimensional coalgebras over an exact field.

A coalgebra is stored by structure constants: ``comul`` is the dim^2 x dim
matrix whose column k holds Delta(e_k) in the lexicographic e_i (x) e_j
basis, and ``counit`` is 1 x dim.  Validation enforces coassociativity and
the counit laws exactly; everything downstream may assume them.
"""

from .fields import FieldMismatch, ShapeMismatch
from .linalg import Matrix, Subspace, kernel, quotient_basis


class NotCoassociative(Exception):
    def __init__(self, witness):
        super().__init__("coassociativity fails on basis element %r" % (witness,))
        self.witness = witness


class CounitFailure(Exception):
    def __init__(self, witness):
        super().__init__("counit law fails on basis element %r" % (witness,))
        self.witness = witness


class DuplicateLabel(Exception):
    pass


def tau(field, da, db):
    """Swap matrix X (x) Y -> Y (x) X on lexicographic tensor bases."""
    ent = {}
    one = field.one()
    for a in range(da):
        for b in range(db):
            ent[(b * da + a, a * db + b)] = one
    return Matrix(field, da * db, da * db, ent)


def tensor_labels(la, lb):
    return ["%s(x)%s" % (a, b) for a in la for b in lb]


class FinCoalgebra:
    """(C, Delta, epsilon) on a labeled basis; valid after construction."""

    def __init__(self, field, labels, comul, counit):
        if len(set(labels)) != len(labels):
            raise DuplicateLabel("repeated basis label")
        self.field = field
        self.labels = list(labels)
        self.dim = len(labels)
        if comul.field != field or counit.field != field:
            raise FieldMismatch("structure constants over the wrong field")
        if comul.rows != self.dim ** 2 or comul.cols != self.dim:
            raise ShapeMismatch("comul must be dim^2 x dim")
        if counit.rows != 1 or counit.cols != self.dim:
            raise ShapeMismatch("counit must be 1 x dim")
        self.comul = comul
        self.counit = counit
        self._validate()

    def _validate(self):
        d = self.dim
        f = self.field
        i_c = Matrix.identity(f, d)
        left = self.comul.kron(i_c) @ self.comul    # (Delta (x) id) Delta
        right = i_c.kron(self.comul) @ self.comul   # (id (x) Delta) Delta
        if left != right:
            diff = left - right
            bad = min(j for (_, j) in diff.entries)
            raise NotCoassociative(self.labels[bad])
        l_law = self.counit.kron(i_c) @ self.comul  # (eps (x) id) Delta
        r_law = i_c.kron(self.counit) @ self.comul
        ident = Matrix.identity(f, d)
        for law in (l_law, r_law):
            if law != ident:
                diff = law - ident
                bad = min(j for (_, j) in diff.entries)
                raise CounitFailure(self.labels[bad])

    # -- queries ---------------------------------------------------------------

    def is_cocommutative(self):
        return self.comul == tau(self.field, self.dim, self.dim) @ self.comul

    def __eq__(self, other):
        return (isinstance(other, FinCoalgebra) and self.field == other.field
                and self.labels == other.labels and self.comul == other.comul
                and self.counit == other.counit)

    def __repr__(self):
        return "FinCoalgebra(dim %d: %s)" % (self.dim, ", ".join(self.labels))

    def is_trivial(self):
        """Is this the one-dimensional coalgebra k?"""
        return self.dim == 1


def validate_coalgebra(field, labels, comul, counit):
    """Construct-and-check; raises NotCoassociative/CounitFailure with a
    witness basis element on invalid input."""
    return FinCoalgebra(field, labels, comul, counit)


def opposite(c):
    """Comultiplication composed with the swap; an involution."""
    return FinCoalgebra(c.field, c.labels, tau(c.field, c.dim, c.dim) @ c.comul, c.counit)


def tensor_coalgebra(c, d):
    """C (x) D with Delta = (id (x) tau (x) id)(Delta_C (x) Delta_D)."""
    if c.field != d.field:
        raise FieldMismatch("tensor of coalgebras over different fields")
    f = c.field
    mid = Matrix.identity(f, c.dim).kron(tau(f, c.dim, d.dim)).kron(Matrix.identity(f, d.dim))
    comul = mid @ c.comul.kron(d.comul)
    counit = c.counit.kron(d.counit)
    return FinCoalgebra(f, tensor_labels(c.labels, d.labels), comul, counit)


def grouplike(labels, field):
    """Pointed cosemisimple family: Delta(g) = g (x) g, eps(g) = 1."""
    n = len(labels)
    one = field.one()
    comul = Matrix(field, n * n, n, {(k * n + k, k): one for k in range(n)})
    counit = Matrix(field, 1, n, {(0, k): one for k in range(n)})
    return FinCoalgebra(field, labels, comul, counit)


def trivial_coalgebra(field, label="1"):
    return grouplike([label], field)


def comatrix_labels(n):
    if n <= 9:
        return ["E%d%d" % (i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    return ["E%d_%d" % (i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


def comatrix_coalgebra(n, field, c=None):
    """M_n^c(k): Delta(E_ij) = sum_l E_il (x) E_lj, eps(E_ij) = [i = j];
    with ``c`` given, M_n^c(C) = C (x) M_n^c(k)."""
    if n < 1:
        raise ShapeMismatch("comatrix size must be >= 1")
    one = field.one()
    dim = n * n
    ent = {}
    for i in range(n):
        for j in range(n):
            col = i * n + j
            for l in range(n):
                row = (i * n + l) * dim + (l * n + j)
                ent[(row, col)] = one
    comul = Matrix(field, dim * dim, dim, ent)
    counit = Matrix(field, 1, dim, {(0, i * n + i): one for i in range(n)})
    mat = FinCoalgebra(field, comatrix_labels(n), comul, counit)
    if c is None:
        return mat
    return tensor_coalgebra(c, mat)


# -- the dual algebra and its zeroth Hochschild homology -----------------------

class AlgebraDual:
    """C* with multiplication (f.g)(x) = sum f(x_(1)) g(x_(2))."""

    def __init__(self, coalgebra):
        c = coalgebra
        self.field = c.field
        self.dim = c.dim
        self.labels = ["%s*" % l for l in c.labels]
        self.mult = c.comul.transpose()   # dim x dim^2
        self.unit = c.counit.transpose()  # dim x 1
        self._validate()

    def _validate(self):
        f, d = self.field, self.dim
        i_d = Matrix.identity(f, d)
        assoc_l = self.mult @ self.mult.kron(i_d)
        assoc_r = self.mult @ i_d.kron(self.mult)
        assert assoc_l == assoc_r, "dual multiplication not associative"
        assert self.mult @ self.unit.kron(i_d) == i_d, "left unit law fails"
        assert self.mult @ i_d.kron(self.unit) == i_d, "right unit law fails"

    def product(self, fvec, gvec):
        """Product of two column vectors of coefficients."""
        return self.mult @ fvec.kron(gvec)


def dual_algebra(c):
    return AlgebraDual(c)


class HH0Result:
    """HH_0(A) = A/[A,A]: commutator span, chosen representatives, and the
    universal trace (the projection onto those representatives)."""

    def __init__(self, commutators, representatives, universal_trace):
        self.commutators = commutators
        self.representatives = representatives
        self.universal_trace = universal_trace
        self.dim = representatives.dim


def hh0_of_algebra(a):
    f, d = a.field, a.dim
    one = f.one()
    comms = []
    for i in range(d):
        ei = Matrix(f, d, 1, {(i, 0): one})
        for j in range(i + 1, d):
            ej = Matrix(f, d, 1, {(j, 0): one})
            v = a.product(ei, ej) - a.product(ej, ei)
            comms.append({k: val for (k, _), val in v.entries.items()})
    ent = {(r, k): val for r, row in enumerate(comms) for k, val in row.items()}
    span = Subspace(f, d, Matrix(f, len(comms), d, ent))
    reps, proj = quotient_basis(span, None)
    return HH0Result(span, reps, proj)


def cohh0(c):
    """The cocommutator subspace <<C>> = ker(Delta - tau Delta), the
    universal home of cotraces; its inclusion into C is .inclusion()."""
    t = tau(c.field, c.dim, c.dim)
    return kernel(c.comul - t @ c.comul)
