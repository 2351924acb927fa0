"""Exact linear algebra over the rationals, prime fields, and Laurent rings.

All arithmetic is exact: rationals are ``fractions.Fraction``, prime-field
elements are ints in ``[0, p)``, Laurent polynomials are dicts from integer
exponent vectors to rational coefficients.  No floating point anywhere.

Conventions
-----------
* A ``Mat`` of shape (nrows, ncols) represents a linear map acting on the
  right of row vectors when used as an operator: ``image = v * M``.
* ``solve(A, b)`` solves ``A @ x = b`` (column unknowns), per-column.
* ``Subspace`` bases are stored in reduced row echelon form, so two equal
  subspaces have identical bases.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple


class LinalgError(ValueError):
    """Raised for shape mismatches, non-field division, malformed scalars."""


# Density below which a matrix is stored as a dict of nonzero entries.
# Config knob only; it never affects any computed result.
SPARSE_THRESHOLD = 0.25


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Rationals:
    """The field of rational numbers; elements are Fraction."""

    kind = "rational"
    is_field = True

    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in QQ")
        return a / b

    def inv(self, a):
        return self.div(self.one, a)

    def from_int(self, n: int):
        return Fraction(n)

    def parse(self, s):
        if isinstance(s, bool):
            raise LinalgError("boolean is not a rational scalar")
        if isinstance(s, int):
            return Fraction(s)
        if isinstance(s, Fraction):
            return s
        if isinstance(s, str):
            try:
                return Fraction(s)
            except (ValueError, ZeroDivisionError) as exc:
                raise LinalgError(f"cannot parse rational scalar {s!r}") from exc
        raise LinalgError(f"cannot parse rational scalar {s!r}")

    def fmt(self, a) -> str:
        return str(a)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")


QQ = Rationals()


class PrimeField:
    """The field with p elements; elements are ints in [0, p)."""

    kind = "prime"
    is_field = True

    _cache: Dict[int, "PrimeField"] = {}

    def __new__(cls, p: int):
        if p in cls._cache:
            return cls._cache[p]
        if not _is_prime(p):
            raise LinalgError(f"{p} is not prime")
        self = super().__new__(cls)
        self.p = p
        self.zero = 0
        self.one = 1 % p
        cls._cache[p] = self
        return self

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def from_int(self, n: int):
        return n % self.p

    def parse(self, s):
        if isinstance(s, bool):
            raise LinalgError("boolean is not a prime-field scalar")
        if isinstance(s, int):
            return s % self.p
        if isinstance(s, str):
            try:
                return int(s) % self.p
            except ValueError:
                # allow "a/b" with invertible b
                if "/" in s:
                    num, den = s.split("/", 1)
                    return self.div(int(num) % self.p, int(den) % self.p)
                raise LinalgError(f"cannot parse GF({self.p}) scalar {s!r}")
        raise LinalgError(f"cannot parse GF({self.p}) scalar {s!r}")

    def fmt(self, a) -> str:
        return str(a % self.p)

    def __repr__(self):
        return f"GF({self.p})"


def GF(p: int) -> PrimeField:
    return PrimeField(p)


class LaurentPoly:
    """A Laurent polynomial: dict from integer exponent tuples to Fraction."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Tuple[int, ...], Fraction]):
        self.terms = {e: c for e, c in terms.items() if c != 0}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for exps in sorted(self.terms):
            bits.append(f"{self.terms[exps]}*x^{list(exps)}")
        return " + ".join(bits)


class LaurentRing:
    """Multivariate Laurent polynomials over QQ.  Not a field: no rref/solve."""

    kind = "laurent"
    is_field = False

    def __init__(self, names: Sequence[str]):
        if not names:
            raise LinalgError("Laurent ring needs at least one variable")
        self.names = tuple(names)
        self.nvars = len(self.names)
        self.zero = LaurentPoly({})
        self.one = LaurentPoly({(0,) * self.nvars: Fraction(1)})

    def monomial(self, exps: Sequence[int], coeff=Fraction(1)) -> LaurentPoly:
        if len(exps) != self.nvars:
            raise LinalgError("exponent vector length mismatch")
        return LaurentPoly({tuple(int(e) for e in exps): Fraction(coeff)})

    def add(self, a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return LaurentPoly(terms)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a: LaurentPoly) -> LaurentPoly:
        return LaurentPoly({e: -c for e, c in a.terms.items()})

    def mul(self, a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
        terms: Dict[Tuple[int, ...], Fraction] = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                terms[e] = terms.get(e, Fraction(0)) + ca * cb
        return LaurentPoly(terms)

    def from_int(self, n: int) -> LaurentPoly:
        return LaurentPoly({(0,) * self.nvars: Fraction(n)})

    def parse(self, s) -> LaurentPoly:
        """Parse a term list [[exps, coeff], ...]; ints/strs become constants."""
        if isinstance(s, LaurentPoly):
            return s
        if isinstance(s, bool):
            raise LinalgError("boolean is not a Laurent scalar")
        if isinstance(s, int):
            return self.from_int(s)
        if isinstance(s, str):
            return LaurentPoly({(0,) * self.nvars: Fraction(s)})
        if isinstance(s, (list, tuple)):
            terms: Dict[Tuple[int, ...], Fraction] = {}
            for item in s:
                if not (isinstance(item, (list, tuple)) and len(item) == 2):
                    raise LinalgError(f"Laurent term must be [exps, coeff]: {item!r}")
                exps, coeff = item
                if len(exps) != self.nvars:
                    raise LinalgError(
                        f"Laurent term exponent vector {exps!r} has wrong length"
                    )
                e = tuple(int(x) for x in exps)
                terms[e] = terms.get(e, Fraction(0)) + Fraction(str(coeff))
            return LaurentPoly(terms)
        raise LinalgError(f"cannot parse Laurent scalar {s!r}")

    def fmt(self, a: LaurentPoly):
        return [[list(e), str(c)] for e, c in sorted(a.terms.items())]

    def __repr__(self):
        return f"Laurent({','.join(self.names)})"

    def __eq__(self, other):
        return isinstance(other, LaurentRing) and self.names == other.names

    def __hash__(self):
        return hash(("laurent", self.names))


def _is_zero(ring, x) -> bool:
    if ring.kind == "laurent":
        return x.is_zero()
    return x == ring.zero


class Mat:
    """Immutable exact matrix over a ring, dense or sparse storage.

    Storage is an implementation detail chosen by density at construction;
    it never changes semantics.
    """

    __slots__ = ("ring", "nrows", "ncols", "_dense", "_sparse")

    def __init__(self, ring, nrows, ncols, dense=None, sparse=None):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self._dense = dense
        self._sparse = sparse

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rows(cls, ring, rows: Sequence[Sequence]) -> "Mat":
        rows = [list(r) for r in rows]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise LinalgError("ragged rows")
        items = {}
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                if not _is_zero(ring, v):
                    items[(i, j)] = v
        return cls._build(ring, nrows, ncols, items)

    @classmethod
    def from_entries(cls, ring, nrows, ncols, items: Dict[Tuple[int, int], object]) -> "Mat":
        items = {k: v for k, v in items.items() if not _is_zero(ring, v)}
        return cls._build(ring, nrows, ncols, items)

    @classmethod
    def zeros(cls, ring, nrows, ncols) -> "Mat":
        return cls._build(ring, nrows, ncols, {})

    @classmethod
    def identity(cls, ring, n) -> "Mat":
        return cls._build(ring, n, n, {(i, i): ring.one for i in range(n)})

    @classmethod
    def _build(cls, ring, nrows, ncols, items: Dict[Tuple[int, int], object]) -> "Mat":
        size = nrows * ncols
        if size and len(items) / size < SPARSE_THRESHOLD:
            return cls(ring, nrows, ncols, sparse=dict(items))
        dense = [[ring.zero] * ncols for _ in range(nrows)]
        for (i, j), v in items.items():
            dense[i][j] = v
        return cls(ring, nrows, ncols, dense=tuple(tuple(r) for r in dense))

    # -- access -------------------------------------------------------

    def entry(self, i, j):
        if self._dense is not None:
            return self._dense[i][j]
        return self._sparse.get((i, j), self.ring.zero)

    def row(self, i) -> List:
        if self._dense is not None:
            return list(self._dense[i])
        r = [self.ring.zero] * self.ncols
        for (a, b), v in self._sparse.items():
            if a == i:
                r[b] = v
        return r

    def rows(self) -> List[List]:
        return [self.row(i) for i in range(self.nrows)]

    def items(self) -> Iterable[Tuple[int, int, object]]:
        if self._dense is not None:
            ring = self.ring
            for i, r in enumerate(self._dense):
                for j, v in enumerate(r):
                    if not _is_zero(ring, v):
                        yield (i, j, v)
        else:
            for (i, j), v in self._sparse.items():
                yield (i, j, v)

    def is_zero(self) -> bool:
        return all(False for _ in self.items())

    def density(self) -> float:
        size = self.nrows * self.ncols
        if size == 0:
            return 0.0
        return sum(1 for _ in self.items()) / size

    # -- arithmetic ---------------------------------------------------

    def _check_same_shape(self, other):
        if self.ring != other.ring or self.nrows != other.nrows or self.ncols != other.ncols:
            raise LinalgError("matrix shape/ring mismatch")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same_shape(other)
        items = {(i, j): v for i, j, v in self.items()}
        ring = self.ring
        for i, j, v in other.items():
            items[(i, j)] = ring.add(items.get((i, j), ring.zero), v)
        return Mat.from_entries(ring, self.nrows, self.ncols, items)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + other.neg()

    def neg(self) -> "Mat":
        ring = self.ring
        return Mat.from_entries(
            ring, self.nrows, self.ncols, {(i, j): ring.neg(v) for i, j, v in self.items()}
        )

    def scale(self, c) -> "Mat":
        ring = self.ring
        return Mat.from_entries(
            ring, self.nrows, self.ncols, {(i, j): ring.mul(v, c) for i, j, v in self.items()}
        )

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ring != other.ring or self.ncols != other.nrows:
            raise LinalgError("matrix product shape mismatch")
        ring = self.ring
        items: Dict[Tuple[int, int], object] = {}
        other_rows: Dict[int, List[Tuple[int, object]]] = {}
        for k, j, v in other.items():
            other_rows.setdefault(k, []).append((j, v))
        for i, k, a in self.items():
            for j, b in other_rows.get(k, ()):
                key = (i, j)
                prod = ring.mul(a, b)
                if key in items:
                    items[key] = ring.add(items[key], prod)
                else:
                    items[key] = prod
        return Mat.from_entries(ring, self.nrows, other.ncols, items)

    def transpose(self) -> "Mat":
        return Mat.from_entries(
            self.ring, self.ncols, self.nrows, {(j, i): v for i, j, v in self.items()}
        )

    def row_apply(self, v: Sequence) -> List:
        """Return v * self for a row vector v of length nrows."""
        if len(v) != self.nrows:
            raise LinalgError("row vector length mismatch")
        ring = self.ring
        out = [ring.zero] * self.ncols
        for i, j, a in self.items():
            if not _is_zero(ring, v[i]):
                out[j] = ring.add(out[j], ring.mul(v[i], a))
        return out

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        if self.ring != other.ring or self.nrows != other.nrows or self.ncols != other.ncols:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.nrows, self.ncols, frozenset((i, j) for i, j, _ in self.items())))

    def __repr__(self):
        return f"Mat({self.ring}, {self.nrows}x{self.ncols})"


def hstack(mats: Sequence[Mat]) -> Mat:
    ring = mats[0].ring
    nrows = mats[0].nrows
    items = {}
    off = 0
    for m in mats:
        if m.nrows != nrows or m.ring != ring:
            raise LinalgError("hstack mismatch")
        for i, j, v in m.items():
            items[(i, j + off)] = v
        off += m.ncols
    return Mat.from_entries(ring, nrows, off, items)


def vstack(mats: Sequence[Mat]) -> Mat:
    ring = mats[0].ring
    ncols = mats[0].ncols
    items = {}
    off = 0
    for m in mats:
        if m.ncols != ncols or m.ring != ring:
            raise LinalgError("vstack mismatch")
        for i, j, v in m.items():
            items[(i + off, j)] = v
        off += m.nrows
    return Mat.from_entries(ring, off, ncols, items)


def _require_field(ring):
    if not getattr(ring, "is_field", False):
        raise LinalgError(f"operation requires a field, got {ring!r}")


def rref_rows(ring, rows: Sequence[Sequence]) -> Tuple[List[List], List[int]]:
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    _require_field(ring)
    work = [list(r) for r in rows]
    if not work:
        return [], []
    ncols = len(work[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(work)):
            if not _is_zero(ring, work[i][c]):
                pivot = i
                break
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = ring.inv(work[r][c])
        work[r] = [ring.mul(inv, x) for x in work[r]]
        for i in range(len(work)):
            if i != r and not _is_zero(ring, work[i][c]):
                f = work[i][c]
                work[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank(A: Mat) -> int:
    rows, _ = rref_rows(A.ring, A.rows())
    return len(rows)


class Subspace:
    """A subspace of ring^ambient with canonical RREF basis rows."""

    __slots__ = ("ring", "ambient", "rows", "pivots")

    def __init__(self, ring, ambient: int, rows: Sequence[Sequence], pivots: Sequence[int]):
        self.ring = ring
        self.ambient = ambient
        self.rows = tuple(tuple(r) for r in rows)
        self.pivots = tuple(pivots)

    @classmethod
    def from_spanning(cls, ring, ambient: int, vectors: Sequence[Sequence]) -> "Subspace":
        _require_field(ring)
        for v in vectors:
            if len(v) != ambient:
                raise LinalgError("spanning vector has wrong length")
        rows, pivots = rref_rows(ring, vectors)
        return cls(ring, ambient, rows, pivots)

    @classmethod
    def zero(cls, ring, ambient: int) -> "Subspace":
        return cls(ring, ambient, [], [])

    @classmethod
    def full(cls, ring, ambient: int) -> "Subspace":
        eye = Mat.identity(ring, ambient)
        return cls(ring, ambient, eye.rows(), list(range(ambient)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Sequence) -> List:
        """Eliminate pivot coordinates of vec; residual is the canonical coset rep."""
        ring = self.ring
        v = list(vec)
        if len(v) != self.ambient:
            raise LinalgError("vector length mismatch")
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            if not _is_zero(ring, c):
                v = [ring.sub(x, ring.mul(c, y)) for x, y in zip(v, row)]
        return v

    def contains(self, vec: Sequence) -> bool:
        return all(_is_zero(self.ring, x) for x in self.reduce(vec))

    def coords_of(self, vec: Sequence) -> List:
        """Coefficients of vec in the canonical basis; vec must be a member."""
        ring = self.ring
        v = list(vec)
        coords = []
        for row, p in zip(self.rows, self.pivots):
            c = v[p]
            coords.append(c)
            if not _is_zero(ring, c):
                v = [ring.sub(x, ring.mul(c, y)) for x, y in zip(v, row)]
        if any(not _is_zero(ring, x) for x in v):
            raise LinalgError("vector is not in the subspace")
        return coords

    def sum_with(self, other: "Subspace") -> "Subspace":
        self._check_compat(other)
        return Subspace.from_spanning(self.ring, self.ambient, list(self.rows) + list(other.rows))

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check_compat(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ring, self.ambient)
        # c = (a | b) with a*V + b*W = 0; intersection is spanned by a*V.
        stacked = Mat.from_rows(self.ring, list(self.rows) + list(other.rows))
        _, ker = solve(stacked.transpose(), Mat.zeros(self.ring, self.ambient, 1))
        vecs = []
        for kv in ker.rows:
            a = kv[: self.dim]
            vecs.append(Mat.from_rows(self.ring, list(self.rows)).row_apply(a))
        return Subspace.from_spanning(self.ring, self.ambient, vecs)

    def completion(self) -> List[List]:
        """Unit vectors at non-pivot coordinates: coset reps completing the basis."""
        ring = self.ring
        out = []
        pivset = set(self.pivots)
        for j in range(self.ambient):
            if j not in pivset:
                v = [ring.zero] * self.ambient
                v[j] = ring.one
                out.append(v)
        return out

    def quotient_reps(self, within: Optional["Subspace"] = None) -> List[List]:
        """Coset representatives of (within / self); ambient/self when within is None."""
        if within is None:
            return self.completion()
        vecs = [self.reduce(r) for r in within.rows]
        rows, _ = rref_rows(self.ring, vecs)
        return rows

    def is_subspace_of(self, other: "Subspace") -> bool:
        self._check_compat(other)
        return all(other.contains(r) for r in self.rows)

    def _check_compat(self, other):
        if self.ring != other.ring or self.ambient != other.ambient:
            raise LinalgError("subspace ambient/ring mismatch")

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.ambient == other.ambient
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.ambient, self.rows))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"


def solve(A: Mat, b: Mat) -> Tuple[Optional[Mat], Subspace]:
    """Solve A @ x = b exactly.

    Returns (x, kernel): x is None when inconsistent; kernel is the subspace
    {v : A @ v = 0} of ring^ncols (spans all homogeneous solutions).
    """
    _require_field(A.ring)
    ring = A.ring
    if b.nrows != A.nrows or b.ring != ring:
        raise LinalgError("solve: right-hand side shape mismatch")
    n = A.ncols
    aug = [A.row(i) + b.row(i) for i in range(A.nrows)]
    red, pivots = rref_rows(ring, aug)
    pivots_in_A = [p for p in pivots if p < n]
    inconsistent = any(p >= n for p in pivots)

    # kernel of A from the reduced rows restricted to A's columns
    pivset = set(pivots_in_A)
    free_cols = [j for j in range(n) if j not in pivset]
    ker_vecs = []
    arows = [r[:n] for r in red[: len(pivots_in_A)]]
    for f in free_cols:
        v = [ring.zero] * n
        v[f] = ring.one
        for row, p in zip(arows, pivots_in_A):
            v[p] = ring.neg(row[f])
        ker_vecs.append(v)
    kernel = Subspace.from_spanning(ring, n, ker_vecs)

    if inconsistent:
        return None, kernel

    x_rows = [[ring.zero] * b.ncols for _ in range(n)]
    for row, p in zip(red, pivots_in_A):
        x_rows[p] = row[n:]
    x = Mat.from_rows(ring, x_rows) if n else Mat.zeros(ring, 0, b.ncols)
    # exactness invariant: residual must vanish identically
    if not (A @ x - b).is_zero():
        raise LinalgError("internal error: nonzero solve residual")
    return x, kernel


def solve_left(A: Mat, b: Mat) -> Tuple[Optional[Mat], Subspace]:
    """Solve x @ A = b; kernel is the left null space {v : v @ A = 0}."""
    xt, ker = solve(A.transpose(), b.transpose())
    return (None if xt is None else xt.transpose()), ker
