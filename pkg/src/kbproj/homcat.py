"""Bounded complexes of projective summands and their homotopy category.

Objects are complexes of finite direct sums of the modules e_i R attached to
the algebra's idempotent list.  Maps between such summands are given by left
multiplication with corner elements, so a map of sums is a matrix of algebra
elements; composition is matrix product over the algebra.

Grading and signs, fixed once here and used everywhere:
  * differentials raise degree by one and square to zero;
  * (shift X)^n = X^(n+1) with differential -d, and no sign on shifted maps;
  * cone(phi)^n = X^(n+1) (+) Y^n with differential [[-d_X, 0], [phi, d_Y]];
  * a degree-s family f has delta(f) = d_Y . f - (-1)^s f . d_X, chain maps
    are the degree-0 kernel and nullhomotopic maps the image of degree -1;
  * triangle rotation sends (a, b, c) to (b, c, -shift(a)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algebra import AlgebraPresentation
from .linalg import Mat, Subspace, hstack, solve_left, vstack


class HomcatError(ValueError):
    """Ill-formed complexes, maps, or certificates."""


class AlgMat:
    """A matrix of algebra elements: a map of projective sums.

    Rows index target summands, columns source summands; the entry at (r, c)
    acts by left multiplication e_{target[r]} R e_{source[c]} -> embeds the
    module map Hom(e_{source[c]} R, e_{target[r]} R).
    """

    __slots__ = ("alg", "target_idems", "source_idems", "entries", "_lin")

    def __init__(self, alg: AlgebraPresentation, target_idems: Sequence[int],
                 source_idems: Sequence[int], entries: Sequence[Sequence]):
        self.alg = alg
        self.target_idems = tuple(target_idems)
        self.source_idems = tuple(source_idems)
        rows = []
        if len(entries) != len(self.target_idems):
            raise HomcatError("entry rows do not match target summands")
        for r, row in enumerate(entries):
            if len(row) != len(self.source_idems):
                raise HomcatError("entry columns do not match source summands")
            prow = []
            for c, a in enumerate(row):
                a = tuple(a)
                ei = alg.idempotent_vec(self.target_idems[r])
                ej = alg.idempotent_vec(self.source_idems[c])
                if alg.mult(ei, a) != a or alg.mult(a, ej) != a:
                    raise HomcatError(
                        f"entry ({r},{c}) is not supported on the corner "
                        f"{alg.idempotent_names[self.target_idems[r]]}"
                        f"*R*{alg.idempotent_names[self.source_idems[c]]}"
                    )
                prow.append(a)
            rows.append(tuple(prow))
        self.entries = tuple(rows)
        self._lin = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def zeros(cls, alg, target_idems, source_idems) -> "AlgMat":
        z = alg.zero_vec()
        return cls(alg, target_idems, source_idems,
                   [[z for _ in source_idems] for _ in target_idems])

    @classmethod
    def identity(cls, alg, idems) -> "AlgMat":
        z = alg.zero_vec()
        ents = [[alg.idempotent_vec(i) if r == c else z for c, _ in enumerate(idems)]
                for r, i in enumerate(idems)]
        return cls(alg, idems, idems, ents)

    # -- arithmetic --------------------------------------------------------

    def _check_shape(self, other: "AlgMat"):
        if (self.alg != other.alg or self.target_idems != other.target_idems
                or self.source_idems != other.source_idems):
            raise HomcatError("summand mismatch in matrix arithmetic")

    def __add__(self, other: "AlgMat") -> "AlgMat":
        self._check_shape(other)
        alg = self.alg
        ents = [[alg.add_vec(a, b) for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)]
        return AlgMat(alg, self.target_idems, self.source_idems, ents)

    def __sub__(self, other: "AlgMat") -> "AlgMat":
        return self + other.neg()

    def neg(self) -> "AlgMat":
        alg = self.alg
        ents = [[alg.scale_vec(alg.ring.neg(alg.ring.one), a) for a in row]
                for row in self.entries]
        return AlgMat(alg, self.target_idems, self.source_idems, ents)

    def scale(self, c) -> "AlgMat":
        alg = self.alg
        ents = [[alg.scale_vec(c, a) for a in row] for row in self.entries]
        return AlgMat(alg, self.target_idems, self.source_idems, ents)

    def __matmul__(self, other: "AlgMat") -> "AlgMat":
        """Composition: self after other (other's source is the composite source)."""
        if self.alg != other.alg or self.source_idems != other.target_idems:
            raise HomcatError("summand mismatch in composition")
        alg = self.alg
        ents = []
        for r in range(len(self.target_idems)):
            row = []
            for c in range(len(other.source_idems)):
                acc = alg.zero_vec()
                for m in range(len(self.source_idems)):
                    acc = alg.add_vec(acc, alg.mult(self.entries[r][m], other.entries[m][c]))
                row.append(acc)
            ents.append(row)
        return AlgMat(alg, self.target_idems, other.source_idems, ents)

    def is_zero(self) -> bool:
        return all(self.alg.is_zero_vec(a) for row in self.entries for a in row)

    def __eq__(self, other):
        if not isinstance(other, AlgMat):
            return NotImplemented
        return (self.alg == other.alg and self.target_idems == other.target_idems
                and self.source_idems == other.source_idems and self.entries == other.entries)

    __hash__ = None

    def linearize(self) -> Mat:
        """Underlying field-linear map on row vectors, source dim x target dim."""
        if self._lin is None:
            alg = self.alg
            ring = alg.ring
            src_spaces = [alg.right_ideal_space(j) for j in self.source_idems]
            tgt_spaces = [alg.right_ideal_space(i) for i in self.target_idems]
            tdim = sum(s.dim for s in tgt_spaces)
            rows = []
            for c, sp in enumerate(src_spaces):
                for v in sp.rows:
                    out = []
                    for r, tp in enumerate(tgt_spaces):
                        img = alg.mult(self.entries[r][c], tuple(v))
                        out.extend(tp.coords_of(img))
                    rows.append(out)
            if rows:
                self._lin = Mat.from_rows(ring, rows)
            else:
                self._lin = Mat.zeros(ring, 0, tdim)
        return self._lin

    def __repr__(self):
        return f"AlgMat({len(self.target_idems)}x{len(self.source_idems)} over {self.alg.name})"


class ProjComplex:
    """A bounded complex of projective summands."""

    def __init__(self, alg: AlgebraPresentation, summands: Dict[int, Sequence[int]],
                 diff: Dict[int, AlgMat], name: str = "X"):
        self.alg = alg
        self.summands = {n: tuple(s) for n, s in summands.items() if len(s) > 0}
        self.name = name
        degs = sorted(self.summands)
        self.lo = degs[0] if degs else None
        self.hi = degs[-1] if degs else None
        self.diff = {}
        for n, d in diff.items():
            if d is None or (n not in self.summands) or (n + 1 not in self.summands):
                continue
            self.diff[n] = d
        self._validate()

    def _validate(self):
        for n, d in self.diff.items():
            if d.alg != self.alg:
                raise HomcatError(f"{self.name}: differential over wrong algebra")
            if d.source_idems != self.summands[n] or d.target_idems != self.summands.get(n + 1, ()):
                raise HomcatError(f"{self.name}: differential at degree {n} has wrong summands")
        for n in self.summands:
            if n + 2 in self.summands and n + 1 in self.summands:
                d0 = self.diff_at(n)
                d1 = self.diff_at(n + 1)
                if not (d1 @ d0).is_zero():
                    raise HomcatError(f"{self.name}: differential does not square to zero at {n}")

    def is_zero(self) -> bool:
        return not self.summands

    def degrees(self) -> List[int]:
        return sorted(self.summands)

    def summands_at(self, n: int) -> Tuple[int, ...]:
        return self.summands.get(n, ())

    def diff_at(self, n: int) -> AlgMat:
        if n in self.diff:
            return self.diff[n]
        return AlgMat.zeros(self.alg, self.summands_at(n + 1), self.summands_at(n))

    def space_dim_at(self, n: int) -> int:
        return sum(self.alg.right_ideal_space(i).dim for i in self.summands_at(n))

    def total_dim(self) -> int:
        return sum(self.space_dim_at(n) for n in self.summands)

    def shift(self, k: int = 1) -> "ProjComplex":
        """Translation by k: degree n picks up the old degree n + k, sign (-1)^k on d."""
        summands = {n - k: s for n, s in self.summands.items()}
        sign = self.alg.ring.one if k % 2 == 0 else self.alg.ring.neg(self.alg.ring.one)
        diff = {n - k: d.scale(sign) for n, d in self.diff.items()}
        return ProjComplex(self.alg, summands, diff, name=f"{self.name}[{k}]")

    def hard_truncate_ge(self, n: int) -> "ProjComplex":
        summands = {m: s for m, s in self.summands.items() if m >= n}
        diff = {m: d for m, d in self.diff.items() if m >= n}
        return ProjComplex(self.alg, summands, diff, name=f"{self.name}|>={n}")

    def hard_truncate_le(self, n: int) -> "ProjComplex":
        summands = {m: s for m, s in self.summands.items() if m <= n}
        diff = {m: d for m, d in self.diff.items() if m + 1 <= n}
        return ProjComplex(self.alg, summands, diff, name=f"{self.name}|<={n}")

    def __repr__(self):
        parts = ", ".join(f"{n}:{list(s)}" for n, s in sorted(self.summands.items()))
        return f"ProjComplex({self.name}: {parts or 'zero'})"


def single_summand_complex(alg, idem: int, degree: int = 0, name: Optional[str] = None) -> ProjComplex:
    nm = name or f"P({alg.idempotent_names[idem]})@{degree}"
    return ProjComplex(alg, {degree: (idem,)}, {}, name=nm)


def zero_complex(alg, name: str = "0") -> ProjComplex:
    return ProjComplex(alg, {}, {}, name=name)


class GradedMap:
    """A degree-s family of summand-matrix maps X^n -> Y^(n+s), no conditions."""

    def __init__(self, source: ProjComplex, target: ProjComplex, degree: int,
                 components: Dict[int, AlgMat], name: str = "f"):
        if source.alg != target.alg:
            raise HomcatError("map between complexes over different algebras")
        self.source = source
        self.target = target
        self.degree = degree
        self.name = name
        comps = {}
        for n, m in components.items():
            if m is None or m.is_zero():
                continue
            if m.source_idems != source.summands_at(n):
                raise HomcatError(f"{name}: component at {n} has wrong source summands")
            if m.target_idems != target.summands_at(n + degree):
                raise HomcatError(f"{name}: component at {n} has wrong target summands")
            comps[n] = m
        self.components = comps

    def component(self, n: int) -> AlgMat:
        if n in self.components:
            return self.components[n]
        return AlgMat.zeros(self.source.alg, self.target.summands_at(n + self.degree),
                            self.source.summands_at(n))

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.components.values())

    def _check_parallel(self, other: "GradedMap"):
        if (self.degree != other.degree
                or self.source.summands != other.source.summands
                or self.target.summands != other.target.summands):
            raise HomcatError("maps are not parallel")

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._check_parallel(other)
        degs = set(self.components) | set(other.components)
        comps = {n: self.component(n) + other.component(n) for n in degs}
        return GradedMap(self.source, self.target, self.degree, comps)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + other.neg()

    def neg(self) -> "GradedMap":
        comps = {n: m.neg() for n, m in self.components.items()}
        return GradedMap(self.source, self.target, self.degree, comps, name=f"-{self.name}")

    def scale(self, c) -> "GradedMap":
        comps = {n: m.scale(c) for n, m in self.components.items()}
        return GradedMap(self.source, self.target, self.degree, comps)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self . other: apply other first.  Degrees add."""
        if other.target is not self.source and other.target.summands != self.source.summands:
            raise HomcatError("composition endpoint mismatch")
        comps = {}
        for n in other.source.degrees():
            m = n + other.degree
            a = self.component(m) @ other.component(n)
            if not a.is_zero():
                comps[n] = a
        return GradedMap(other.source, self.target, self.degree + other.degree, comps,
                         name=f"{self.name}.{other.name}")

    def delta(self) -> "GradedMap":
        """d_target . f - (-1)^deg f . d_source, one degree higher."""
        ring = self.source.alg.ring
        sgn = ring.one if self.degree % 2 == 0 else ring.neg(ring.one)
        comps = {}
        for n in self.source.degrees():
            a = self.target.diff_at(n + self.degree) @ self.component(n)
            b = self.component(n + 1) @ self.source.diff_at(n)
            m = a - b.scale(sgn)
            if not m.is_zero():
                comps[n] = m
        return GradedMap(self.source, self.target, self.degree + 1, comps, name=f"delta({self.name})")

    def is_chain_map(self) -> bool:
        return self.degree == 0 and self.delta().is_zero()

    def shift(self, k: int = 1) -> "GradedMap":
        comps = {n - k: m for n, m in self.components.items()}
        return GradedMap(self.source.shift(k), self.target.shift(k), self.degree, comps,
                         name=f"{self.name}[{k}]")

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        if self.degree != other.degree:
            return False
        degs = set(self.components) | set(other.components)
        return all(self.component(n) == other.component(n) for n in degs)

    __hash__ = None

    def __repr__(self):
        return f"GradedMap({self.name}: {self.source.name} -> {self.target.name}, deg {self.degree})"


def chain_map(source, target, components, name="f") -> GradedMap:
    """Validated degree-0 chain map."""
    f = GradedMap(source, target, 0, components, name=name)
    if not f.delta().is_zero():
        raise HomcatError(f"{name}: does not commute with the differentials")
    return f


def identity_map(X: ProjComplex) -> GradedMap:
    comps = {n: AlgMat.identity(X.alg, X.summands_at(n)) for n in X.degrees()}
    return GradedMap(X, X, 0, comps, name=f"id_{X.name}")


def zero_map(X: ProjComplex, Y: ProjComplex, degree: int = 0) -> GradedMap:
    return GradedMap(X, Y, degree, {}, name="0")


def cone(phi: GradedMap) -> Tuple[ProjComplex, GradedMap, GradedMap]:
    """Mapping cone with its inclusion of the target and projection to shift(source).

    Returns (C, incl: Y -> C, proj: C -> X[1]).
    """
    if phi.degree != 0 or not phi.delta().is_zero():
        raise HomcatError("cone needs a degree-0 chain map")
    X, Y = phi.source, phi.target
    alg = X.alg
    z = alg.zero_vec()
    summands = {}
    degs = set()
    for n in X.degrees():
        degs.add(n - 1)
    degs.update(Y.degrees())
    for n in degs:
        s = tuple(X.summands_at(n + 1)) + tuple(Y.summands_at(n))
        if s:
            summands[n] = s
    diff = {}
    for n in sorted(summands):
        if n + 1 not in summands:
            continue
        xs, ys = X.summands_at(n + 1), Y.summands_at(n)
        xt, yt = X.summands_at(n + 2), Y.summands_at(n + 1)
        dX = X.diff_at(n + 1)
        dY = Y.diff_at(n)
        ph = phi.component(n + 1)
        ents = []
        for r, _ in enumerate(xt):
            ents.append([alg.scale_vec(alg.ring.neg(alg.ring.one), dX.entries[r][c])
                         for c, _ in enumerate(xs)] + [z] * len(ys))
        for r, _ in enumerate(yt):
            ents.append([ph.entries[r][c] for c, _ in enumerate(xs)]
                        + [dY.entries[r][c] for c, _ in enumerate(ys)])
        diff[n] = AlgMat(alg, summands[n + 1], summands[n], ents)
    C = ProjComplex(alg, summands, diff, name=f"cone({phi.name})")
    # inclusion of Y: (0, id)
    incl_comps = {}
    for n in Y.degrees():
        ys = Y.summands_at(n)
        xs = X.summands_at(n + 1)
        ents = []
        for r, i in enumerate(xs):
            ents.append([z] * len(ys))
        for r, i in enumerate(ys):
            ents.append([alg.idempotent_vec(i) if c == r else z for c, _ in enumerate(ys)])
        incl_comps[n] = AlgMat(alg, C.summands_at(n), ys, ents)
    incl = GradedMap(Y, C, 0, incl_comps, name=f"into_cone({phi.name})")
    # projection to X[1]: (x, y) -> x
    SX = X.shift(1)
    proj_comps = {}
    for n in C.degrees():
        xs = X.summands_at(n + 1)
        ys = Y.summands_at(n)
        if not xs:
            continue
        ents = []
        for r, i in enumerate(xs):
            ents.append([alg.idempotent_vec(i) if c == r else z for c, _ in enumerate(xs)]
                        + [z] * len(ys))
        proj_comps[n] = AlgMat(alg, xs, C.summands_at(n), ents)
    proj = GradedMap(C, SX, 0, proj_comps, name=f"cone_to_shift({phi.name})")
    return C, incl, proj


def direct_sum(X: ProjComplex, Y: ProjComplex, name: Optional[str] = None) -> ProjComplex:
    """Degreewise sum with block-diagonal differential (X summands first)."""
    alg = X.alg
    z = alg.zero_vec()
    summands = {}
    for n in set(X.degrees()) | set(Y.degrees()):
        summands[n] = tuple(X.summands_at(n)) + tuple(Y.summands_at(n))
    diff = {}
    for n in sorted(summands):
        if n + 1 not in summands:
            continue
        dX, dY = X.diff_at(n), Y.diff_at(n)
        nxs, nys = len(X.summands_at(n)), len(Y.summands_at(n))
        ents = []
        for r, _ in enumerate(X.summands_at(n + 1)):
            ents.append([dX.entries[r][c] for c in range(nxs)] + [z] * nys)
        for r, _ in enumerate(Y.summands_at(n + 1)):
            ents.append([z] * nxs + [dY.entries[r][c] for c in range(nys)])
        diff[n] = AlgMat(alg, summands[n + 1], summands[n], ents)
    return ProjComplex(alg, summands, diff, name=name or f"{X.name}(+){Y.name}")


class MapLayout:
    """Field coordinates for the space of degree-s families X -> Y.

    One slot per (degree, target summand, source summand) with coordinates in
    the corresponding corner subspace.
    """

    def __init__(self, X: ProjComplex, Y: ProjComplex, degree: int):
        self.X = X
        self.Y = Y
        self.degree = degree
        self.alg = X.alg
        self.slots = []
        off = 0
        for n in X.degrees():
            m = n + degree
            ys = Y.summands_at(m)
            xs = X.summands_at(n)
            for r, i in enumerate(ys):
                for c, j in enumerate(xs):
                    corner = self.alg.corner_space(i, j)
                    if corner.dim:
                        self.slots.append((n, r, c, corner, off))
                        off += corner.dim
        self.dim = off

    def pack(self, g: GradedMap) -> List:
        ring = self.alg.ring
        if g.source.summands != self.X.summands or g.target.summands != self.Y.summands \
                or g.degree != self.degree:
            raise HomcatError("map does not fit this layout")
        out = [ring.zero] * self.dim
        for n, r, c, corner, off in self.slots:
            a = g.component(n).entries[r][c]
            for t, v in enumerate(corner.coords_of(a)):
                out[off + t] = v
        # anything outside the slots must be zero (corner dimension zero forces it)
        return out

    def unpack(self, coords: Sequence) -> GradedMap:
        ring = self.alg.ring
        alg = self.alg
        per_degree: Dict[int, List[List]] = {}
        for n in self.X.degrees():
            ys = self.Y.summands_at(n + self.degree)
            xs = self.X.summands_at(n)
            per_degree[n] = [[alg.zero_vec() for _ in xs] for _ in ys]
        for n, r, c, corner, off in self.slots:
            acc = alg.zero_vec()
            for t, row in enumerate(corner.rows):
                cf = coords[off + t]
                if cf != ring.zero:
                    acc = alg.add_vec(acc, alg.scale_vec(cf, tuple(row)))
            per_degree[n][r][c] = acc
        comps = {}
        for n, ents in per_degree.items():
            ys = self.Y.summands_at(n + self.degree)
            xs = self.X.summands_at(n)
            m = AlgMat(alg, ys, xs, ents)
            if not m.is_zero():
                comps[n] = m
        return GradedMap(self.X, self.Y, self.degree, comps)

    def unit_vector(self, t: int) -> List:
        ring = self.alg.ring
        v = [ring.zero] * self.dim
        v[t] = ring.one
        return v


def operator_matrix(layout_in: MapLayout, layout_out: MapLayout,
                    fn: Callable[[GradedMap], GradedMap]) -> Mat:
    """Matrix (row convention) of a linear operator between map layouts."""
    ring = layout_in.alg.ring
    rows = [layout_out.pack(fn(layout_in.unpack(layout_in.unit_vector(t))))
            for t in range(layout_in.dim)]
    if rows:
        return Mat.from_rows(ring, rows)
    return Mat.zeros(ring, 0, layout_out.dim)


class HomSpace:
    """Chain maps X -> Y modulo homotopy, in explicit field coordinates."""

    def __init__(self, X: ProjComplex, Y: ProjComplex):
        self.X = X
        self.Y = Y
        ring = X.alg.ring
        self.ring = ring
        self.L0 = MapLayout(X, Y, 0)
        self.Lm1 = MapLayout(X, Y, -1)
        self.L1 = MapLayout(X, Y, 1)
        self.D0 = operator_matrix(self.L0, self.L1, lambda g: g.delta())
        self.Dm1 = operator_matrix(self.Lm1, self.L0, lambda g: g.delta())
        if self.L0.dim:
            _, self.cycles = solve_left(self.D0, Mat.zeros(ring, 1, self.L1.dim))
        else:
            self.cycles = Subspace.zero(ring, 0)
        self.boundaries = Subspace.from_spanning(ring, self.L0.dim,
                                                 [self.Dm1.row(t) for t in range(self.Lm1.dim)])
        if not self.boundaries.is_subspace_of(self.cycles):
            raise HomcatError("internal error: boundaries not inside cycles")
        self.reps = self.boundaries.quotient_reps(within=self.cycles)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def basis(self) -> List[GradedMap]:
        return [self.L0.unpack(r) for r in self.reps]

    def class_coords(self, f: GradedMap) -> List:
        """Coordinates of f's homotopy class in the basis of representatives."""
        v = self.L0.pack(f)
        if not self.cycles.contains(v):
            raise HomcatError("not a chain map")
        ring = self.ring
        if not self.reps:
            return []
        rows = [list(r) for r in self.reps] + [list(r) for r in self.boundaries.rows]
        M = Mat.from_rows(ring, rows)
        x, _ = solve_left(M, Mat.from_rows(ring, [v]))
        if x is None:
            raise HomcatError("internal error: cycle escaped its own span")
        return [x.entry(0, t) for t in range(len(self.reps))]

    def is_nullhomotopic(self, f: GradedMap) -> Tuple[bool, Optional[GradedMap]]:
        """Decide f ~ 0; on success also return a homotopy h with delta(h) = f."""
        ring = self.ring
        v = self.L0.pack(f)
        if not self.cycles.contains(v):
            raise HomcatError("not a chain map")
        if all(c == ring.zero for c in v):
            return True, zero_map(self.X, self.Y, degree=-1)
        if self.Lm1.dim == 0:
            return False, None
        x, _ = solve_left(self.Dm1, Mat.from_rows(ring, [v]))
        if x is None:
            return False, None
        return True, self.Lm1.unpack(x.row(0))


def is_contractible(X: ProjComplex) -> Tuple[bool, Optional[GradedMap]]:
    """Decide nullhomotopy of the identity; the witness contracts the complex."""
    if X.is_zero():
        return True, zero_map(X, X, degree=-1)
    H = HomSpace(X, X)
    return H.is_nullhomotopic(identity_map(X))


def verify_contraction(X: ProjComplex, h: GradedMap) -> bool:
    """Direct check that delta(h) = id, with no solving involved."""
    if h.degree != -1:
        return False
    want = identity_map(X)
    return (h.delta() - want).is_zero()


def is_homotopy_equivalence(phi: GradedMap) -> Tuple[bool, Optional[GradedMap]]:
    """Decide invertibility up to homotopy via contractibility of the cone."""
    C, _, _ = cone(phi)
    return is_contractible(C)


def homotopy_inverse_from_contraction(phi: GradedMap, h: GradedMap):
    """Extract an inverse and both homotopies from a contraction of cone(phi).

    Returns (inv, h_src, h_tgt) with delta(h_src) = id_X - inv . phi and
    delta(h_tgt) = id_Y - phi . inv.
    """
    X, Y = phi.source, phi.target
    alg = X.alg
    C, _, _ = cone(phi)
    if h.source.summands != C.summands or h.degree != -1:
        raise HomcatError("not a contraction of the cone")
    inv_comps = {}
    a_comps = {}
    e_comps = {}
    for n in C.degrees():
        xs_src = X.summands_at(n + 1)
        ys_src = Y.summands_at(n)
        xs_tgt = X.summands_at(n)
        ys_tgt = Y.summands_at(n - 1)
        m = h.component(n)
        nxt, nyt = len(xs_tgt), len(ys_tgt)
        nxs, nys = len(xs_src), len(ys_src)
        if nxt and nys:
            ents = [[m.entries[r][nxs + c] for c in range(nys)] for r in range(nxt)]
            inv_comps[n] = AlgMat(alg, xs_tgt, ys_src, ents)
        if nxt and nxs:
            ents = [[m.entries[r][c] for c in range(nxs)] for r in range(nxt)]
            a_comps[n + 1] = AlgMat(alg, xs_tgt, xs_src, ents)
        if nyt and nys:
            ents = [[m.entries[nxt + r][nxs + c] for c in range(nys)] for r in range(nyt)]
            e_comps[n] = AlgMat(alg, ys_tgt, ys_src, ents)
    inv = GradedMap(Y, X, 0, inv_comps, name=f"inv({phi.name})")
    h_src = GradedMap(X, X, -1, a_comps).neg()
    h_tgt = GradedMap(Y, Y, -1, e_comps)
    return inv, h_src, h_tgt


@dataclass
class TriangleVerdict:
    """Outcome of triangle recognition, with a re-checkable certificate."""

    verdict: str                       # "exact" or "not_exact"
    reason: str
    rho: Optional[GradedMap] = None            # cone(alpha) -> Z comparison map
    h_incl: Optional[GradedMap] = None         # rho . incl ~ beta witness
    h_proj: Optional[GradedMap] = None         # gamma . rho ~ proj witness
    cone_contraction: Optional[GradedMap] = None  # contraction of cone(rho)


def rotate_triangle(alpha: GradedMap, beta: GradedMap, gamma: GradedMap):
    """(a, b, c) -> (b, c, -a[1])."""
    return beta, gamma, alpha.shift(1).neg()


def recognize_triangle(alpha: GradedMap, beta: GradedMap, gamma: GradedMap) -> TriangleVerdict:
    """Decide whether X -a-> Y -b-> Z -c-> X[1] is exact in the homotopy category.

    A comparison map rho: cone(a) -> Z with rho.incl ~ b and c.rho ~ proj is
    found by one combined linear solve; exactness then reduces to rho being
    an equivalence.  Any comparison map between two exact triangles over the
    identity on X and Y is automatically an equivalence, so a failed
    contraction refutes exactness just as a missing rho does.
    """
    X, Y = alpha.source, alpha.target
    Z = beta.target
    if beta.source.summands != Y.summands:
        raise HomcatError("triangle legs do not compose: target of first != source of second")
    if gamma.source.summands != Z.summands:
        raise HomcatError("triangle legs do not compose: target of second != source of third")
    SX = X.shift(1)
    if gamma.target.summands != SX.summands:
        raise HomcatError("third leg must land in the shifted first object")
    for leg, nm in ((alpha, "first"), (beta, "second"), (gamma, "third")):
        if leg.degree != 0 or not leg.delta().is_zero():
            return TriangleVerdict("not_exact", f"{nm} leg is not a chain map")

    H_xz = HomSpace(X, Z)
    ok, _ = H_xz.is_nullhomotopic(beta.compose(alpha))
    if not ok:
        return TriangleVerdict("not_exact", "composite of the first two legs is not nullhomotopic")
    H_ysx = HomSpace(Y, SX)
    ok, _ = H_ysx.is_nullhomotopic(gamma.compose(beta))
    if not ok:
        return TriangleVerdict("not_exact", "composite of the last two legs is not nullhomotopic")

    C, incl, proj = cone(alpha)
    ring = X.alg.ring
    L_cz0 = MapLayout(C, Z, 0)
    L_cz1 = MapLayout(C, Z, 1)
    L_yzm1 = MapLayout(Y, Z, -1)
    L_yz0 = MapLayout(Y, Z, 0)
    L_csxm1 = MapLayout(C, SX, -1)
    L_csx0 = MapLayout(C, SX, 0)

    D_chain = operator_matrix(L_cz0, L_cz1, lambda g: g.delta())
    C_incl = operator_matrix(L_cz0, L_yz0, lambda g: g.compose(incl))
    C_gamma = operator_matrix(L_cz0, L_csx0, lambda g: gamma.compose(g))
    D_yz = operator_matrix(L_yzm1, L_yz0, lambda g: g.delta())
    D_csx = operator_matrix(L_csxm1, L_csx0, lambda g: g.delta())

    n0, n1, n2 = L_cz0.dim, L_yzm1.dim, L_csxm1.dim
    m0, m1, m2 = L_cz1.dim, L_yz0.dim, L_csx0.dim

    rhs = [ring.zero] * m0 + L_yz0.pack(beta) + L_csx0.pack(proj)
    if n0 + n1 + n2 == 0:
        if any(c != ring.zero for c in rhs):
            return TriangleVerdict("not_exact", "no comparison map from the cone exists")
        sol = []
    else:
        zero = Mat.zeros
        top = hstack([D_chain, C_incl, C_gamma])
        mid = hstack([zero(ring, n1, m0), D_yz.neg(), zero(ring, n1, m2)])
        bot = hstack([zero(ring, n2, m0), zero(ring, n2, m1), D_csx.neg()])
        M = vstack([top, mid, bot])
        x, _ = solve_left(M, Mat.from_rows(ring, [rhs]))
        if x is None:
            return TriangleVerdict("not_exact", "no comparison map from the cone exists")
        sol = x.row(0)
    rho = L_cz0.unpack(sol[:n0])
    h_incl = L_yzm1.unpack(sol[n0:n0 + n1])
    h_proj = L_csxm1.unpack(sol[n0 + n1:])
    ok, contraction = is_homotopy_equivalence(rho)
    if not ok:
        return TriangleVerdict(
            "not_exact",
            "a comparison map from the cone exists but is not an equivalence",
            rho=rho, h_incl=h_incl, h_proj=h_proj,
        )
    return TriangleVerdict("exact", "cone comparison map is an equivalence",
                           rho=rho, h_incl=h_incl, h_proj=h_proj,
                           cone_contraction=contraction)


def verify_triangle_certificate(alpha: GradedMap, beta: GradedMap, gamma: GradedMap,
                                verdict: TriangleVerdict) -> bool:
    """Re-check an exactness certificate by direct arithmetic, no solving."""
    if verdict.verdict != "exact":
        return False
    if verdict.rho is None or verdict.cone_contraction is None:
        return False
    C, incl, proj = cone(alpha)
    rho = verdict.rho
    if rho.degree != 0 or not rho.delta().is_zero():
        return False
    if not (rho.compose(incl) - beta - verdict.h_incl.delta()).is_zero():
        return False
    if not (gamma.compose(rho) - proj - verdict.h_proj.delta()).is_zero():
        return False
    Crho, _, _ = cone(rho)
    return verify_contraction(Crho, verdict.cone_contraction)
