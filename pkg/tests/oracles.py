"""Independent test oracles.

Everything here deliberately avoids the production code paths it is used to
check: plain-list row reduction, exhaustive small-field enumeration, the
normalized bar complex for Tor.  Oracles are slow and simple on purpose.
"""

from fractions import Fraction
from itertools import product


def plain_rank(rows, p=None):
    """Rank by forward elimination on plain lists.  p=None means rationals."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rk = 0
    for c in range(ncols):
        piv = None
        for i in range(rk, len(rows)):
            val = rows[i][c] % p if p is not None else rows[i][c]
            if val != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        for i in range(rk + 1, len(rows)):
            if p is None:
                if rows[rk][c] == 0:
                    continue
                f = Fraction(rows[i][c], 1) / Fraction(rows[rk][c], 1)
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rk])]
            else:
                f = (rows[i][c] * pow(rows[rk][c], p - 2, p)) % p
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rk])]
        rk += 1
        if rk == len(rows):
            break
    return rk


def span_members(p, vectors, ambient):
    """All members of the GF(p)-span of the given vectors, as a set of tuples."""
    vecs = [tuple(v) for v in vectors]
    out = {tuple([0] * ambient)}
    for coeffs in product(range(p), repeat=len(vecs)):
        w = [0] * ambient
        for c, v in zip(coeffs, vecs):
            for i in range(ambient):
                w[i] = (w[i] + c * v[i]) % p
        out.add(tuple(w))
    return out


def dim_from_count(p, count):
    d = 0
    n = 1
    while n < count:
        n *= p
        d += 1
    assert n == count, "member count is not a power of p"
    return d


def all_subspaces_gf(p, ambient):
    """Every subspace of GF(p)^ambient, as a list of RREF row tuples.

    Enumerates reduced echelon forms directly: pick pivot columns, then fill
    the free entries (right of each pivot, off the pivot columns) in all ways.
    """
    from itertools import combinations

    out = [tuple()]
    for k in range(1, ambient + 1):
        for pivots in combinations(range(ambient), k):
            free = [
                (i, j)
                for i in range(k)
                for j in range(pivots[i] + 1, ambient)
                if j not in pivots
            ]
            for filling in product(range(p), repeat=len(free)):
                rows = [[0] * ambient for _ in range(k)]
                for i, c in enumerate(pivots):
                    rows[i][c] = 1
                for (i, j), v in zip(free, filling):
                    rows[i][j] = v
                out.append(tuple(tuple(r) for r in rows))
    return out


def gf_set_closure(p, vectors, ambient):
    """Closure of a set of GF(p) vectors under addition and scaling, as a set.

    Feasible only when the spanned subspace is small; used on ambients where
    the whole space has at most a few hundred points.
    """
    cur = {tuple([0] * ambient)}
    cur.update(tuple(c % p for c in v) for v in vectors)
    while True:
        new = set(cur)
        for a in cur:
            for b in cur:
                new.add(tuple((x + y) % p for x, y in zip(a, b)))
        for a in cur:
            for s in range(2, p):
                new.add(tuple((s * x) % p for x in a))
        if new == cur:
            return cur
        cur = new


def structure_mult(structure, x, y, p=None):
    """Multiply coefficient vectors with a structure-constant table.

    p=None works over the rationals; otherwise everything is reduced mod p.
    """
    dim = len(structure)
    out = [0 if p is not None else Fraction(0)] * dim
    for i in range(dim):
        if x[i] == 0:
            continue
        for j in range(dim):
            if y[j] == 0:
                continue
            coeff = x[i] * y[j]
            for l in range(dim):
                out[l] += coeff * structure[i][j][l]
    if p is not None:
        out = [c % p for c in out]
    return out


def coequalizer_dim(m_dim, b_dim, r_dim, m_action, left_action):
    """dim(M tensor_R B) by brute-force relation span over QQ.

    m_action[r]: m_dim x m_dim rational matrix (row convention, m.b_r = m @ A).
    left_action[r]: b_dim x b_dim rational matrix (b_r . v = v @ L).
    """
    amb = m_dim * b_dim
    rels = []
    for i in range(m_dim):
        for r in range(r_dim):
            for j in range(b_dim):
                vec = [Fraction(0)] * amb
                # (m_i . b_r) tensor B_j
                for u in range(m_dim):
                    vec[u * b_dim + j] += m_action[r][i][u]
                # minus m_i tensor (b_r . B_j)
                for v in range(b_dim):
                    vec[i * b_dim + v] -= left_action[r][j][v]
                rels.append(vec)
    return amb - plain_rank(rels)


def bar_tor_dims(structure, unit, m_dim, m_action, n_dim, n_left_action, i_max):
    """Tor_i dimensions via the normalized bar complex M (x) Rbar^i (x) N over QQ.

    structure: rational structure constants c[i][j] = coeff list.
    unit: coefficient vector of 1 in R.
    m_action[r]: right action matrices on M (row convention).
    n_left_action[r]: matrices with (b_r . n) = n @ L_r (row convention).

    Rbar is realized as a complement of span{unit}: products are computed in R
    and then projected along the unit coordinate.
    """
    dim = len(structure)

    # choose complement of span{unit}: unit has some nonzero coord u0
    u0 = next(i for i, c in enumerate(unit) if c != 0)
    comp_idx = [i for i in range(dim) if i != u0]
    cdim = len(comp_idx)

    def project(vec):
        """Split vec = t*unit + c with c supported off u0; return (t, c-coords)."""
        t = Fraction(vec[u0]) / Fraction(unit[u0])
        resid = [vec[i] - t * unit[i] for i in range(dim)]
        assert resid[u0] == 0
        return t, [resid[i] for i in comp_idx]

    def embed(ccoords):
        vec = [Fraction(0)] * dim
        for pos, i in enumerate(comp_idx):
            vec[i] = ccoords[pos]
        return vec

    def chain_dim(n):
        return m_dim * (cdim ** n) * n_dim

    def idx(n, mi, es, nj):
        v = mi
        for e in es:
            v = v * cdim + e
        return v * n_dim + nj

    def boundary(n):
        """Matrix of d_n: C_n -> C_{n-1}, rows = images of basis (row conv)."""
        rows = []
        for mi in range(m_dim):
            for es in product(range(cdim), repeat=n):
                for nj in range(n_dim):
                    out = [Fraction(0)] * chain_dim(n - 1)
                    # face 0: (m . r1) (x) r2 ... (x) nj
                    r1 = embed([Fraction(1) if k == es[0] else Fraction(0) for k in range(cdim)])
                    for r in range(dim):
                        if r1[r] == 0:
                            continue
                        for u in range(m_dim):
                            c = r1[r] * m_action[r][mi][u]
                            if c:
                                out[idx(n - 1, u, es[1:], nj)] += c
                    # middle faces: multiply adjacent bars, project off unit
                    sign = -1
                    for t in range(n - 1):
                        a = embed([Fraction(1) if k == es[t] else Fraction(0) for k in range(cdim)])
                        b = embed([Fraction(1) if k == es[t + 1] else Fraction(0) for k in range(cdim)])
                        prod = structure_mult(structure, a, b)
                        _, cc = project(prod)
                        for pos, c in enumerate(cc):
                            if c:
                                new_es = es[:t] + (pos,) + es[t + 2:]
                                out[idx(n - 1, mi, new_es, nj)] += sign * c
                        sign = -sign
                    # last face: rn acts on N from the left
                    rn = embed([Fraction(1) if k == es[-1] else Fraction(0) for k in range(cdim)])
                    for r in range(dim):
                        if rn[r] == 0:
                            continue
                        for v in range(n_dim):
                            c = rn[r] * n_left_action[r][nj][v]
                            if c:
                                out[idx(n - 1, mi, es[:-1], v)] += sign * c
                    rows.append(out)
        return rows

    # d_n for n = 1..i_max+1; Tor_i = dim ker d_i - rank d_{i+1}
    ds = {n: boundary(n) for n in range(1, i_max + 2)}
    ranks = {n: plain_rank(ds[n]) for n in ds}
    # sanity: d_{n-1} d_n = 0 checked by composing via matrix product for small n
    dims = []
    for i in range(i_max + 1):
        if i == 0:
            dims.append(chain_dim(0) - ranks[1])
        else:
            ker = chain_dim(i) - ranks[i]
            dims.append(ker - ranks[i + 1])
    return dims


def plain_nullspace(rows, ncols, p=None):
    """Basis of {u : row . u = 0 for every row}, u a column of length ncols."""
    work = [list(r) for r in rows]
    pivots = []
    rk = 0
    for c in range(ncols):
        piv = None
        for i in range(rk, len(work)):
            val = work[i][c] % p if p is not None else work[i][c]
            if val != 0:
                piv = i
                break
        if piv is None:
            continue
        work[rk], work[piv] = work[piv], work[rk]
        if p is None:
            inv = Fraction(1) / Fraction(work[rk][c])
            work[rk] = [inv * x for x in work[rk]]
        else:
            inv = pow(work[rk][c], p - 2, p)
            work[rk] = [(inv * x) % p for x in work[rk]]
        for i in range(len(work)):
            if i == rk:
                continue
            f = work[i][c] % p if p is not None else work[i][c]
            if f != 0:
                if p is None:
                    work[i] = [x - f * y for x, y in zip(work[i], work[rk])]
                else:
                    work[i] = [(x - f * y) % p for x, y in zip(work[i], work[rk])]
        pivots.append(c)
        rk += 1
    basis = []
    pivset = set(pivots)
    for free in range(ncols):
        if free in pivset:
            continue
        v = [Fraction(0) if p is None else 0] * ncols
        v[free] = Fraction(1) if p is None else 1
        for t, c in enumerate(pivots):
            val = -work[t][free]
            v[c] = val % p if p is not None else val
        basis.append(v)
    return basis


def plain_homotopy_hom_dim(x_dims, x_diffs, x_actions, y_dims, y_diffs, y_actions):
    """dim of chain maps modulo homotopy between complexes of modules, over QQ.

    Degrees are list positions (both complexes aligned to the same window).
    x_diffs[i]: x_dims[i] x x_dims[i+1] matrix of the degree-raising map in
    row convention, or [] when either side is zero.  x_actions[i][r]: square
    action matrix of the r-th algebra basis element on the degree-i module.
    Chain maps are module maps F^i with D_X^i F^{i+1} = F^i D_Y^i; homotopies
    are module maps H^i into degree i-1 with delta(H)^i = D_X^i H^{i+1}
    + H^i D_Y^{i-1}.
    """
    L = len(x_dims)
    nalg = len(x_actions[0]) if x_dims and x_actions else len(y_actions[0])

    f_off = []
    total_f = 0
    for i in range(L):
        f_off.append(total_f)
        total_f += x_dims[i] * y_dims[i]

    def f_idx(i, a, b):
        return f_off[i] + a * y_dims[i] + b

    rows = []
    for i in range(L):
        if x_dims[i] == 0 or y_dims[i] == 0:
            continue
        for r in range(nalg):
            A = x_actions[i][r]
            B = y_actions[i][r]
            for a in range(x_dims[i]):
                for b in range(y_dims[i]):
                    row = [Fraction(0)] * total_f
                    for k in range(x_dims[i]):
                        row[f_idx(i, k, b)] += A[a][k]
                    for l in range(y_dims[i]):
                        row[f_idx(i, a, l)] -= B[l][b]
                    rows.append(row)
    for i in range(L - 1):
        DX = x_diffs[i]
        DY = y_diffs[i]
        for a in range(x_dims[i]):
            for b in range(y_dims[i + 1]):
                row = [Fraction(0)] * total_f
                if DX and y_dims[i + 1]:
                    for k in range(x_dims[i + 1]):
                        row[f_idx(i + 1, k, b)] += DX[a][k]
                if DY and y_dims[i]:
                    for l in range(y_dims[i]):
                        row[f_idx(i, a, l)] -= DY[l][b]
                if any(row):
                    rows.append(row)
    z_basis = plain_nullspace(rows, total_f)

    h_off = []
    total_h = 0
    for i in range(L):
        h_off.append(total_h)
        prev = y_dims[i - 1] if i >= 1 else 0
        total_h += x_dims[i] * prev

    def h_idx(i, a, b):
        return h_off[i] + a * y_dims[i - 1] + b

    hrows = []
    for i in range(1, L):
        if x_dims[i] == 0 or y_dims[i - 1] == 0:
            continue
        for r in range(nalg):
            A = x_actions[i][r]
            B = y_actions[i - 1][r]
            for a in range(x_dims[i]):
                for b in range(y_dims[i - 1]):
                    row = [Fraction(0)] * total_h
                    for k in range(x_dims[i]):
                        row[h_idx(i, k, b)] += A[a][k]
                    for l in range(y_dims[i - 1]):
                        row[h_idx(i, a, l)] -= B[l][b]
                    hrows.append(row)
    h_basis = plain_nullspace(hrows, total_h) if total_h else []

    images = []
    for hvec in h_basis:
        img = [Fraction(0)] * total_f
        for i in range(L):
            if x_dims[i] == 0 or y_dims[i] == 0:
                continue
            # D_X^i H^{i+1}
            if i + 1 < L and x_diffs[i] and x_dims[i + 1] and y_dims[i]:
                for a in range(x_dims[i]):
                    for b in range(y_dims[i]):
                        acc = Fraction(0)
                        for k in range(x_dims[i + 1]):
                            acc += x_diffs[i][a][k] * hvec[h_idx(i + 1, k, b)]
                        img[f_idx(i, a, b)] += acc
            # H^i D_Y^{i-1}
            if i >= 1 and y_diffs[i - 1] and y_dims[i - 1]:
                for a in range(x_dims[i]):
                    for b in range(y_dims[i]):
                        acc = Fraction(0)
                        for l in range(y_dims[i - 1]):
                            acc += hvec[h_idx(i, a, l)] * y_diffs[i - 1][l][b]
                        img[f_idx(i, a, b)] += acc
        images.append(img)
    b_dim = plain_rank(images) if images else 0
    return len(z_basis) - b_dim
