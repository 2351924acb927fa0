"""Idempotent-ideal quotient reports and contraction certificates."""

import pytest

from build_examples import upper_triangular_2, ut2_complexes
from kbproj.algebra import ideal_from_spanning, ideal_generated_by_idempotent, radical
from kbproj.almost import (
    AlmostError,
    ContractionFixture,
    ProjectivityWitness,
    almost_derived_ideal,
    almost_quotient,
    almost_setup,
    contraction_defects,
    in_perp,
    koszul_contraction_fixture,
    perturb_homotopy,
    serre_adjoint_report,
    standard_modules,
    verify_contraction,
)
from kbproj.functors import FiniteSubcat
from kbproj.homcat import AlgMat, chain_map, is_contractible, is_homotopy_equivalence, single_summand_complex
from kbproj.ideals import factor_through_ideal
from kbproj.linalg import Mat


@pytest.fixture(scope="module")
def A():
    return upper_triangular_2()


@pytest.fixture(scope="module")
def window(A):
    data = ut2_complexes(A)
    P1s, P2s, S1r = data["P1s"], data["P2s"], data["S1r"]
    objs = {
        "P1s": P1s, "P2s": P2s, "S1r": S1r,
        "P1s[1]": P1s.shift(1), "P2s[1]": P2s.shift(1), "S1r[1]": S1r.shift(1),
    }
    shifts = {"P1s": "P1s[1]", "P2s": "P2s[1]", "S1r": "S1r[1]"}
    return data, FiniteSubcat(objs, shifts)


def _e(A, name):
    return A.basis_vec(A.basis_names.index(name))


# -- setup and samples ---------------------------------------------------------


def test_setup_from_idempotent(A):
    s = almost_setup(A, e=_e(A, "e11"))
    assert s.ideal.dim == 2 and s.ideal.is_idempotent()


def test_setup_rejects_non_idempotent_ideal(A):
    with pytest.raises(AlmostError, match="not idempotent"):
        almost_setup(A, generators=[_e(A, "e12")])


def test_standard_modules_dims(A):
    mods = standard_modules(A)
    dims = {nm: M.dim for nm, M in mods.items()}
    assert dims == {"R": 3, "0": 0, "P(e11)": 2, "P(e22)": 1,
                    "S(e11)": 1, "S(e22)": 1}


def test_perp_membership(A):
    a = ideal_generated_by_idempotent(A, _e(A, "e11"))
    mods = standard_modules(A)
    killed = {nm for nm, M in mods.items() if in_perp(M, a)}
    assert killed == {"0", "P(e22)", "S(e22)"}


# -- Serre adjunction report ----------------------------------------------------


def test_serre_report_idempotent_corner_ideal(A):
    a = ideal_generated_by_idempotent(A, _e(A, "e11"))
    rep = serre_adjoint_report(A, a)
    assert rep.idempotent and rep.verdict == "certified"
    assert rep.witness is None
    assert rep.checks and all(c.ok for c in rep.checks)
    by_pair = {(c.module, c.perp_module): c for c in rep.checks}
    c = by_pair[("R", "P(e22)")]
    assert c.coreflection_dims == (1, 1)
    assert c.reflection_dims == (2, 2)
    c = by_pair[("P(e11)", "P(e22)")]
    assert c.coreflection_dims == (0, 0)
    assert c.reflection_dims == (1, 1)


def test_serre_report_full_and_zero_ideal(A):
    full = ideal_from_spanning(A, [A.unit])
    rep = serre_adjoint_report(A, full)
    assert rep.idempotent and rep.verdict == "certified"
    zero = ideal_from_spanning(A, [])
    rep = serre_adjoint_report(A, zero)
    assert rep.idempotent and rep.verdict == "certified"


def test_serre_report_radical_refuted(A):
    rad = radical(A)
    rep = serre_adjoint_report(A, rad)
    assert not rep.idempotent and rep.verdict == "refuted"
    w = rep.witness
    assert (w.extension_dim, w.sub_dim, w.quotient_dim) == (3, 1, 2)
    assert w.sub_killed and w.quotient_killed and not w.extension_killed
    assert w.exhibits_failure


# -- corner quotient -------------------------------------------------------------


def test_almost_quotient_corner(A):
    rep = almost_quotient(A, _e(A, "e11"))
    assert rep.corner.dim == 1
    assert rep.verdict == "certified"
    assert rep.module_dims == {"R": 1, "0": 0, "P(e11)": 1, "P(e22)": 0,
                               "S(e11)": 1, "S(e22)": 0}
    assert all(c.ok for c in rep.exactness)


def test_almost_quotient_unit(A):
    rep = almost_quotient(A, A.unit)
    assert rep.corner.dim == A.dim
    assert rep.module_dims == {"R": 3, "0": 0, "P(e11)": 2, "P(e22)": 1,
                               "S(e11)": 1, "S(e22)": 1}
    assert rep.verdict == "certified"


def test_almost_quotient_rejects_non_idempotent(A):
    with pytest.raises(AlmostError, match="not idempotent"):
        almost_quotient(A, _e(A, "e12"))


# -- derived ideal of the corner ideal -------------------------------------------


def test_derived_ideal_corner(A, window):
    data, S = window
    e11 = _e(A, "e11")
    a = ideal_generated_by_idempotent(A, e11)
    rep = almost_derived_ideal(
        A, a, S,
        a_witness=ProjectivityWitness([(0, e11)]),
        square_witnesses={0: ProjectivityWitness([(0, e11)])})
    assert rep.verdict == "certified"
    assert rep.tensor_square_dim == 2
    assert rep.projective_right
    C = rep.cone
    assert C.summands == {-1: (0,), 0: (0, 1)}
    e22 = _e(A, "e22")
    z = A.zero_vec()
    eps = chain_map(C, single_summand_complex(A, 1, 0),
                    {0: AlgMat(A, (1,), (0, 1), [[z, e22]])})
    ok, _ = is_homotopy_equivalence(eps)
    assert ok  # the cone collapses onto the small projective

    assert rep.ideal.dims() == {
        ("P1s", "P1s"): 1, ("P2s", "P1s"): 1, ("P1s", "S1r"): 1,
        ("P1s[1]", "P1s[1]"): 1, ("P2s[1]", "P1s[1]"): 1,
        ("P1s[1]", "S1r[1]"): 1,
    }
    assert rep.idempotent_on_window
    assert rep.ideal == factor_through_ideal(S, ["P1s", "P1s[1]"])


def test_derived_ideal_full(A, window):
    _, S = window
    e11, e22 = _e(A, "e11"), _e(A, "e22")
    a = ideal_from_spanning(A, [A.unit])
    rep = almost_derived_ideal(
        A, a, S,
        a_witness=ProjectivityWitness([(0, e11), (1, e22)]),
        square_witnesses={0: ProjectivityWitness([(0, e11)]),
                          1: ProjectivityWitness([(1, e22)])})
    ok, _ = is_contractible(rep.cone)
    assert ok
    assert rep.tensor_square_dim == 3
    for (an, bn), d in rep.ideal.dims().items():
        assert d == S.hom(an, bn).dim
    assert rep.idempotent_on_window


def test_derived_ideal_zero(A, window):
    _, S = window
    a = ideal_from_spanning(A, [])
    rep = almost_derived_ideal(A, a, S,
                               a_witness=ProjectivityWitness([]),
                               square_witnesses={})
    assert rep.cone.summands == {0: (0, 1)}
    assert rep.ideal.component("P1s", "S1r").dim == 1
    for a, b in (("P1s", "P1s"), ("P2s", "P1s"), ("S1r", "S1r"),
                 ("P2s", "P2s"), ("S1r", "P2s[1]")):
        assert rep.ideal.component(a, b).dim == 0
    assert not rep.idempotent_on_window


def test_derived_ideal_requires_witness(A, window):
    _, S = window
    a = ideal_generated_by_idempotent(A, _e(A, "e11"))
    with pytest.raises(AlmostError, match="witness absent"):
        almost_derived_ideal(A, a, S, a_witness=None, square_witnesses=None)
    with pytest.raises(AlmostError, match="not supported"):
        almost_derived_ideal(A, a, S,
                             a_witness=ProjectivityWitness([(1, _e(A, "e11"))]),
                             square_witnesses={})
    rad = radical(A)
    with pytest.raises(AlmostError, match="must be idempotent"):
        almost_derived_ideal(A, rad, S, a_witness=None, square_witnesses=None)


# -- contraction certificates -----------------------------------------------------


def test_koszul_contraction_accepts():
    fx = koszul_contraction_fixture()
    assert verify_contraction(fx)
    assert contraction_defects(fx) == {}


def test_empty_fixture_accepts():
    ring = koszul_contraction_fixture().ring
    fx = ContractionFixture(ring, {}, {}, {}, name="empty")
    assert verify_contraction(fx)


def test_koszul_rejects_every_single_entry_perturbation():
    fx = koszul_contraction_fixture()
    ring = fx.ring
    deltas = [None, ring.monomial((2, 1))]
    tried = 0
    for n, m in fx.homotopy.items():
        for r in range(m.nrows):
            for c in range(m.ncols):
                for d in deltas:
                    bad = perturb_homotopy(fx, n, r, c, delta=d)
                    assert not verify_contraction(bad), (n, r, c)
                    tried += 1
    assert tried == 8


def test_zeroed_homotopy_defects_localized():
    fx = koszul_contraction_fixture()
    ring = fx.ring
    h = dict(fx.homotopy)
    h[0] = Mat.zeros(ring, 1, 2)
    bad = ContractionFixture(ring, fx.dims, fx.diff, h, name="h0-zero")
    defects = contraction_defects(bad)
    assert set(defects) == {0, -1}
    assert -2 not in defects  # the surviving identity still holds there


def test_fixture_rejects_non_square_zero():
    ring = koszul_contraction_fixture().ring
    x = ring.monomial((1, 0))
    y = ring.monomial((0, 1))
    with pytest.raises(AlmostError, match="square"):
        ContractionFixture(ring, {-2: 1, -1: 2, 0: 1},
                           {-2: Mat.from_rows(ring, [[x, y]]),
                            -1: Mat.from_rows(ring, [[y], [x]])},
                           {})


def test_fixture_rejects_bad_shapes():
    ring = koszul_contraction_fixture().ring
    with pytest.raises(AlmostError, match="shape"):
        ContractionFixture(ring, {0: 2}, {}, {0: Mat.zeros(ring, 1, 1)})
