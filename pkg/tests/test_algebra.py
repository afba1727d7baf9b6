"""Exact linear algebra: rings, sparse matrices, Smith form, homology."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morseflow.algebra import (HomologyResult, homology, is_chain_homotopy,
                               is_chain_map, ordered_echelon, reduce_against,
                               smith_normal_form)
from morseflow.errors import (DimensionMismatch, NonUnitError,
                              NotADifferential)
from morseflow.matrix import SparseMatrix, vec_apply
from morseflow.rings import Q, Z, Z2, ring_by_name

from oracles import (det_bareiss, determinantal_divisors, z2_homology_rank,
                     z2_matrix_to_rowmasks)


def mat(ring, ids, entries):
    return SparseMatrix(ring, ids, ids, entries)


class TestRings:
    def test_z2_reduces(self):
        assert Z2.coerce(7) == 1 and Z2.coerce(-4) == 0

    def test_z2_inverse(self):
        assert Z2.invert(1) == 1
        with pytest.raises(NonUnitError):
            Z2.invert(0)

    def test_integer_units(self):
        assert Z.is_unit(-1) and Z.is_unit(1) and not Z.is_unit(2)
        assert Z.exact_div(6, -3) == -2

    def test_rational_field(self):
        assert Q.invert(Fraction(3, 7)) == Fraction(7, 3)
        assert Q.is_field() and Z2.is_field() and not Z.is_field()

    def test_lookup(self):
        assert ring_by_name("z2") is Z2 and ring_by_name("Q") is Q


class TestSparseMatrix:
    def test_zero_entries_dropped(self):
        m = mat(Z, ["a", "b"], {("a", "b"): 0, ("b", "a"): 5})
        assert m.entries == {("b", "a"): 5}

    def test_mul_identity(self):
        m = mat(Z, ["a", "b"], {("a", "b"): 3})
        assert m.mul(SparseMatrix.identity(Z, ["a", "b"])) == m

    def test_mul_mismatch(self):
        m = mat(Z, ["a", "b"], {})
        other = mat(Z, ["x", "y"], {})
        with pytest.raises(DimensionMismatch):
            m.mul(other)

    def test_restrict_and_embed(self):
        m = mat(Z, ["a", "b", "c"], {("a", "b"): 1, ("a", "c"): 2})
        r = m.restrict(["a", "b"])
        assert r.entries == {("a", "b"): 1}
        back = r.embed(["a", "b", "c"])
        assert back.entry("a", "c") == 0

    def test_vec_apply_row_convention(self):
        # operator c1 -> c3, c2 -> c3: the chain c1+c2 maps to 2*c3
        m = mat(Z, ["c1", "c2", "c3"], {("c1", "c3"): 1, ("c2", "c3"): 1})
        assert vec_apply(Z, {"c1": 1, "c2": 1}, m) == {"c3": 2}


class TestSmithNormalForm:
    def test_diag_2_3(self):
        # oracle: gcd of 1x1 minors is 1, gcd of 2x2 minors is 6
        assert determinantal_divisors([[2, 0], [0, 3]]) == [1, 6]
        m = mat(Z, ["a", "b"], {("a", "a"): 2, ("b", "b"): 3})
        u, s, v = smith_normal_form(m)
        assert s.to_dense(["a", "b"], ["a", "b"]) == [[1, 0], [0, 6]]
        assert u.mul(m).mul(v) == s

    def test_zero_matrix(self):
        m = mat(Z, ["a", "b"], {})
        u, s, v = smith_normal_form(m)
        assert s.is_zero()
        assert u == SparseMatrix.identity(Z, ["a", "b"])
        assert v == SparseMatrix.identity(Z, ["a", "b"])

    def test_identity(self):
        m = SparseMatrix.identity(Z, ["a", "b", "c"])
        _, s, _ = smith_normal_form(m)
        assert s == m

    def test_rejects_non_integer(self):
        with pytest.raises(DimensionMismatch):
            smith_normal_form(mat(Q, ["a"], {("a", "a"): 1}))

    @settings(max_examples=120, deadline=None)
    @given(st.integers(1, 5), st.integers(1, 5), st.data())
    def test_random_matrices(self, rows, cols, data):
        ids_r = ["r%d" % i for i in range(rows)]
        ids_c = ["c%d" % i for i in range(cols)]
        dense = [[data.draw(st.integers(-6, 6)) for _ in range(cols)]
                 for _ in range(rows)]
        m = SparseMatrix.from_rows(Z, ids_r, ids_c, dense)
        u, s, v = smith_normal_form(m)
        assert u.mul(m).mul(v) == s
        assert abs(det_bareiss(u.to_dense(ids_r, ids_r))) == 1
        assert abs(det_bareiss(v.to_dense(ids_c, ids_c))) == 1
        diag = [s.entry(ids_r[i], ids_c[i]) for i in range(min(rows, cols))]
        off = {k: val for k, val in s.entries.items()
               if ids_r.index(k[0]) != ids_c.index(k[1])}
        assert not off
        chain = [d for d in diag if d != 0]
        assert all(d >= 0 for d in diag)
        assert all(chain[i + 1] % chain[i] == 0 for i in range(len(chain) - 1))
        assert chain == determinantal_divisors(dense)


def boundary_fixture(ring):
    return mat(ring, ["c1", "c2", "c3"], {("c1", "c3"): 1, ("c2", "c3"): 1})


class TestHomology:
    def test_zero_boundary(self):
        for ring in (Z2, Z, Q):
            res = homology(mat(ring, ["a", "b", "c", "d"], {}))
            assert res.free_rank == 4 and res.torsion == ()

    def test_two_to_one(self):
        res = homology(boundary_fixture(Z2))
        assert res == HomologyResult("Z2", 1, ())

    def test_single_pivot(self):
        for ring in (Z2, Z, Q):
            res = homology(mat(ring, ["p", "m"], {("p", "m"): 1}))
            assert res.free_rank == 0 and res.torsion == ()

    def test_not_a_differential(self):
        bad = mat(Z2, ["c1", "c2", "c3"], {("c1", "c2"): 1, ("c2", "c3"): 1})
        with pytest.raises(NotADifferential):
            homology(bad)

    def test_torsion(self):
        res = homology(mat(Z, ["c1", "c2"], {("c1", "c2"): 2}))
        assert res.free_rank == 0 and res.torsion == (2,)

    def test_torsion_chain(self):
        m = mat(Z, ["a", "b", "x", "y"], {("a", "x"): 2, ("b", "y"): 6})
        res = homology(m)
        assert res.free_rank == 0 and res.torsion == (2, 6)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.data())
    def test_rank_formula_over_q(self, na, nb, data):
        # upper block maps only to lower block, so the square is zero
        ids = ["u%d" % i for i in range(na)] + ["l%d" % i for i in range(nb)]
        ent = {}
        for i in range(na):
            for j in range(nb):
                v = data.draw(st.integers(-3, 3))
                if v:
                    ent[("u%d" % i, "l%d" % j)] = Fraction(v)
        m = mat(Q, ids, ent)
        dense = m.to_dense(ids, ids)
        rank = sum(1 for d in determinantal_divisors(
            [[int(x) for x in row] for row in dense]) if d != 0)
        assert homology(m).free_rank == len(ids) - 2 * rank

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.data())
    def test_against_z2_enumeration(self, na, nb, data):
        ids = ["u%d" % i for i in range(na)] + ["l%d" % i for i in range(nb)]
        ent = {}
        for i in range(na):
            for j in range(nb):
                if data.draw(st.booleans()):
                    ent[("u%d" % i, "l%d" % j)] = 1
        m = mat(Z2, ids, ent)
        assert homology(m).free_rank == z2_homology_rank(m.to_dense(ids, ids))


class TestChainMaps:
    def d_minus(self, ring):
        return mat(ring, ["c1", "c2", "c3"], {("c2", "c3"): 1})

    def d_plus(self, ring):
        return boundary_fixture(ring)

    def slide_map(self, ring):
        ids = ["c1", "c2", "c3"]
        a = SparseMatrix.identity(ring, ids)
        return a.add(mat(ring, ids, {("c1", "c2"): 1}))

    def test_identity_is_chain_map(self):
        d = self.d_plus(Z2)
        assert is_chain_map(SparseMatrix.identity(Z2, d.rows), d, d)

    def test_slide_map_is_chain_map(self):
        # c1 -> c1 + c2 intertwines the two differentials
        assert is_chain_map(self.slide_map(Z2), self.d_plus(Z2), self.d_minus(Z2))

    def test_identity_between_different_differentials_fails(self):
        ident = SparseMatrix.identity(Z2, ["c1", "c2", "c3"])
        assert not is_chain_map(ident, self.d_plus(Z2), self.d_minus(Z2))

    def test_zero_homotopy(self):
        d = self.d_plus(Z2)
        zero = SparseMatrix.zero(Z2, d.rows)
        assert is_chain_homotopy(d, zero, zero)

    def test_birth_triple_homotopy(self):
        # one old generator c, a born pair (p upper, m lower), pivot 1,
        # new column w(c) = 1; frozen 3x3 identity check
        ids = ["c", "p", "m"]
        d = mat(Z2, ids, {("c", "m"): 1, ("p", "m"): 1})
        h = mat(Z2, ids, {("m", "p"): 1})
        lhs = mat(Z2, ids, {("c", "p"): 1, ("p", "p"): 1, ("m", "m"): 1})
        assert is_chain_homotopy(d, h, lhs)
        # and lhs is exactly id - (p then i) for the birth bundle maps
        proj = SparseMatrix(Z2, ids, ["c"], {("c", "c"): 1})
        incl = SparseMatrix(Z2, ["c"], ids, {("c", "c"): 1, ("c", "p"): 1})
        assert SparseMatrix.identity(Z2, ids).sub(proj.mul(incl)) == lhs

    def test_shape_mismatch(self):
        d = self.d_plus(Z2)
        other = mat(Z2, ["x"], {})
        with pytest.raises(DimensionMismatch):
            is_chain_map(SparseMatrix.identity(Z2, d.rows), d, other)


class TestOrderedEchelon:
    def test_field_reduction(self):
        piv = ordered_echelon(Z2, [[1, 1, 0], [1, 0, 1]])
        assert set(piv) == {0, 1}
        red, blocked = reduce_against(Z2, [0, 1, 1], piv)
        assert blocked is None and all(x == 0 for x in red)

    def test_integer_gcd_combination(self):
        piv = ordered_echelon(Z, [[4, 0, 1], [6, 1, 0]])
        assert piv[0][0] == 2  # gcd of 4 and 6 becomes the top pivot

    def test_integer_blocking(self):
        piv = ordered_echelon(Z, [[2, 1]])
        red, blocked = reduce_against(Z, [1, 0], piv)
        assert blocked == 0  # 2 does not divide 1, the top cannot clear

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4),
                    min_size=1, max_size=4))
    def test_span_membership(self, vecs):
        piv = ordered_echelon(Z, vecs)
        for v in vecs:
            _, blocked = reduce_against(Z, v, piv)
            assert blocked is None
