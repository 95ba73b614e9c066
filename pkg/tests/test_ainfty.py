import random
from fractions import Fraction
from itertools import combinations_with_replacement, product as iproduct
from math import comb

import pytest

from koszulmf.ainfty import (
    Cyc,
    FiniteAbelianGroupData,
    FiniteAInftyAlgebra,
    Inconsistent,
    RequiresMinimal,
    check_stasheff,
    exterior_normalize,
    exterior_residue_dims,
    from_minimal_model,
    hkr_dim,
    opposite,
    opposite_sign,
    smash,
    supercommutativity_check,
    wedge_algebra,
)
from koszulmf.lattice import cover_residue, e_vec, size
from koszulmf.minimal import build_minimal_model
from koszulmf.weyl import MFConfig

F = Fraction


@pytest.fixture(scope="module")
def alg_n1():
    model = build_minimal_model(MFConfig(1), arities=(2, 3, 4))
    return from_minimal_model(model)


# ---------------------------------------------------------------- coefficients


def test_cyc_arithmetic():
    a = Cyc(F(1, 2), 1, 3)
    b = Cyc(F(1, 3), 4, 3)  # exponent normalizes to 1
    assert (a + b).mag == F(5, 6) and (a + b).exp == 1
    assert a + Cyc(F(0), 2, 3) == a
    assert (a * b) == Cyc(F(1, 6), 2, 3)
    assert (-a).mag == F(-1, 2)
    assert 0 + a == a
    assert (-1) * a == -a
    assert not Cyc(F(0), 2, 3)
    with pytest.raises(ValueError):
        a + Cyc(F(1), 2, 3)
    with pytest.raises(ValueError):
        a * Cyc(F(1), 0, 5)


# --------------------------------------------------------------------- checker


def test_wedge_is_consistent():
    alg = wedge_algebra(1)
    # one mu^2 entry per pair of disjoint subsets of a 3-element set
    assert len(alg.ops[2]) == 3 ** 3
    alg.validate_graded()
    assert check_stasheff(alg, 4) == []
    assert check_stasheff(alg, 3, exhaustive=True) == []


def test_checker_flags_a_flipped_sign():
    alg = wedge_algebra(1)
    key = (0b011, (0b001, 0b010))
    alg.ops[2][key] = -alg.ops[2][key]
    joined = check_stasheff(alg, 3)
    assert joined
    assert joined == check_stasheff(alg, 3, exhaustive=True)
    for arity, tup, out, total in joined:
        assert arity == 3 and total != 0


def test_model_passes_stasheff(alg_n1):
    alg_n1.validate_graded()
    # tables at arity 2, 3, 4 decide every identity up to arity 5
    assert check_stasheff(alg_n1, 5) == []


# -------------------------------------------------------------------- opposite


def test_opposite_sign_even_pair_is_plain_swap():
    assert opposite_sign([0, 0]) == 0
    assert opposite_sign([1, 1]) == 1
    assert opposite_sign([1, 0]) == 1


def test_opposite_involution(alg_n1):
    back = opposite(opposite(alg_n1))
    assert back.ops == alg_n1.ops
    assert back.zdeg == alg_n1.zdeg


def test_opposite_of_model_is_consistent(alg_n1):
    assert check_stasheff(opposite(alg_n1), 5) == []


def _rescale(alg, rng):
    """A random diagonal change of basis; preserves consistency exactly."""
    scales = {x: rng.choice([1, -1]) * F(rng.choice([1, 2, 3]),
                                         rng.choice([1, 2]))
              for x in alg.basis}
    ops = {}
    for k, table in alg.ops.items():
        new = {}
        for (out, ins), coef in table.items():
            factor = F(1)
            for x in ins:
                factor *= scales[x]
            new[(out, ins)] = coef * factor / scales[out]
        ops[k] = new
    return FiniteAInftyAlgebra(list(alg.basis), dict(alg.zdeg), ops)


def _small_dga():
    # mu^1(a) = x, mu^1(b) = y, and an even idempotent u: consistent by hand
    basis = ["a", "b", "u", "x", "y", "z"]
    zdeg = {"a": 0, "b": 2, "u": 0, "x": 1, "y": 3, "z": 4}
    ops = {
        1: {("x", ("a",)): F(1), ("y", ("b",)): F(1)},
        2: {("u", ("u", "u")): F(1)},
    }
    return FiniteAInftyAlgebra(basis, zdeg, ops)


def test_opposite_preserves_consistency_on_random_algebras():
    rng = random.Random(20240822)
    seeds = [wedge_algebra(0), _small_dga()]
    for trial in range(50):
        alg = _rescale(seeds[trial % 2], rng)
        assert check_stasheff(alg, 4) == []
        assert check_stasheff(opposite(alg), 4) == []
        assert opposite(opposite(alg)).ops == alg.ops


def test_reversal_sign_matches_cardinality_formula():
    # the closed form in terms of |K_0| and the input cardinalities,
    # checked against the degree formula on every multiset of sizes
    for n in range(1, 5):
        for q in range(0, 3):
            k = 2 + n * q
            for cards in combinations_with_replacement(range(n + 3), k):
                k0 = sum(cards) - (n + 2) * q
                if not 0 <= k0 <= n + 2:
                    continue
                pairs = sum(
                    cards[j] * cards[l] for j in range(k)
                    for l in range(j + 1, k)
                )
                lemma = (n * q * (n * q - 1) // 2 + (1 + n * q) * k0 + pairs) % 2
                assert opposite_sign(list(cards)) == lemma


# ----------------------------------------------------- commutativity and signs


def test_supercommutativity(alg_n1):
    assert supercommutativity_check(wedge_algebra(1)) is True
    assert supercommutativity_check(alg_n1) is True


def test_supercommutativity_negative_control():
    alg = FiniteAInftyAlgebra(
        ["a", "b", "c"], {"a": 1, "b": 1, "c": 2},
        {2: {("c", ("a", "b")): F(1)}},
    )
    assert supercommutativity_check(alg) is False


def test_supercommutativity_needs_minimal():
    alg = FiniteAInftyAlgebra(
        ["a", "x"], {"a": 0, "x": 1}, {1: {("x", ("a",)): F(1)}},
    )
    with pytest.raises(RequiresMinimal):
        supercommutativity_check(alg)


def test_normalize_wedge_gives_plus_one():
    for n in (1, 2):
        sigma = exterior_normalize(wedge_algebra(n), n)
        assert set(sigma.values()) == {1}
        assert len(sigma) == 1 << (n + 2)


def test_normalize_model(alg_n1):
    sigma = exterior_normalize(alg_n1, 1)
    assert set(sigma.values()) <= {1, -1}
    assert sigma[0] == 1
    for j in range(3):
        assert sigma[1 << j] == 1
    assert sigma == exterior_normalize(alg_n1, 1)


def test_normalize_rejects_all_plus_one():
    n = 1
    basis = list(range(8))
    zdeg = {m: size(m) for m in basis}
    table = {(x | y, (x, y)): F(1)
             for x in basis for y in basis if not x & y}
    alg = FiniteAInftyAlgebra(basis, zdeg, {2: table})
    with pytest.raises(Inconsistent):
        exterior_normalize(alg, n)


def test_normalize_preconditions():
    bad = FiniteAInftyAlgebra(
        [0, 1], {0: 0, 1: 1}, {2: {(1, (1, 1)): F(1)}},
    )
    with pytest.raises(ValueError):
        exterior_normalize(bad, -1)
    scaled = wedge_algebra(1)
    key = next(iter(scaled.ops[2]))
    scaled.ops[2][key] = F(2)
    with pytest.raises(ValueError):
        exterior_normalize(scaled, 1)
    with_mu1 = FiniteAInftyAlgebra(
        [0, 1], {0: 0, 1: 1}, {1: {(1, (0,)): F(1)}},
    )
    with pytest.raises(RequiresMinimal):
        exterior_normalize(with_mu1, 1)


# ----------------------------------------------------------------------- smash


def _sum_map_group(n):
    n2 = n + 2
    return FiniteAbelianGroupData((n2,), tuple((1,) for _ in range(n2)))


def test_group_data_validation():
    with pytest.raises(ValueError):
        FiniteAbelianGroupData((0,), ((0,),))
    with pytest.raises(ValueError):
        FiniteAbelianGroupData((3,), ((1, 0),))
    with pytest.raises(ValueError):
        FiniteAbelianGroupData((3,), ((1,), (1,), (2,)))
    grp = _sum_map_group(1)
    assert grp.order == 3 and grp.modulus == 3
    assert len(grp.characters()) == 3
    assert grp.pair((1,), (2,)) == 2
    assert grp.pair((2,), (2,)) == 1


def test_smash_with_trivial_group(alg_n1):
    grp = FiniteAbelianGroupData((1,), tuple((0,) for _ in range(3)))
    sm = smash(alg_n1, grp)
    assert sm.dim() == alg_n1.dim()
    for k, table in alg_n1.ops.items():
        wrapped = {
            ((out, (0,)), tuple((x, (0,)) for x in ins)): Cyc(c, 0, 1)
            for (out, ins), c in table.items()
        }
        assert sm.ops[k] == wrapped


def test_smash_dimension_with_weight_mod_group(alg_n1):
    # Gamma_1 = (Z^3 / diagonal) tensor Z_3, of order 3^2
    grp = FiniteAbelianGroupData((3, 3), ((1, 0), (0, 1), (2, 2)))
    assert grp.order == 3 ** 2
    sm = smash(alg_n1, grp)
    assert sm.dim() == grp.order * alg_n1.dim() == 72


def test_smash_with_sum_map_passes_stasheff(alg_n1):
    sm = smash(alg_n1, _sum_map_group(1))
    assert sm.dim() == 24
    sm.validate_graded()
    assert check_stasheff(sm, 4) == []


def test_smash_twist_exponent_is_visible(alg_n1):
    # a nontrivial character left of a weighted slot must twist the entry
    grp = _sum_map_group(1)
    sm = smash(alg_n1, grp)
    key = ((0b011, (2,)), ((0b001, (1,)), (0b010, (1,))))
    coef = sm.ops[2][key]
    # weight of the right slot is the class of -e_2, residue 2 mod 3
    assert coef == Cyc(F(-1), 2, 3)


def test_smash_block_dimensions(alg_n1):
    sm = smash(alg_n1, _sum_map_group(1))
    counts = {}
    for a, chi in sm.basis:
        r = cover_residue(sm.weight[(a, chi)].rep, 1)
        counts[(chi, r)] = counts.get((chi, r), 0) + 1
    pattern = exterior_residue_dims(1)
    for chi in _sum_map_group(1).characters():
        for r, dim in pattern.items():
            assert counts[(chi, r)] == dim


def test_exterior_residue_dims():
    assert exterior_residue_dims(1) == {0: 2, 1: 3, 2: 3}
    assert exterior_residue_dims(2) == {0: 2, 1: 4, 2: 6, 3: 4}
    for n in range(1, 5):
        dims = exterior_residue_dims(n)
        assert dims[0] == 2
        for r in range(1, n + 2):
            assert dims[r] == comb(n + 2, r)
        assert sum(dims.values()) == 1 << (n + 2)


# ------------------------------------------------------------------ dimensions


def test_hkr_named_values():
    for n in range(1, 5):
        assert hkr_dim(n, 2, -n) == 1
        for d in range(3, 3 * (n + 2) + 1):
            expect = 1 if d == n + 2 else 0
            assert hkr_dim(n, 2, 2 - d) == expect
        assert hkr_dim(n, 0, 0) == 1
        assert hkr_dim(n, 0, 1) == 0


def _hkr_brute(n, r, t):
    n2 = n + 2
    count = 0
    for q in range(-1, max(r, 0) + 2):
        for kmask in range(1 << n2):
            a = [x + q for x in e_vec(kmask, n)]
            if any(x < 0 for x in a):
                continue
            s = sum(a)
            if s != r - t:
                continue
            if F(2 * s + n * size(kmask), n2) == r:
                count += 1
    return count


def test_hkr_matches_brute_force():
    for n in (1, 2, 3):
        for r in range(0, 7):
            for t in range(-8, 9):
                assert hkr_dim(n, r, t) == _hkr_brute(n, r, t), (n, r, t)
