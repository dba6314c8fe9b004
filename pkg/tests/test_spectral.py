import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import (
    determinant_by_elimination,
    imprimitivity_by_cycles,
    simple_by_exhaustion,
)
from thurston_obstruct import (
    NonnegMatrix,
    PreconditionError,
    SpectralTag,
    below_one_closed_indices,
    charpoly,
    exists_positive_subinvariant_vector,
    imprimitive_block_decomposition,
    imprimitivity_index,
    is_irreducible,
    is_primitive,
    leading_eigenvalue_interval,
    power_positive_exponent,
    scc_partition,
    spectral_radius_class,
    wielandt_bound,
)
from thurston_obstruct.polynomials import evaluate

F = Fraction

ENTRY_POOL = [F(0), F(0), F(0), F(1), F(2), F(1, 2), F(1, 3), F(3, 2)]

entries = st.sampled_from(ENTRY_POOL)


@st.composite
def matrices(draw, max_n=5):
    n = draw(st.integers(min_value=1, max_value=max_n))
    rows = [[draw(entries) for _ in range(n)] for _ in range(n)]
    return NonnegMatrix(rows)


# ---------------------------------------------------------------------------
# characteristic polynomial


@given(matrices(max_n=5), st.integers(-7, 7), st.integers(1, 5))
def test_charpoly_matches_determinant(m, num, den):
    t = F(num, den)
    p = charpoly(m)
    shifted = [
        [t * (1 if i == j else 0) - m.rows[i][j] for j in range(m.n)] for i in range(m.n)
    ]
    assert evaluate(p, t) == determinant_by_elimination(shifted)


def test_charpoly_empty_matrix():
    assert charpoly(NonnegMatrix([])) == (F(1),)


# ---------------------------------------------------------------------------
# trichotomy and intervals


def test_spectral_class_examples():
    assert spectral_radius_class(NonnegMatrix([[F(1, 2)]])).tag is SpectralTag.BELOW_ONE
    assert spectral_radius_class(NonnegMatrix([[0, 1], [1, 0]])).tag is SpectralTag.EXACTLY_ONE
    sc = spectral_radius_class(NonnegMatrix([[0, 2], [1, 0]]))
    assert sc.tag is SpectralTag.ABOVE_ONE
    assert sc.lo > 1
    assert sc.lo * sc.lo <= 2 <= sc.hi * sc.hi


def test_spectral_class_empty():
    sc = spectral_radius_class(NonnegMatrix([]))
    assert sc.tag is SpectralTag.BELOW_ONE


def test_spectral_class_repeated_eigenvalue_one():
    # eigenvalue 1 with algebraic multiplicity two, plus a sub-1 block
    m = NonnegMatrix([[1, 0, 0], [0, 1, 0], [0, 0, Fraction(1, 2)]])
    sc = spectral_radius_class(m)
    assert sc.tag is SpectralTag.EXACTLY_ONE
    assert (sc.lo, sc.hi) == (1, 1)


def test_spectral_class_one_eigenvalue_masked_by_larger():
    # 1 is an eigenvalue but the leading one lies above it
    m = NonnegMatrix([[1, 0], [0, 2]])
    sc = spectral_radius_class(m)
    assert sc.tag is SpectralTag.ABOVE_ONE
    assert sc.lo > 1
    assert sc.lo <= 2 <= sc.hi


def test_interval_examples():
    assert leading_eigenvalue_interval(NonnegMatrix([[2]]), F(1, 100)) == (F(2), F(2))
    lo, hi = leading_eigenvalue_interval(NonnegMatrix([[0, 2], [1, 0]]), F(1, 1000))
    assert hi - lo <= F(1, 1000)
    assert lo * lo <= 2 <= hi * hi
    lo, hi = leading_eigenvalue_interval(NonnegMatrix([[F(3, 2), 0], [0, 1]]), F(1, 10))
    assert lo <= F(3, 2) <= hi


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_tag_consistent_with_intervals(m):
    sc = spectral_radius_class(m)
    if sc.tag is SpectralTag.ABOVE_ONE:
        assert sc.lo > 1
    elif sc.tag is SpectralTag.BELOW_ONE:
        assert sc.hi < 1
    else:
        assert (sc.lo, sc.hi) == (1, 1)
    lo, hi = leading_eigenvalue_interval(m, F(1, 10**6))
    assert hi - lo <= F(1, 10**6)
    # both brackets contain the same eigenvalue, so they intersect
    assert max(lo, sc.lo) <= min(hi, sc.hi)


@given(matrices())
@settings(max_examples=40, deadline=None)
def test_shrinking_widths_never_disjoint(m):
    a = leading_eigenvalue_interval(m, F(1, 10))
    b = leading_eigenvalue_interval(m, F(1, 10**7))
    assert max(a[0], b[0]) <= min(a[1], b[1])


# ---------------------------------------------------------------------------
# block structure


def test_scc_examples():
    bs = scc_partition(NonnegMatrix([[1, 0], [1, 1]]))
    assert bs.permutation == (0, 1)
    assert bs.block_sizes == (1, 1)
    bs = scc_partition(NonnegMatrix([[0, 1], [1, 0]]))
    assert bs.block_sizes == (2,)
    # support edges 1 -> 2 -> 3 with a loop at 3 (0-indexed: 0 -> 1 -> 2, 2 -> 2)
    bs = scc_partition(NonnegMatrix([[0, 2, 0], [0, 0, 1], [0, 0, 3]]))
    assert bs.blocks() == ((2,), (1,), (0,))


def test_scc_empty():
    assert scc_partition(NonnegMatrix([])).block_sizes == ()


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_scc_block_lower_triangular(m):
    bs = scc_partition(m)
    perm = bs.permutation
    assert sorted(perm) == list(range(m.n))
    blocks = bs.blocks()
    # entries from an earlier block's rows into a later block's columns vanish
    for bi, rows_blk in enumerate(blocks):
        for bj in range(bi + 1, len(blocks)):
            for i in rows_blk:
                for j in blocks[bj]:
                    assert m.rows[i][j] == 0
    for flag, blk in zip(bs.blocks_irreducible, blocks):
        assert flag == is_irreducible(m.submatrix(list(blk)))


@given(matrices())
@settings(max_examples=50, deadline=None)
def test_leading_eigenvalue_is_max_over_blocks(m):
    sc = spectral_radius_class(m)
    order = {SpectralTag.BELOW_ONE: 0, SpectralTag.EXACTLY_ONE: 1, SpectralTag.ABOVE_ONE: 2}
    tags = [
        spectral_radius_class(m.submatrix(list(b))).tag for b in scc_partition(m).blocks()
    ]
    assert order[sc.tag] == max(order[t] for t in tags)
    width = F(1, 10**6)
    lo, hi = leading_eigenvalue_interval(m, width)
    block_intervals = [
        leading_eigenvalue_interval(m.submatrix(list(b)), width)
        for b in scc_partition(m).blocks()
    ]
    best_lo = max(a for a, _ in block_intervals)
    best_hi = max(b for _, b in block_intervals)
    assert max(lo, best_lo) <= min(hi, best_hi)


# ---------------------------------------------------------------------------
# irreducibility, primitivity, cyclic structure


def test_irreducibility_examples():
    two_cycle = NonnegMatrix([[0, 1], [1, 0]])
    assert is_irreducible(two_cycle)
    assert imprimitivity_index(two_cycle) == 2
    assert not is_primitive(two_cycle)
    fib = NonnegMatrix([[1, 1], [1, 0]])
    assert is_primitive(fib)
    assert imprimitivity_index(fib) == 1
    assert not is_irreducible(NonnegMatrix([[1, 0], [1, 1]]))
    assert not is_irreducible(NonnegMatrix([[0]]))
    assert is_irreducible(NonnegMatrix([[F(1, 7)]]))


def test_imprimitivity_rejects_reducible():
    with pytest.raises(PreconditionError):
        imprimitivity_index(NonnegMatrix([[1, 0], [1, 1]]))


def _random_irreducible(rng, n, values=(0, 1)):
    while True:
        rows = [[rng.choice(values) for _ in range(n)] for _ in range(n)]
        m = NonnegMatrix(rows)
        if is_irreducible(m):
            return m


def test_imprimitivity_matches_cycle_gcd():
    rng = random.Random(7)
    for _ in range(120):
        n = rng.randint(1, 6)
        m = _random_irreducible(rng, n)
        assert imprimitivity_index(m) == imprimitivity_by_cycles(m)


def test_power_positive_examples():
    assert power_positive_exponent(NonnegMatrix([[1]])) == 1
    assert power_positive_exponent(NonnegMatrix([[1, 1], [1, 0]])) == 2
    assert power_positive_exponent(NonnegMatrix([[1, 0], [0, 1]])) is None


def test_wielandt_bound_on_primitive_samples():
    rng = random.Random(11)
    seen = 0
    while seen < 60:
        n = rng.randint(2, 6)
        m = _random_irreducible(rng, n)
        if not is_primitive(m):
            continue
        seen += 1
        k = power_positive_exponent(m)
        assert k is not None and k <= wielandt_bound(n)


def test_imprimitive_decomposition_examples():
    dec = imprimitive_block_decomposition(NonnegMatrix([[0, 2], [1, 0]]))
    assert dec.exponent == 2
    assert dec.block_sizes == (1, 1)
    assert [b.rows for b in dec.blocks] == [((F(2),),), ((F(2),),)]
    cyc3 = NonnegMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    dec3 = imprimitive_block_decomposition(cyc3)
    assert dec3.exponent == 3
    assert dec3.block_sizes == (1, 1, 1)
    fib = imprimitive_block_decomposition(NonnegMatrix([[1, 1], [1, 0]]))
    assert fib.exponent == 2
    assert len(fib.blocks) == 1 and fib.blocks[0].is_positive()


def test_imprimitive_decomposition_rejects_reducible():
    with pytest.raises(PreconditionError):
        imprimitive_block_decomposition(NonnegMatrix([[1, 0], [1, 1]]))


def test_imprimitive_decomposition_reassembles():
    rng = random.Random(23)
    for _ in range(40):
        n = rng.randint(1, 5)
        m = _random_irreducible(rng, n, values=(0, 1, 2))
        dec = imprimitive_block_decomposition(m)
        mk = m.pow(dec.exponent)
        perm = dec.permutation
        permuted = [[mk.rows[i][j] for j in perm] for i in perm]
        # reassemble from the blocks: off-diagonal zero, diagonal positive
        pos = 0
        expected = [[F(0)] * m.n for _ in range(m.n)]
        for size, block in zip(dec.block_sizes, dec.blocks):
            assert block.is_positive()
            for i in range(size):
                for j in range(size):
                    expected[pos + i][pos + j] = block.rows[i][j]
            pos += size
        assert permuted == expected


# ---------------------------------------------------------------------------
# positive subinvariant vectors


def test_subinvariant_examples():
    assert exists_positive_subinvariant_vector(NonnegMatrix([[0, 1], [1, 0]])) == (F(1), F(1))
    assert exists_positive_subinvariant_vector(NonnegMatrix([[F(1, 2), 0], [1, 1]])) is None
    assert exists_positive_subinvariant_vector(NonnegMatrix([[2]])) == (F(1),)


def test_subinvariant_fed_block():
    # upper block feeds the sub-1 block, so a certificate exists
    m = NonnegMatrix([[F(1, 2), 1], [0, 1]])
    v = exists_positive_subinvariant_vector(m)
    assert v is not None


def test_subinvariant_irrational_eigenvalue():
    v = exists_positive_subinvariant_vector(NonnegMatrix([[0, 8], [F(1, 2), 0]]))
    assert v is not None


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_subinvariant_matches_exhaustion_and_verifies(m):
    v = exists_positive_subinvariant_vector(m)
    assert (v is not None) == simple_by_exhaustion(m)
    if v is not None:
        assert all(x > 0 for x in v)
        mv = [sum(m.rows[i][j] * v[j] for j in range(m.n)) for i in range(m.n)]
        assert all(a >= b for a, b in zip(mv, v))


@given(matrices())
@settings(max_examples=50, deadline=None)
def test_below_one_closure_drop_preserves_class(m):
    sc = spectral_radius_class(m)
    dropped = below_one_closed_indices(m)
    if sc.tag is SpectralTag.BELOW_ONE:
        assert len(dropped) == m.n
        return
    keep = [i for i in range(m.n) if i not in set(dropped)]
    sub = m.submatrix(keep)
    assert spectral_radius_class(sub).tag is sc.tag
    assert exists_positive_subinvariant_vector(sub) is not None


# ---------------------------------------------------------------------------
# monotonicity of the leading eigenvalue


def test_submatrix_eigenvalue_strictly_smaller():
    rng = random.Random(31)
    checked = 0
    while checked < 25:
        n = rng.randint(2, 5)
        m = _random_irreducible(rng, n, values=(0, 1, 2))
        checked += 1
        full_iv = leading_eigenvalue_interval(m, F(1, 10**9))
        for drop in range(n):
            keep = [i for i in range(n) if i != drop]
            sub_iv = leading_eigenvalue_interval(m.submatrix(keep), F(1, 10**9))
            width = F(1, 10**9)
            while not sub_iv[1] < full_iv[0]:
                width /= 2**10
                assert width > F(1, 10**40), "intervals failed to separate"
                full_iv = leading_eigenvalue_interval(m, width)
                sub_iv = leading_eigenvalue_interval(m.submatrix(keep), width)


def test_matrix_validation():
    with pytest.raises(ValueError):
        NonnegMatrix([[1, 2]])
    with pytest.raises(ValueError):
        NonnegMatrix([[-1]])
    with pytest.raises(TypeError):
        NonnegMatrix([[0.5]])
