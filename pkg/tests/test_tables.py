import random
from fractions import Fraction

import pytest

from oracles import minimal_obstructions_by_exhaustion, simple_by_exhaustion
from thurston_obstruct import (
    INESSENTIAL,
    UNTRACKED,
    CurveClass,
    CurveTable,
    DecompositionComponent,
    PreconditionError,
    PullbackComponent,
    Return2222,
    ReturnGeneral,
    ReturnHomeomorphism,
    SpectralTag,
    analyze_table,
    check_canonical_candidate,
    classify_multicurve,
    extract_simple_core,
    find_levy_cycles,
    find_minimal_obstructions,
    is_completely_invariant,
    is_invariant,
    is_simple_obstruction,
    spectral_radius_class,
    thurston_matrix,
)

F = Fraction


def levy_two_cycle():
    return CurveTable(
        map_degree=2,
        classes=(
            CurveClass("g1", (PullbackComponent(1, "g2"),)),
            CurveClass("g2", (PullbackComponent(1, "g1"),)),
        ),
    )


def half_block_table():
    # matrix [[1/2, 0], [1, 1]] over (g1, g2)
    return CurveTable(
        map_degree=3,
        classes=(
            CurveClass("g1", (PullbackComponent(2, "g1"), PullbackComponent(1, "g2"))),
            CurveClass("g2", (PullbackComponent(1, "g2"),)),
        ),
    )


def test_matrix_examples():
    triple = CurveTable(
        map_degree=6,
        classes=(
            CurveClass(
                "g",
                (
                    PullbackComponent(2, "g"),
                    PullbackComponent(2, "g"),
                    PullbackComponent(2, "g"),
                ),
            ),
        ),
    )
    assert thurston_matrix(triple).rows == ((F(3, 2),),)
    lone = CurveTable(
        map_degree=2,
        classes=(CurveClass("g", (PullbackComponent(2, INESSENTIAL),)),),
    )
    assert thurston_matrix(lone).rows == ((F(0),),)
    assert thurston_matrix(levy_two_cycle()).rows == ((F(0), F(1)), (F(1), F(0)))


def test_matrix_unknown_class():
    with pytest.raises(PreconditionError):
        thurston_matrix(levy_two_cycle(), ["g1", "nope"])


def test_submatrix_consistency():
    table = half_block_table()
    full = thurston_matrix(table)
    only_g2 = thurston_matrix(table, ["g2"])
    assert only_g2.rows == full.submatrix([1]).rows


def test_invariance_examples():
    table = levy_two_cycle()
    assert is_invariant(table, ["g1", "g2"]) is True
    assert is_completely_invariant(table, ["g1", "g2"]) is True
    assert is_invariant(table, ["g1"]) is False
    selfmap = CurveTable(
        map_degree=3,
        classes=(
            CurveClass(
                "g", (PullbackComponent(2, "g"), PullbackComponent(1, INESSENTIAL))
            ),
        ),
    )
    assert is_invariant(selfmap, ["g"]) is True


def test_invariance_unknown_with_untracked():
    table = CurveTable(
        map_degree=2,
        classes=(
            CurveClass("g", (PullbackComponent(1, "g"), PullbackComponent(1, UNTRACKED))),
        ),
    )
    assert is_invariant(table, ["g"]) is None
    assert is_completely_invariant(table, ["g"]) is None


def test_classification_examples():
    triple = CurveTable(
        map_degree=6,
        classes=(
            CurveClass("g", tuple(PullbackComponent(2, "g") for _ in range(3))),
        ),
    )
    assert classify_multicurve(triple, ["g"]).spectral.tag is SpectralTag.ABOVE_ONE
    assert classify_multicurve(triple, ["g"]).is_obstruction
    two_thirds = CurveTable(
        map_degree=6,
        classes=(
            CurveClass("g", (PullbackComponent(3, "g"), PullbackComponent(3, "g"))),
        ),
    )
    assert classify_multicurve(two_thirds, ["g"]).spectral.tag is SpectralTag.BELOW_ONE
    assert not classify_multicurve(two_thirds, ["g"]).is_obstruction
    levy = classify_multicurve(levy_two_cycle(), ["g1", "g2"])
    assert levy.spectral.tag is SpectralTag.EXACTLY_ONE
    assert levy.is_obstruction


def test_simple_certificates():
    assert is_simple_obstruction(levy_two_cycle(), ["g1", "g2"]) == (F(1), F(1))
    assert is_simple_obstruction(half_block_table(), ["g1", "g2"]) is None


def test_extract_simple_core():
    assert extract_simple_core(half_block_table(), ["g1", "g2"]) == ("g2",)
    assert extract_simple_core(levy_two_cycle(), ["g1", "g2"]) == ("g1", "g2")
    chain = CurveTable(
        map_degree=4,
        classes=(
            CurveClass("a", (PullbackComponent(2, "a"), PullbackComponent(1, "b"))),
            CurveClass("b", (PullbackComponent(2, "b"), PullbackComponent(1, "c"))),
            CurveClass("c", (PullbackComponent(1, "c"), PullbackComponent(1, "c"))),
        ),
    )
    assert extract_simple_core(chain, ["a", "b", "c"]) == ("c",)
    with pytest.raises(PreconditionError):
        extract_simple_core(
            CurveTable(
                map_degree=2,
                classes=(CurveClass("g", (PullbackComponent(2, "g"),)),),
            ),
            ["g"],
        )


def test_core_preserves_spectral_class():
    table = half_block_table()
    full = spectral_radius_class(thurston_matrix(table))
    core = extract_simple_core(table, None)
    core_class = spectral_radius_class(thurston_matrix(table, core))
    assert core_class.tag is full.tag
    assert is_simple_obstruction(table, core) is not None


def test_core_preserves_leading_eigenvalue_on_random_tables():
    from thurston_obstruct import leading_eigenvalue_interval

    rng = random.Random(67)
    width = F(1, 10**9)
    checked = 0
    while checked < 20:
        table = _random_table(rng, allow_untracked=False)
        matrix = thurston_matrix(table)
        if spectral_radius_class(matrix).tag is SpectralTag.BELOW_ONE:
            continue
        checked += 1
        core = extract_simple_core(table, None)
        lo, hi = leading_eigenvalue_interval(matrix, width)
        clo, chi = leading_eigenvalue_interval(thurston_matrix(table, core), width)
        assert max(lo, clo) <= min(hi, chi), "core changed the leading eigenvalue"


def test_levy_cycles():
    assert find_levy_cycles(levy_two_cycle()) == (("g1", "g2"),)
    deg2 = CurveTable(
        map_degree=2,
        classes=(CurveClass("g", (PullbackComponent(2, "g"),)),),
    )
    assert find_levy_cycles(deg2) == ()
    fixed = CurveTable(
        map_degree=2,
        classes=(CurveClass("g", (PullbackComponent(1, "g"),)),),
    )
    assert find_levy_cycles(fixed) == (("g",),)


def test_levy_cycles_are_obstructions():
    rng = random.Random(17)
    for _ in range(40):
        table = _random_table(rng)
        for cycle in find_levy_cycles(table):
            cls = classify_multicurve(table, list(cycle))
            assert cls.is_obstruction


def test_minimal_obstructions_examples():
    assert find_minimal_obstructions(levy_two_cycle()).multicurves == (("g1", "g2"),)
    triple = CurveTable(
        map_degree=6,
        classes=(CurveClass("g", tuple(PullbackComponent(2, "g") for _ in range(3))),),
    )
    assert find_minimal_obstructions(triple).multicurves == (("g",),)
    assert find_minimal_obstructions(half_block_table()).multicurves == (("g2",),)


def test_minimal_obstructions_match_exhaustion():
    rng = random.Random(41)
    for _ in range(30):
        table = _random_table(rng, allow_untracked=False)
        ids = table.class_ids()
        matrix = thurston_matrix(table)
        expected = {
            tuple(ids[i] for i in subset)
            for subset in minimal_obstructions_by_exhaustion(matrix)
        }
        got = set(find_minimal_obstructions(table).multicurves)
        assert got == expected


def test_minimal_obstructions_are_simple():
    rng = random.Random(43)
    for _ in range(30):
        table = _random_table(rng, allow_untracked=False)
        for curves in find_minimal_obstructions(table).multicurves:
            assert is_simple_obstruction(table, list(curves)) is not None


def test_union_of_disjoint_simple_obstructions_is_simple():
    table = CurveTable(
        map_degree=2,
        classes=(
            CurveClass("g1", (PullbackComponent(1, "g1"),)),
            CurveClass("g2", (PullbackComponent(1, "g2"),)),
        ),
    )
    assert is_simple_obstruction(table, ["g1"]) is not None
    assert is_simple_obstruction(table, ["g2"]) is not None
    assert is_simple_obstruction(table, ["g1", "g2"]) is not None


def test_subset_cap_truncates():
    table = levy_two_cycle()
    res = find_minimal_obstructions(table, subset_cap=1)
    assert res.truncated
    assert res.multicurves == ()


def _random_table(rng, max_classes=4, allow_untracked=True) -> CurveTable:
    n = rng.randint(1, max_classes)
    ids = [f"c{i}" for i in range(n)]
    degree = rng.randint(2, 5)
    classes = []
    for cid in ids:
        comps = []
        budget = degree
        for _ in range(rng.randint(0, 3)):
            d = rng.randint(1, max(1, budget))
            if d > budget:
                break
            budget -= d
            roll = rng.random()
            if roll < 0.15:
                target = INESSENTIAL
            elif allow_untracked and roll < 0.2:
                target = UNTRACKED
            else:
                target = rng.choice(ids)
            comps.append(PullbackComponent(d, target))
        classes.append(CurveClass(cid, tuple(comps)))
    return CurveTable(map_degree=degree, classes=tuple(classes))


def test_random_tables_simple_matches_exhaustion():
    rng = random.Random(59)
    for _ in range(40):
        table = _random_table(rng)
        ids = list(table.class_ids())
        curves = [cid for cid in ids if rng.random() < 0.8] or ids
        matrix = thurston_matrix(table, curves)
        assert (is_simple_obstruction(table, curves) is not None) == simple_by_exhaustion(
            matrix
        )


# ---------------------------------------------------------------------------
# canonical candidate checking


def marked_four_table(partition_sizes=(2, 2)):
    a, b = partition_sizes
    marked = ("p1", "p2", "p3", "p4")
    return CurveTable(
        map_degree=2,
        marked_points=marked,
        classes=(
            CurveClass(
                "g",
                (PullbackComponent(1, "g"),),
                partition=(frozenset(marked[:a]), frozenset(marked[a:])),
            ),
        ),
    )


def test_candidate_rejects_distinct_integer_component():
    report = check_canonical_candidate(
        levy_two_cycle(),
        ["g1", "g2"],
        (DecompositionComponent(4, Return2222(((2, 0), (0, 3)))),),
    )
    assert not report.accepted
    assert not report.components[0].passed


def test_candidate_accepts_all_shear():
    report = check_canonical_candidate(
        levy_two_cycle(),
        ["g1", "g2"],
        (
            DecompositionComponent(4, Return2222(((2, 2), (0, 2)))),
            DecompositionComponent(4, Return2222(((3, 3), (0, 3)))),
            DecompositionComponent(3, ReturnHomeomorphism()),
        ),
    )
    assert report.accepted
    assert all(v.passed for v in report.components)


def test_candidate_rejects_obstructed_general_component():
    inner = CurveTable(
        map_degree=2,
        classes=(CurveClass("h", (PullbackComponent(1, "h"),)),),
    )
    report = check_canonical_candidate(
        levy_two_cycle(),
        ["g1", "g2"],
        (DecompositionComponent(5, ReturnGeneral(inner)),),
    )
    assert not report.accepted
    assert "Levy" in " ".join(report.components[0].reasons)


def test_candidate_accepts_unobstructed_general_component():
    inner = CurveTable(
        map_degree=2,
        classes=(CurveClass("h", (PullbackComponent(2, "h"),)),),
    )
    report = check_canonical_candidate(
        levy_two_cycle(),
        ["g1", "g2"],
        (DecompositionComponent(5, ReturnGeneral(inner)),),
    )
    assert report.accepted


def test_candidate_requires_simple_completely_invariant():
    report = check_canonical_candidate(
        half_block_table(),
        ["g1", "g2"],
        (DecompositionComponent(3, ReturnHomeomorphism()),),
    )
    assert not report.accepted
    assert any("simple" in msg for msg in report.preconditions)
    # non-invariant candidate: a single curve of the Levy two-cycle
    report = check_canonical_candidate(
        levy_two_cycle(),
        ["g1"],
        (DecompositionComponent(3, ReturnHomeomorphism()),),
    )
    assert not report.accepted
    assert any("invariant" in msg for msg in report.preconditions)


def test_candidate_2222_partition_checks():
    good = marked_four_table((2, 2))
    report = check_canonical_candidate(
        levy_two_cycle(),
        ["g1", "g2"],
        (DecompositionComponent(4, Return2222(((2, 2), (0, 2)), table=good)),),
    )
    assert report.accepted
    # missing partition data raises
    missing = CurveTable(
        map_degree=2,
        classes=(CurveClass("g", (PullbackComponent(1, "g"),)),),
    )
    with pytest.raises(PreconditionError):
        check_canonical_candidate(
            levy_two_cycle(),
            ["g1", "g2"],
            (DecompositionComponent(4, Return2222(((2, 2), (0, 2)), table=missing)),),
        )


def test_candidate_2222_rejects_unbalanced_partition():
    # the component table marks six points; a 2-versus-4 split fails the
    # two-points-per-side requirement on simple obstruction curves
    marked = ("p1", "p2", "p3", "p4", "p5", "p6")
    unbalanced = CurveTable(
        map_degree=2,
        marked_points=marked,
        classes=(
            CurveClass(
                "g",
                (PullbackComponent(1, "g"),),
                partition=(frozenset(marked[:2]), frozenset(marked[2:])),
            ),
        ),
    )
    report = check_canonical_candidate(
        levy_two_cycle(),
        ["g1", "g2"],
        (DecompositionComponent(4, Return2222(((2, 2), (0, 2)), table=unbalanced)),),
    )
    assert not report.accepted
    assert any("two and two" in r for r in report.components[0].reasons)


def test_candidate_2222_wrong_marked_count():
    with pytest.raises(PreconditionError):
        check_canonical_candidate(
            levy_two_cycle(),
            ["g1", "g2"],
            (DecompositionComponent(5, Return2222(((2, 2), (0, 2)))),),
        )


def test_candidate_requires_decomposition():
    with pytest.raises(PreconditionError):
        check_canonical_candidate(levy_two_cycle(), ["g1", "g2"], ())


def test_nested_candidates_never_both_accepted():
    # two disjoint fixed Levy curves; the smaller candidate leaves the other
    # curve alive inside a component, whose table then carries an obstruction
    table = CurveTable(
        map_degree=2,
        classes=(
            CurveClass("g1", (PullbackComponent(1, "g1"),)),
            CurveClass("g2", (PullbackComponent(1, "g2"),)),
        ),
    )
    leftover = CurveTable(
        map_degree=2,
        classes=(CurveClass("g2", (PullbackComponent(1, "g2"),)),),
    )
    small = check_canonical_candidate(
        table,
        ["g1"],
        (DecompositionComponent(5, ReturnGeneral(leftover)),),
    )
    big = check_canonical_candidate(
        table,
        ["g1", "g2"],
        (
            DecompositionComponent(3, ReturnHomeomorphism()),
            DecompositionComponent(3, ReturnHomeomorphism()),
        ),
    )
    assert big.accepted
    assert not small.accepted


def test_analyze_table_report():
    report = analyze_table(levy_two_cycle())
    assert report.is_obstruction
    assert report.spectral.tag is SpectralTag.EXACTLY_ONE
    assert report.simple_certificate == (F(1), F(1))
    assert report.levy_cycles == (("g1", "g2"),)
    assert report.minimal.multicurves == (("g1", "g2"),)
    assert report.simple_core == ("g1", "g2")


def test_table_validation():
    with pytest.raises(PreconditionError):
        CurveTable(map_degree=1, classes=(CurveClass("g", ()),))
    with pytest.raises(PreconditionError):
        CurveTable(
            map_degree=2,
            classes=(CurveClass("g", (PullbackComponent(1, "zzz"),)),),
        )
    with pytest.raises(PreconditionError):
        CurveTable(
            map_degree=2,
            classes=(
                CurveClass(
                    "g",
                    (PullbackComponent(2, "g"), PullbackComponent(1, "g")),
                ),
            ),
        )
    with pytest.raises(PreconditionError):
        CurveTable(
            map_degree=2,
            marked_points=("a", "b", "c", "d"),
            classes=(
                CurveClass(
                    "g",
                    (PullbackComponent(1, "g"),),
                    partition=(frozenset({"a"}), frozenset({"b", "c", "d"})),
                ),
            ),
        )
