"""Curve-table analysis of declared pullback combinatorics.

A curve table is the user's contract about a branched cover: a list of
disjoint, pairwise non-homotopic essential curve classes, and for each
class the components of its preimage with mapping degrees and homotopy
targets.  The analyzer builds the associated nonnegative matrices,
classifies multicurves (obstruction, invariant, simple, minimal, Levy)
and checks decomposition candidates against the component conditions
that characterize the canonical obstruction.

Homotopy is never computed: classes are equal exactly when their ids are.
Components whose homotopy class was not tracked contribute nothing to
matrices (a sound lower bound for eigenvalues) but make invariance
verdicts unknown.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .slopes import (
    TorusQuotientMap,
    TwoDistinctIntegers,
    eigenvalue_classification,
    normalize,
)
from .spectral import (
    NonnegMatrix,
    PreconditionError,
    SpectralClass,
    SpectralTag,
    below_one_closed_indices,
    exists_positive_subinvariant_vector,
    is_irreducible,
    spectral_radius_class,
)

#: Reserved pullback targets: a component that bounds a disk with at most
#: one marked point, and a component whose class the user did not follow.
INESSENTIAL = "inessential"
UNTRACKED = "untracked"
_RESERVED = (INESSENTIAL, UNTRACKED)


@dataclass(frozen=True)
class PullbackComponent:
    degree: int
    target: str


@dataclass(frozen=True)
class CurveClass:
    """One declared curve class: its preimage row and optional marked-point split."""

    id: str
    pullback: tuple[PullbackComponent, ...]
    partition: Optional[tuple[frozenset[str], frozenset[str]]] = None


@dataclass(frozen=True)
class CurveTable:
    map_degree: int
    classes: tuple[CurveClass, ...]
    marked_points: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.map_degree < 2:
            raise PreconditionError("map degree must be at least 2")
        ids = [c.id for c in self.classes]
        if len(set(ids)) != len(ids):
            raise PreconditionError("duplicate curve class ids")
        for cid in ids:
            if cid in _RESERVED:
                raise PreconditionError(f"class id {cid!r} is reserved")
        known = set(ids) | set(_RESERVED)
        marked = set(self.marked_points) if self.marked_points is not None else None
        for cls in self.classes:
            total = 0
            for comp in cls.pullback:
                if comp.degree < 1:
                    raise PreconditionError(
                        f"component degree in row {cls.id!r} must be >= 1"
                    )
                if comp.target not in known:
                    raise PreconditionError(
                        f"row {cls.id!r} targets unknown class {comp.target!r}"
                    )
                total += comp.degree
            if total > self.map_degree:
                raise PreconditionError(
                    f"row {cls.id!r} lists components of total degree {total} > {self.map_degree}"
                )
            if cls.partition is not None:
                side_a, side_b = cls.partition
                if marked is None:
                    raise PreconditionError(
                        "partitions require the table to declare marked points"
                    )
                if side_a & side_b:
                    raise PreconditionError(f"partition sides of {cls.id!r} overlap")
                if side_a | side_b != marked:
                    raise PreconditionError(
                        f"partition of {cls.id!r} must cover the marked points"
                    )
                if len(side_a) < 2 or len(side_b) < 2:
                    raise PreconditionError(
                        f"partition of {cls.id!r} needs two marked points per side"
                    )

    def class_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.classes)

    def row(self, cid: str) -> CurveClass:
        for c in self.classes:
            if c.id == cid:
                return c
        raise PreconditionError(f"unknown curve class {cid!r}")


def curve_order(table: CurveTable, curves: Optional[Sequence[str]] = None) -> tuple[str, ...]:
    """Curves in the table's declaration order; defaults to all classes."""
    ids = table.class_ids()
    if curves is None:
        return ids
    wanted = list(curves)
    if len(set(wanted)) != len(wanted):
        raise PreconditionError("multicurve repeats a class id")
    unknown = [c for c in wanted if c not in ids]
    if unknown:
        raise PreconditionError(f"unknown curve classes: {unknown}")
    return tuple(c for c in ids if c in set(wanted))


def thurston_matrix(table: CurveTable, curves: Optional[Sequence[str]] = None) -> NonnegMatrix:
    """Matrix of reciprocal preimage degrees over the given multicurve.

    Entry (i, j) sums 1/degree over the components of curve j's row whose
    target is curve i; inessential and untracked components contribute 0.
    """
    order = curve_order(table, curves)
    index = {cid: k for k, cid in enumerate(order)}
    n = len(order)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for j, cid in enumerate(order):
        for comp in table.row(cid).pullback:
            i = index.get(comp.target)
            if i is not None:
                rows[i][j] += Fraction(1, comp.degree)
    return NonnegMatrix(rows)


def is_invariant(table: CurveTable, curves: Sequence[str]) -> Optional[bool]:
    """Whether every essential preimage of the multicurve lands back in it.

    Returns None when some component of a row was not tracked: its class
    is unknown, so the verdict cannot be decided from the table.
    """
    order = curve_order(table, curves)
    in_curve = set(order)
    unknown = False
    for cid in order:
        for comp in table.row(cid).pullback:
            if comp.target == UNTRACKED:
                unknown = True
            elif comp.target != INESSENTIAL and comp.target not in in_curve:
                return False
    return None if unknown else True


def is_completely_invariant(table: CurveTable, curves: Sequence[str]) -> Optional[bool]:
    """Invariant, and every member class occurs among the preimages."""
    inv = is_invariant(table, curves)
    if inv is not True:
        return inv
    order = curve_order(table, curves)
    hit = set()
    for cid in order:
        for comp in table.row(cid).pullback:
            if comp.target in set(order):
                hit.add(comp.target)
    return set(order) == hit


@dataclass(frozen=True)
class MulticurveClassification:
    spectral: SpectralClass
    is_obstruction: bool


def classify_multicurve(table: CurveTable, curves: Sequence[str]) -> MulticurveClassification:
    """Spectral trichotomy of the multicurve's matrix; obstruction iff not below 1."""
    spectral = spectral_radius_class(thurston_matrix(table, curves))
    return MulticurveClassification(
        spectral=spectral,
        is_obstruction=spectral.tag is not SpectralTag.BELOW_ONE,
    )


def is_simple_obstruction(
    table: CurveTable, curves: Sequence[str]
) -> Optional[tuple[Fraction, ...]]:
    """Positive vector certificate that the multicurve is a simple obstruction.

    Components follow the order of ``curve_order(table, curves)``.
    """
    return exists_positive_subinvariant_vector(thurston_matrix(table, curves))


def extract_simple_core(table: CurveTable, curves: Sequence[str]) -> tuple[str, ...]:
    """Largest sub-multicurve left after shedding sub-1 leading blocks.

    Discarding the blocks whose whole forward closure has eigenvalue
    below 1 preserves the leading eigenvalue and leaves a simple
    obstruction.
    """
    order = curve_order(table, curves)
    matrix = thurston_matrix(table, order)
    if spectral_radius_class(matrix).tag is SpectralTag.BELOW_ONE:
        raise PreconditionError("the multicurve is not an obstruction")
    dropped = set(below_one_closed_indices(matrix))
    return tuple(cid for k, cid in enumerate(order) if k not in dropped)


def find_levy_cycles(table: CurveTable) -> tuple[tuple[str, ...], ...]:
    """All cyclic chains of classes linked by degree-1 preimage components.

    An edge goes from class j to class i when j's row contains a degree-1
    component homotopic to i; every elementary cycle of that digraph is a
    Levy cycle and hence an obstruction.
    """
    ids = table.class_ids()
    pos = {cid: k for k, cid in enumerate(ids)}
    succ: dict[str, list[str]] = {
        cid: sorted(
            {
                comp.target
                for comp in table.row(cid).pullback
                if comp.degree == 1 and comp.target in pos
            },
            key=pos.get,
        )
        for cid in ids
    }
    cycles: list[tuple[str, ...]] = []
    for s, root in enumerate(ids):
        # enumerate elementary cycles whose minimal vertex is the root
        stack: list[tuple[str, tuple[str, ...]]] = [(root, (root,))]
        while stack:
            v, path = stack.pop()
            for w in succ[v]:
                if pos[w] < s:
                    continue
                if w == root:
                    cycles.append(path)
                elif w not in path:
                    stack.append((w, path + (w,)))
    cycles.sort(key=lambda cyc: (len(cyc), tuple(pos[c] for c in cyc)))
    return tuple(cycles)


@dataclass(frozen=True)
class MinimalObstructionSearch:
    multicurves: tuple[tuple[str, ...], ...]
    truncated: bool
    subset_cap: int


def find_minimal_obstructions(table: CurveTable, subset_cap: int = 12) -> MinimalObstructionSearch:
    """All multicurves that are obstructions with no smaller obstruction inside.

    Only subsets of fully tracked classes are searched.  A minimal
    obstruction is necessarily irreducible (the eigenvalue of a reducible
    matrix is attained on a proper strongly connected block), so the
    search enumerates strongly connected subsets by size and prunes
    supersets of hits; subsets larger than ``subset_cap`` are not visited
    and the result says so.
    """
    if subset_cap < 1:
        raise PreconditionError("subset cap must be at least 1")
    tracked = [
        c.id
        for c in table.classes
        if all(comp.target != UNTRACKED for comp in c.pullback)
    ]
    full = thurston_matrix(table, None)
    ids = table.class_ids()
    pos = {cid: k for k, cid in enumerate(ids)}
    found: list[tuple[str, ...]] = []
    found_sets: list[frozenset[str]] = []
    limit = min(subset_cap, len(tracked))
    for size in range(1, limit + 1):
        for combo in itertools.combinations(tracked, size):
            combo_set = frozenset(combo)
            if any(f <= combo_set for f in found_sets):
                continue
            sub = full.submatrix([pos[c] for c in combo])
            if not is_irreducible(sub):
                continue
            if spectral_radius_class(sub).tag is not SpectralTag.BELOW_ONE:
                found.append(combo)
                found_sets.append(combo_set)
    return MinimalObstructionSearch(
        multicurves=tuple(found),
        truncated=len(tracked) > subset_cap,
        subset_cap=subset_cap,
    )


@dataclass(frozen=True)
class ObstructionReport:
    """Full analysis of one multicurve plus table-wide searches."""

    curve_order: tuple[str, ...]
    matrix: NonnegMatrix
    spectral: SpectralClass
    is_obstruction: bool
    invariant: Optional[bool]
    completely_invariant: Optional[bool]
    simple_certificate: Optional[tuple[Fraction, ...]]
    simple_core: Optional[tuple[str, ...]]
    levy_cycles: tuple[tuple[str, ...], ...]
    minimal: MinimalObstructionSearch


def analyze_table(
    table: CurveTable,
    curves: Optional[Sequence[str]] = None,
    subset_cap: int = 12,
) -> ObstructionReport:
    """Assemble every verdict the table supports about one multicurve."""
    order = curve_order(table, curves)
    matrix = thurston_matrix(table, order)
    spectral = spectral_radius_class(matrix)
    obstruction = spectral.tag is not SpectralTag.BELOW_ONE
    return ObstructionReport(
        curve_order=order,
        matrix=matrix,
        spectral=spectral,
        is_obstruction=obstruction,
        invariant=is_invariant(table, order) if order else True,
        completely_invariant=is_completely_invariant(table, order) if order else True,
        simple_certificate=exists_positive_subinvariant_vector(matrix),
        simple_core=extract_simple_core(table, order) if obstruction else None,
        levy_cycles=find_levy_cycles(table),
        minimal=find_minimal_obstructions(table, subset_cap),
    )


# ---------------------------------------------------------------------------
# canonical-candidate checking


@dataclass(frozen=True)
class ReturnHomeomorphism:
    pass


@dataclass(frozen=True)
class Return2222:
    """First-return map of torus-quotient type: its homology action, plus an
    optional curve table describing the obstructions visible inside it."""

    matrix: tuple[tuple[int, int], tuple[int, int]]
    table: Optional[CurveTable] = None


@dataclass(frozen=True)
class ReturnGeneral:
    table: CurveTable


FirstReturn = Union[ReturnHomeomorphism, Return2222, ReturnGeneral]


@dataclass(frozen=True)
class DecompositionComponent:
    marked_points: int
    first_return: FirstReturn


@dataclass(frozen=True)
class ComponentVerdict:
    index: int
    kind: str
    passed: bool
    reasons: tuple[str, ...]


@dataclass(frozen=True)
class CanonicalCandidateReport:
    accepted: bool
    preconditions: tuple[str, ...]
    components: tuple[ComponentVerdict, ...]
    note: str
    truncated: bool = False


_RELATIVE_NOTE = (
    "certified relative to the supplied component data; obstructions outside "
    "the listed tables are not ruled out"
)


def _simple_obstructions(table: CurveTable, subset_cap: int) -> list[tuple[str, ...]]:
    """Every multicurve of the table (up to the cap) carrying a simple certificate."""
    ids = table.class_ids()
    out = []
    full = thurston_matrix(table, None)
    pos = {cid: k for k, cid in enumerate(ids)}
    for size in range(1, min(subset_cap, len(ids)) + 1):
        for combo in itertools.combinations(ids, size):
            sub = full.submatrix([pos[c] for c in combo])
            if exists_positive_subinvariant_vector(sub) is not None:
                out.append(combo)
    return out


def _check_2222_component(
    comp: DecompositionComponent, ret: Return2222, subset_cap: int
) -> tuple[bool, list[str]]:
    if comp.marked_points != 4:
        raise PreconditionError(
            "torus-quotient components must declare exactly four marked points"
        )
    tmap = normalize(ret.matrix)
    reasons = []
    ok = True
    cls = eigenvalue_classification(tmap)
    if isinstance(cls, TwoDistinctIntegers):
        ok = False
        reasons.append(
            f"homology action {tmap} has distinct integer eigenvalues "
            f"{cls.d1} and {cls.d2}: the return map carries a degenerating curve"
        )
    else:
        reasons.append(
            f"homology action {tmap} has equal or non-integer eigenvalues"
        )
    if ret.table is not None:
        for curves in _simple_obstructions(ret.table, subset_cap):
            for cid in curves:
                row = ret.table.row(cid)
                if row.partition is None:
                    raise PreconditionError(
                        f"curve {cid!r} sits in a simple obstruction of a "
                        "torus-quotient component but carries no marked-point partition"
                    )
                side_a, side_b = row.partition
                if len(side_a) != 2 or len(side_b) != 2:
                    ok = False
                    reasons.append(
                        f"curve {cid!r} of simple obstruction {list(curves)} does not "
                        "separate the marked points two and two"
                    )
    return ok, reasons


def _check_general_component(ret: ReturnGeneral) -> tuple[bool, list[str]]:
    # the full class list bounds every sub-multicurve's eigenvalue, so one
    # spectral test certifies the absence of obstructions in the table
    matrix = thurston_matrix(ret.table, None)
    spectral = spectral_radius_class(matrix)
    if spectral.tag is SpectralTag.BELOW_ONE:
        return True, ["no multicurve of the supplied table is an obstruction"]
    reasons = ["the supplied table carries a Thurston obstruction"]
    levy = find_levy_cycles(ret.table)
    if levy:
        reasons.append(f"Levy cycles present: {[list(c) for c in levy]}")
    return False, reasons


def check_canonical_candidate(
    table: CurveTable,
    curves: Sequence[str],
    decomposition: Sequence[DecompositionComponent],
    subset_cap: int = 12,
) -> CanonicalCandidateReport:
    """Check a candidate multicurve against the canonical-obstruction criteria.

    The candidate must be a simple, completely invariant obstruction; each
    periodic component of the pinched sphere must then have an unobstructed
    first-return map, witnessed per component type: equal-or-non-integer
    eigenvalues (and two-by-two separating obstruction curves) for
    torus-quotient returns, no obstruction in the supplied table for
    general returns, and vacuous acceptance for homeomorphism returns.
    """
    order = curve_order(table, curves)
    if not order:
        raise PreconditionError("the candidate multicurve is empty")
    if not decomposition:
        raise PreconditionError("at least one periodic component descriptor is required")
    preconditions = []
    certificate = is_simple_obstruction(table, order)
    if certificate is None:
        preconditions.append("the candidate is not a simple obstruction")
    invariant = is_completely_invariant(table, order)
    if invariant is None:
        preconditions.append(
            "complete invariance is unknown: rows contain untracked components"
        )
    elif not invariant:
        preconditions.append("the candidate is not completely invariant")
    if preconditions:
        return CanonicalCandidateReport(
            accepted=False,
            preconditions=tuple(preconditions),
            components=(),
            note=_RELATIVE_NOTE,
        )
    verdicts = []
    truncated = False
    for idx, comp in enumerate(decomposition):
        ret = comp.first_return
        if isinstance(ret, ReturnHomeomorphism):
            verdicts.append(
                ComponentVerdict(
                    index=idx,
                    kind="homeomorphism",
                    passed=True,
                    reasons=(
                        "homeomorphism return maps are accepted vacuously; no finite "
                        "certificate is available from table data",
                    ),
                )
            )
        elif isinstance(ret, Return2222):
            if ret.table is not None and len(ret.table.classes) > subset_cap:
                truncated = True
            ok, reasons = _check_2222_component(comp, ret, subset_cap)
            verdicts.append(
                ComponentVerdict(index=idx, kind="2222", passed=ok, reasons=tuple(reasons))
            )
        elif isinstance(ret, ReturnGeneral):
            ok, reasons = _check_general_component(ret)
            verdicts.append(
                ComponentVerdict(index=idx, kind="general", passed=ok, reasons=tuple(reasons))
            )
        else:  # pragma: no cover - closed union
            raise TypeError(f"unknown first-return descriptor {ret!r}")
    return CanonicalCandidateReport(
        accepted=all(v.passed for v in verdicts),
        preconditions=(),
        components=tuple(verdicts),
        note=_RELATIVE_NOTE,
        truncated=truncated,
    )
