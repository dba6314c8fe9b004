"""Orbifold signatures of finite critical portraits.

A critical portrait records a finite marked dynamical system: labelled
points with images and local degrees, marked points flagged.  From it the
minimal ramification weights are computed by a least-fixpoint iteration,
and the orbifold is classified as hyperbolic or parabolic through its
exact Euler characteristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .spectral import PreconditionError

INFINITE_WEIGHT = math.inf

Weight = Union[int, float]  # an integer >= 2 or math.inf

#: The six weight multisets with Euler characteristic exactly zero.
PARABOLIC_SIGNATURES: tuple[tuple[Weight, ...], ...] = (
    (INFINITE_WEIGHT, INFINITE_WEIGHT),
    (2, 2, INFINITE_WEIGHT),
    (2, 4, 4),
    (2, 3, 6),
    (3, 3, 3),
    (2, 2, 2, 2),
)


@dataclass(frozen=True)
class PortraitPoint:
    label: str
    marked: bool
    image: str
    local_degree: int


@dataclass(frozen=True)
class CriticalPortrait:
    """Marked finite dynamics with local degrees.

    Listed points are the marked set together with any critical preimages
    worth tracking; preimages that are not listed are implicitly unmarked
    and unramified, so they never influence the ramification weights.
    """

    degree: int
    points: tuple[PortraitPoint, ...]

    def __post_init__(self):
        if self.degree < 2:
            raise PreconditionError("total degree must be at least 2")
        labels = [p.label for p in self.points]
        if len(set(labels)) != len(labels):
            raise PreconditionError("duplicate point labels")
        by_label = {p.label: p for p in self.points}
        total_branching = 0
        fiber_degree: dict[str, int] = {}
        for p in self.points:
            if p.local_degree < 1:
                raise PreconditionError(f"local degree of {p.label!r} must be >= 1")
            if p.local_degree > self.degree:
                raise PreconditionError(
                    f"local degree of {p.label!r} exceeds the total degree"
                )
            if p.image not in by_label:
                raise PreconditionError(f"image of {p.label!r} is not a listed point")
            total_branching += p.local_degree - 1
            fiber_degree[p.image] = fiber_degree.get(p.image, 0) + p.local_degree
        for p in self.points:
            img = by_label[p.image]
            if p.marked and not img.marked:
                raise PreconditionError("marked points must map to marked points")
            if p.local_degree >= 2 and not img.marked:
                raise PreconditionError("critical values must be marked")
            if fiber_degree.get(img.label, 0) > self.degree:
                raise PreconditionError(
                    f"listed preimages of {img.label!r} exceed the total degree"
                )
        if total_branching > 2 * self.degree - 2:
            raise PreconditionError("local degrees violate the branching budget")

    def point(self, label: str) -> PortraitPoint:
        for p in self.points:
            if p.label == label:
                return p
        raise KeyError(label)

    def marked_labels(self) -> tuple[str, ...]:
        return tuple(p.label for p in self.points if p.marked)

    def fiber(self, label: str) -> tuple[tuple[str, int], ...]:
        """Listed preimages of a point, with their mapping degrees."""
        return tuple((p.label, p.local_degree) for p in self.points if p.image == label)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def ramification_function(portrait: CriticalPortrait) -> dict[str, Weight]:
    """Minimal ramification weights of the portrait.

    The weight of x must be divisible by weight(y) * deg(y) for every
    listed preimage y of x.  Points on a forward cycle whose degree
    product exceeds 1 are forced to infinity; everything else is a finite
    least fixpoint of lcm propagation.
    """
    points = portrait.points
    image = {p.label: p.image for p in points}
    local = {p.label: p.local_degree for p in points}
    marked = [p.label for p in points if p.marked]

    # every forward orbit of the functional graph ends in a cycle; cycles
    # through a point of degree >= 2 force infinite weight on the cycle
    infinite: set[str] = set()
    state: dict[str, int] = {}
    for start in image:
        if start in state:
            continue
        path = []
        cur = start
        while cur not in state:
            state[cur] = 1
            path.append(cur)
            cur = image[cur]
        if state[cur] == 1:  # found a new cycle, rooted at cur
            cycle = path[path.index(cur) :]
            if any(local[c] >= 2 for c in cycle):
                infinite.update(cycle)
        for lbl in path:
            state[lbl] = 2

    weights: dict[str, Weight] = {}
    for p in points:
        if p.label in infinite:
            weights[p.label] = INFINITE_WEIGHT
        else:
            weights[p.label] = 1

    fibers = {lbl: portrait.fiber(lbl) for lbl in marked}
    for _ in range(len(points) + 1):
        changed = False
        for lbl in marked:
            if weights[lbl] == INFINITE_WEIGHT:
                continue
            value: Weight = 1
            for pre, deg in fibers[lbl]:
                w = weights[pre]
                if w == INFINITE_WEIGHT:
                    value = INFINITE_WEIGHT
                    break
                value = _lcm(value, int(w) * deg)
            if value != weights[lbl]:
                weights[lbl] = value
                changed = True
        if not changed:
            break
    else:  # pragma: no cover - the fixpoint settles within n rounds
        raise AssertionError("ramification iteration failed to stabilize")
    return weights


def euler_characteristic(weights: Sequence[Weight]) -> Fraction:
    """2 - sum(1 - 1/w) over the weights, with 1 - 1/infinity = 1, exact."""
    chi = Fraction(2)
    for w in weights:
        if w == INFINITE_WEIGHT:
            chi -= 1
        else:
            if not isinstance(w, int) or w < 2:
                raise PreconditionError("weights must be integers >= 2 or infinite")
            chi -= 1 - Fraction(1, w)
    return chi


class OrbifoldClass:
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    # positive Euler characteristic cannot arise from a genuine branched
    # cover portrait; it is surfaced for malformed input rather than hidden
    SPHERICAL_EXCEPTION = "spherical_exception"


@dataclass(frozen=True)
class OrbifoldSignature:
    weights: tuple[Weight, ...]
    chi: Fraction
    kind: str
    ramification: Mapping[str, Weight] = field(compare=False, default_factory=dict)

    @property
    def parabolic_signature(self) -> Optional[tuple[Weight, ...]]:
        return self.weights if self.kind == OrbifoldClass.PARABOLIC else None


def classify_orbifold(portrait: CriticalPortrait) -> OrbifoldSignature:
    """Signature and hyperbolic/parabolic classification of the portrait."""
    ram = ramification_function(portrait)
    marked = set(portrait.marked_labels())
    weights = tuple(sorted(w for lbl, w in ram.items() if lbl in marked and w > 1))
    chi = euler_characteristic(weights)
    if chi < 0:
        kind = OrbifoldClass.HYPERBOLIC
    elif chi == 0:
        kind = OrbifoldClass.PARABOLIC
        if weights not in PARABOLIC_SIGNATURES:  # pragma: no cover - impossible by Eq. enumeration
            raise AssertionError("flat signature outside the known list")
    else:
        kind = OrbifoldClass.SPHERICAL_EXCEPTION
    return OrbifoldSignature(weights=weights, chi=chi, kind=kind, ramification=ram)


def is_2222(portrait: CriticalPortrait) -> bool:
    """True when the orbifold is the torus-quotient signature (2,2,2,2)."""
    sig = classify_orbifold(portrait)
    return sig.kind == OrbifoldClass.PARABOLIC and sig.weights == (2, 2, 2, 2)
