"""Fairlet decomposition: split a dataset into minimal balanced groups.

Two constructions are provided. ``vanilla_decompose`` is cost-agnostic: it
pairs each minority point with a block of majority points in seed-shuffled
order. ``mcf_decompose`` is cost-aware: it assigns majority points to
minority points through a minimum-cost flow so that the total member-to-
anchor distance is minimized over all valid groupings.

Both support thresholds of the form t = 1/m only; that covers the t = 0.5
setting used throughout the experiment harness. Fairlet centers default to
a uniformly sampled member (seeded); pass ``center_mode="medoid"`` for the
lower-variance deterministic choice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .core import (
    Dataset,
    Fairlet,
    FairletDecomposition,
    distance,
    medoid_index,
    pairwise_distances,
    rng_stream,
    subset_balance,
)
from .errors import (
    ContractViolationError,
    InfeasibilityError,
    UnsupportedThresholdError,
)
from .flow import Arc, FlowNetwork, solve_min_cost_flow


@dataclass(frozen=True)
class ThresholdFM:
    """Balance threshold t = f/m in lowest terms, 1 <= f <= m."""

    f: int
    m: int

    def __post_init__(self) -> None:
        if self.f < 1 or self.m < 1 or self.f > self.m:
            raise ContractViolationError(
                f"threshold needs 1 <= f <= m, got f={self.f}, m={self.m}"
            )
        if gcd(self.f, self.m) != 1:
            raise ContractViolationError(
                f"f/m must be in lowest terms, got {self.f}/{self.m}"
            )

    @classmethod
    def from_fraction(cls, t: Fraction) -> "ThresholdFM":
        t = Fraction(t)
        if not (0 < t <= 1):
            raise ContractViolationError(f"t must lie in (0, 1], got {t}")
        return cls(t.numerator, t.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.f, self.m)

    @property
    def max_size(self) -> int:
        return self.f + self.m


def _split_groups(data: Dataset, t: ThresholdFM) -> tuple[np.ndarray, np.ndarray]:
    """Minority and majority row indices, after feasibility and shape checks."""
    if t.f != 1:
        raise UnsupportedThresholdError(
            f"only thresholds 1/m are supported, got {t.f}/{t.m}"
        )
    zeros = np.flatnonzero(data.protected == 0)
    ones = np.flatnonzero(data.protected == 1)
    if len(zeros) == 0 or len(ones) == 0:
        raise InfeasibilityError(
            "dataset has a single protected group; no decomposition exists for t > 0"
        )
    minority, majority = (zeros, ones) if len(zeros) <= len(ones) else (ones, zeros)
    achieved = Fraction(len(minority), len(majority))
    if achieved < t.value:
        raise InfeasibilityError(
            f"dataset balance {achieved} (= {float(achieved):.4f}) is below the "
            f"required threshold {t.value}"
        )
    return minority, majority


def _pick_centers(
    groups: list[list[int]],
    data: Dataset,
    seed: int,
    stream: str,
    center_mode: str,
) -> list[Fairlet]:
    if center_mode not in ("random", "medoid"):
        raise ContractViolationError(f"unknown center_mode {center_mode!r}")
    rng = rng_stream(seed, stream, "centers")
    fairlets = []
    for members in groups:
        members = sorted(members)
        if center_mode == "random":
            center = members[int(rng.integers(len(members)))]
        else:
            center = medoid_index(data.features, members)
        fairlets.append(Fairlet(members=tuple(members), center=center))
    fairlets.sort(key=lambda fl: fl.members[0])
    return fairlets


def vanilla_decompose(
    data: Dataset,
    t: ThresholdFM,
    seed: int,
    center_mode: str = "random",
) -> FairletDecomposition:
    """Cost-agnostic decomposition: one fairlet per minority point.

    Both groups are shuffled by the seeded stream; fairlet i takes minority
    point i plus a contiguous block of the shuffled majority, block sizes
    floor(rho/beta) or ceil(rho/beta). Feasibility (balance >= 1/m)
    guarantees every block fits under m.
    """
    minority, majority = _split_groups(data, t)
    rng = rng_stream(seed, "fairlets.vanilla")
    blues = minority[rng.permutation(len(minority))]
    reds = majority[rng.permutation(len(majority))]
    beta, rho = len(blues), len(reds)
    base, extra = divmod(rho, beta)
    groups = []
    pos = 0
    for i in range(beta):
        take = base + (1 if i < extra else 0)
        groups.append([int(blues[i]), *map(int, reds[pos : pos + take])])
        pos += take
    fairlets = _pick_centers(groups, data, seed, "fairlets.vanilla", center_mode)
    return FairletDecomposition(fairlets=tuple(fairlets), n=data.n, threshold=t.value)


def mcf_decompose(
    data: Dataset,
    t: ThresholdFM,
    seed: int,
    center_mode: str = "random",
) -> FairletDecomposition:
    """Cost-aware decomposition via minimum-cost flow.

    Majority points are routed to minority anchors at cost equal to their
    Euclidean distance; each anchor must take between 1 and m majority
    points (the lower bound is enforced by shifting one forced unit per
    anchor into the node supplies). The grouping minimizes the total
    majority-to-anchor distance over all one-anchor-per-fairlet
    decompositions, which in practice beats the cost-agnostic construction
    by a wide margin.
    """
    minority, majority = _split_groups(data, t)
    beta, rho = len(minority), len(majority)
    m = t.m
    dists = pairwise_distances(data.features[minority], data.features[majority])

    # Node layout: 0 = entry, 1..beta = anchors, beta+1..beta+rho = majority,
    # beta+rho+1 = exit. One unit per anchor is forced by supply shifting.
    entry = 0
    exit_node = beta + rho + 1
    arcs: list[Arc] = []
    for b in range(beta):
        arcs.append(Arc(entry, 1 + b, m - 1, 0.0))
    for b in range(beta):
        for r in range(rho):
            arcs.append(Arc(1 + b, 1 + beta + r, 1, float(dists[b, r])))
    for r in range(rho):
        arcs.append(Arc(1 + beta + r, exit_node, 1, 0.0))
    supplies = [0] * (beta + rho + 2)
    supplies[entry] = rho - beta
    for b in range(beta):
        supplies[1 + b] = 1
    supplies[exit_node] = -rho

    net = FlowNetwork(num_nodes=beta + rho + 2, arcs=tuple(arcs), supplies=tuple(supplies))
    flows = solve_min_cost_flow(net)

    groups: list[list[int]] = [[int(minority[b])] for b in range(beta)]
    offset = beta  # anchor->majority arcs start after the entry arcs
    for b in range(beta):
        for r in range(rho):
            if flows[offset + b * rho + r] > 0:
                groups[b].append(int(majority[r]))
    fairlets = _pick_centers(groups, data, seed, "fairlets.mcf", center_mode)
    return FairletDecomposition(fairlets=tuple(fairlets), n=data.n, threshold=t.value)


def fairlet_cost(decomp: FairletDecomposition, data: Dataset) -> float:
    """Sum over fairlets of member-to-center distances."""
    total = 0.0
    for fairlet in decomp.fairlets:
        center = data.features[fairlet.center]
        for m in fairlet.members:
            total += distance(data.features[m], center)
    return total


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of auditing a decomposition; ``violations`` is empty when valid."""

    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(
    decomp: FairletDecomposition, data: Dataset, t: ThresholdFM
) -> ValidationReport:
    """Check the partition property, the size bound f+m and per-fairlet balance.

    Never raises; every violation is listed in the report.
    """
    violations: list[str] = []
    seen = np.zeros(data.n, dtype=bool)
    for j, fairlet in enumerate(decomp.fairlets):
        for m in fairlet.members:
            if m < 0 or m >= data.n:
                violations.append(f"fairlet {j}: row {m} out of range")
            elif seen[m]:
                violations.append(f"fairlet {j}: row {m} already covered")
            else:
                seen[m] = True
        if fairlet.weight > t.max_size:
            violations.append(
                f"fairlet {j}: size {fairlet.weight} exceeds bound {t.max_size}"
            )
        bal = subset_balance(data.protected, fairlet.members)
        if bal.value < t.value:
            violations.append(
                f"fairlet {j}: balance {bal.value} below threshold {t.value}"
            )
    uncovered = np.flatnonzero(~seen)
    if uncovered.size:
        violations.append(f"rows not covered by any fairlet: {uncovered.tolist()[:10]}")
    return ValidationReport(violations=tuple(violations))


def decomposition_to_json(decomp: FairletDecomposition, data: Dataset) -> str:
    """Serialize for audit/replay: one record per fairlet with row ids."""
    records = [
        {
            "fairlet_id": j,
            "center_row_id": data.row_ids[fairlet.center],
            "member_row_ids": [data.row_ids[m] for m in fairlet.members],
        }
        for j, fairlet in enumerate(decomp.fairlets)
    ]
    return json.dumps(records, indent=2)


def decomposition_from_json(
    text: str, data: Dataset, t: ThresholdFM
) -> FairletDecomposition:
    """Rebuild a decomposition exported by :func:`decomposition_to_json`."""
    index = {rid: i for i, rid in enumerate(data.row_ids)}

    def lookup(rid: str) -> int:
        if rid not in index:
            raise ContractViolationError(f"unknown row id {rid!r} in decomposition")
        return index[rid]

    fairlets = []
    for record in json.loads(text):
        members = tuple(lookup(r) for r in record["member_row_ids"])
        fairlets.append(Fairlet(members=members, center=lookup(record["center_row_id"])))
    return FairletDecomposition(fairlets=tuple(fairlets), n=data.n, threshold=t.value)


def weights_of(decomp: FairletDecomposition) -> np.ndarray:
    """Fairlet cardinalities as an integer vector."""
    return np.array([fl.weight for fl in decomp.fairlets], dtype=np.int64)


def centers_of(decomp: FairletDecomposition, data: Dataset) -> np.ndarray:
    """Stacked center feature rows, one per fairlet."""
    idx = np.array([fl.center for fl in decomp.fairlets], dtype=np.intp)
    return data.features[idx]


