"""Layered prefetch refinement across successive booking passes.

A chunk can be booked several times before playback: an early pass buys a
base layer while the viewing direction is still vague, later passes top up
tiles as the probability vector sharpens.  Each pass reuses the single-slot
optimizer on a modified instance in which levels at or below a tile's
already-cached level cost nothing, and upgrades are priced by the transport:

    svc_ideal    round((1 + overhead) * chunk_s * (rate_l - rate_cached))
    redownload   round(chunk_s * rate_l)

A pass never downgrades: the new state is the tile-wise maximum of the
cached and freshly chosen levels.
"""

from dataclasses import dataclass

import numpy as np

from .model import DirectionGrid, Instance, QualityLadder, UtilityModel, eval_objective
from .optimizer import SolveReport, solve_dp

__all__ = [
    "SIZE_MODES",
    "TileState",
    "SizeModel",
    "PrefetchPass",
    "PrefetchPlan",
    "PassResult",
    "upgrade_sizes",
    "refine",
    "run_plan",
]

SIZE_MODES = ("svc_ideal", "redownload")


@dataclass(frozen=True, eq=False)
class TileState:
    """Cached quality level per tile; 0 means nothing fetched yet."""

    levels: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels)
        if lv.ndim != 1 or lv.size < 2:
            raise ValueError("need one level per tile, at least two tiles")
        if np.any(np.asarray(lv, dtype=float) != np.rint(np.asarray(lv, dtype=float))):
            raise ValueError("levels must be integers")
        lv = lv.astype(np.int64)
        if np.any(lv < 0):
            raise ValueError("levels must be nonnegative")
        object.__setattr__(self, "levels", lv)

    @classmethod
    def empty(cls, n_tiles: int) -> "TileState":
        return cls(np.zeros(n_tiles, dtype=np.int64))


@dataclass(frozen=True)
class SizeModel:
    """How upgrades are priced; overhead is the SVC layering tax in [0, 1]."""

    mode: str = "svc_ideal"
    overhead: float = 0.0

    def __post_init__(self):
        if self.mode not in SIZE_MODES:
            raise ValueError(f"unknown size mode {self.mode!r}")
        if not 0.0 <= self.overhead <= 1.0:
            raise ValueError("overhead must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class PrefetchPass:
    """One booking opportunity: how far ahead, how much budget, which probs."""

    lead_time_s: float
    budget: int
    probs: object

    def __post_init__(self):
        if not (np.isfinite(self.lead_time_s) and self.lead_time_s >= 0):
            raise ValueError("lead time must be finite and nonnegative")
        if not (np.isscalar(self.budget) and float(self.budget) == int(self.budget) and int(self.budget) >= 0):
            raise ValueError("budget must be a nonnegative integer")
        object.__setattr__(self, "budget", int(self.budget))


@dataclass(frozen=True, eq=False)
class PrefetchPlan:
    """Booking passes for one chunk, ordered by decreasing lead time."""

    passes: tuple[PrefetchPass, ...]

    def __post_init__(self):
        passes = tuple(self.passes)
        if not passes:
            raise ValueError("a plan needs at least one pass")
        leads = [p.lead_time_s for p in passes]
        if any(b >= a for a, b in zip(leads, leads[1:])):
            raise ValueError("lead times must strictly decrease toward playback")
        object.__setattr__(self, "passes", passes)


def upgrade_sizes(state: TileState, ladder: QualityLadder, size_model: SizeModel) -> np.ndarray:
    """Per-tile level prices given what is already cached, shape (N, L+1).

    Levels at or below the cached level are free; higher levels cost the
    layered increment or a full re-download depending on the mode.
    """
    n_levels = ladder.n_levels
    if np.any(state.levels > n_levels):
        raise ValueError("cached level exceeds the ladder")
    rates = np.concatenate([[0.0], np.asarray(ladder.rates_kbps)])
    level_idx = np.arange(n_levels + 1)
    cached = state.levels[:, None]
    if size_model.mode == "svc_ideal":
        increment = rates[None, :] - rates[cached]
        raw = (1.0 + size_model.overhead) * ladder.chunk_s * increment
    else:
        raw = np.broadcast_to(rates * ladder.chunk_s, (state.levels.size, n_levels + 1)).copy()
    sizes = np.rint(raw).astype(np.int64)
    sizes[level_idx[None, :] <= cached] = 0
    return sizes


def refine(state: TileState, probs, budget: int, size_model: SizeModel,
           ladder: QualityLadder, utility: UtilityModel, beta: float = 0.0):
    """Run one booking pass; returns the merged state and the solver report.

    The optimizer sees upgrade prices instead of full sizes, so "keep what is
    cached" is always feasible (level <= cached costs 0).  The merged state
    never drops a tile below its cached level even when the solver would.
    """
    p = np.asarray(getattr(probs, "probs", probs), dtype=float)
    grid = DirectionGrid(p.size)
    if state.levels.size != p.size:
        raise ValueError("state and probability vector disagree on tile count")
    sizes = upgrade_sizes(state, ladder, size_model)
    inst = Instance(grid, ladder, utility, p, budget, beta, sizes=sizes)
    report = solve_dp(inst)
    merged = TileState(np.maximum(state.levels, np.asarray(report.selection.levels)))
    return merged, report


@dataclass(frozen=True, eq=False)
class PassResult:
    """State after one pass and its value under that pass's probabilities."""

    index: int
    lead_time_s: float
    state: TileState
    report: SolveReport
    value: float


def run_plan(plan: PrefetchPlan, ladder: QualityLadder, utility: UtilityModel,
             beta: float = 0.0, size_model: SizeModel = SizeModel(),
             initial: TileState | None = None) -> list[PassResult]:
    """Execute all passes in lead-time order and track the state trajectory.

    Each result reports the merged state's objective under that pass's
    probability vector; the last entry is the value that matters, the final
    state under the final (sharpest) probs.
    """
    state = initial
    results = []
    for i, booking in enumerate(plan.passes):
        if state is None:
            state = TileState.empty(np.asarray(getattr(booking.probs, "probs", booking.probs)).size)
        state, report = refine(state, booking.probs, booking.budget, size_model,
                               ladder, utility, beta)
        grid = DirectionGrid(state.levels.size)
        inst = Instance(grid, ladder, utility, booking.probs, booking.budget, beta)
        value = eval_objective(state.levels, inst)
        results.append(PassResult(i, booking.lead_time_s, state, report, value))
    return results
