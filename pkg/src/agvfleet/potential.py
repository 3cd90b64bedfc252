"""Discrete information potential field over a bounded grid.

Targets are painted as fixed-value source cells (+5), other agents as sinks
(-3), and the outer ring as a 0-valued boundary; the remaining cells relax
to the discrete harmonic interpolant via synchronous Jacobi sweeps. Sampling
at a continuous position bilinearly interpolates the four surrounding cell
centers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .world import WorldState

__all__ = [
    "CellKind",
    "GridSpec",
    "FieldConfig",
    "PotentialField",
    "SOURCE_VALUE",
    "SINK_VALUE",
    "BOUNDARY_VALUE",
    "rasterize",
    "jacobi_solve",
    "direct_solve_oracle",
    "sample",
]

SOURCE_VALUE = 5.0
SINK_VALUE = -3.0
BOUNDARY_VALUE = 0.0


class CellKind:
    """Cell roles in the fixed-cell mask."""

    FREE = 0
    SOURCE = 1
    SINK = 2
    BOUNDARY = 3


@dataclass(frozen=True)
class GridSpec:
    """Square grid covering the arena [-world_half_extent, +world_half_extent]^2."""

    cells_per_side: int = 32
    world_half_extent: float = 1.0

    def __post_init__(self) -> None:
        if self.cells_per_side < 4:
            raise ValueError("cells_per_side must be >= 4")
        if self.world_half_extent <= 0.0:
            raise ValueError("world_half_extent must be positive")

    @property
    def cell_size(self) -> float:
        return 2.0 * self.world_half_extent / self.cells_per_side

    def cell_of(self, position: np.ndarray) -> tuple[int, int]:
        """Grid cell (ix, iy) containing a position; edge positions clip inward."""
        g = self.cells_per_side
        idx = np.floor((np.asarray(position) + self.world_half_extent) / self.cell_size)
        ix, iy = np.clip(idx, 0, g - 1).astype(int)
        return int(ix), int(iy)

    def center_of(self, ix: int, iy: int) -> np.ndarray:
        """World coordinates of a cell center."""
        half = self.cell_size / 2.0
        return np.array(
            [
                -self.world_half_extent + ix * self.cell_size + half,
                -self.world_half_extent + iy * self.cell_size + half,
            ]
        )


@dataclass(frozen=True)
class FieldConfig:
    """Solver and reward-scaling knobs for the potential field."""

    grid_cells: int = 32
    tol: float = 1e-4
    max_iters: int = 200
    ipf_weight: float = 1.0

    def __post_init__(self) -> None:
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class PotentialField:
    """Grid of potential values plus the fixed-cell mask.

    ``values`` and ``mask`` share a 2-D shape indexed [ix, iy]. Fixed cells
    (source/sink/boundary) hold their values exactly and never change during
    solving. ``iterations_used < 0`` marks a field that has not been solved
    yet; ``residual`` is the last sweep's max-abs change over free cells and
    ``converged`` records whether the solve met its tolerance.
    """

    values: np.ndarray
    mask: np.ndarray
    grid: GridSpec | None = None
    residual: float = np.inf
    iterations_used: int = -1
    converged: bool = False

    @property
    def solved(self) -> bool:
        return self.iterations_used >= 0

    def free_mask(self) -> np.ndarray:
        return self.mask == CellKind.FREE

    def fixed_values(self) -> np.ndarray:
        return self.values[self.mask != CellKind.FREE]

    def copy(self) -> "PotentialField":
        return PotentialField(
            self.values.copy(), self.mask.copy(), self.grid,
            self.residual, self.iterations_used, self.converged,
        )


def rasterize(
    world: WorldState,
    perspective_agent: int,
    grid: GridSpec,
    warm_from: PotentialField | None = None,
) -> PotentialField:
    """Paint sources, sinks, and the boundary ring for one agent's field.

    The cell of every target becomes a source (+5) and the cell of every
    agent other than ``perspective_agent`` a sink (-3); the outer ring is a
    0-valued boundary. Precedence on overlap: source > sink > boundary.
    Free cells start at 0, or carry over the previous step's values when
    ``warm_from`` (same grid shape) is given, which makes the subsequent
    solve a warm start.
    """
    if not 0 <= perspective_agent < world.n_agents:
        raise IndexError(f"agent index {perspective_agent} out of range")
    g = grid.cells_per_side
    if warm_from is not None and warm_from.values.shape == (g, g):
        values = warm_from.values.copy()
    else:
        values = np.zeros((g, g), dtype=np.float64)
    mask = np.full((g, g), CellKind.FREE, dtype=np.int8)

    mask[0, :] = CellKind.BOUNDARY
    mask[-1, :] = CellKind.BOUNDARY
    mask[:, 0] = CellKind.BOUNDARY
    mask[:, -1] = CellKind.BOUNDARY

    for i in range(world.n_agents):
        if i == perspective_agent:
            continue
        ix, iy = grid.cell_of(world.positions[i])
        mask[ix, iy] = CellKind.SINK
    for j in range(world.n_targets):
        ix, iy = grid.cell_of(world.target_positions[j])
        mask[ix, iy] = CellKind.SOURCE

    values[mask == CellKind.BOUNDARY] = BOUNDARY_VALUE
    values[mask == CellKind.SINK] = SINK_VALUE
    values[mask == CellKind.SOURCE] = SOURCE_VALUE
    return PotentialField(values, mask, grid)


def _neighbor_degree(shape: tuple[int, int]) -> np.ndarray:
    """In-grid 4-neighbor count for every cell."""
    deg = np.full(shape, 4.0)
    deg[0, :] -= 1.0
    deg[-1, :] -= 1.0
    deg[:, 0] -= 1.0
    deg[:, -1] -= 1.0
    return deg


def _neighbor_sum(values: np.ndarray, out: np.ndarray) -> np.ndarray:
    """4-neighbor sums over the last two axes (supports stacked grids)."""
    out[...] = 0.0
    out[..., 1:, :] += values[..., :-1, :]
    out[..., :-1, :] += values[..., 1:, :]
    out[..., :, 1:] += values[..., :, :-1]
    out[..., :, :-1] += values[..., :, 1:]
    return out


def jacobi_solve(
    potential: PotentialField,
    tol: float = 1e-4,
    max_iters: int = 200,
    certify: bool = True,
) -> PotentialField:
    """Relax free cells by synchronous Jacobi sweeps toward the harmonic fix point.

    Each sweep replaces every free cell with the mean of its in-grid
    neighbors (fixed cells contribute their Dirichlet values). With
    ``certify`` (the default), convergence requires both the per-sweep
    change and the extrapolated remaining error to reach ``tol``: the raw
    change understates the true error by 1/(1-rho) with rho the contraction
    ratio, so the rho estimated from successive sweeps scales it to an error
    bound. ``certify=False`` stops at the classic change <= tol rule, which
    is what the warm-started per-step reward path wants (a handful of sweeps
    per step). Hitting ``max_iters`` first reports non-convergence via
    ``converged``/``residual`` rather than raising, so callers can
    warm-start the next solve.
    """
    solved = jacobi_solve_batch([potential], tol, max_iters, certify)
    return solved[0]


def jacobi_solve_batch(
    fields: list[PotentialField],
    tol: float = 1e-4,
    max_iters: int = 200,
    certify: bool = True,
) -> list[PotentialField]:
    """Relax several same-shape fields with shared synchronous sweeps.

    Functionally equivalent to calling :func:`jacobi_solve` per field, but
    one stacked array sweep serves all of them (the per-step path solves one
    field per agent, so this is the hot loop). Sweeping continues until every
    field meets the convergence rule (see :func:`jacobi_solve` for the two
    rules) or ``max_iters`` is reached; fields that converge early keep
    receiving harmless extra sweeps.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if not fields:
        return []
    shape = fields[0].values.shape
    if any(f.values.shape != shape for f in fields):
        raise ValueError("batched fields must share one grid shape")
    values = np.stack([f.values for f in fields])
    fixed = np.stack([~f.free_mask() for f in fields])
    inv_deg = 1.0 / _neighbor_degree(shape)
    sweep_loop = _compiled_sweep_loop() or _sweep_loop_numpy
    residual, iters, converged = sweep_loop(
        values, fixed, inv_deg, tol, max_iters, certify
    )
    out = []
    for k, f in enumerate(fields):
        solved = f.copy()
        solved.values[...] = values[k]
        solved.residual = float(residual[k])
        solved.iterations_used = iters
        solved.converged = bool(converged[k])
        out.append(solved)
    return out


def _sweep_loop_numpy(
    values: np.ndarray,
    fixed: np.ndarray,
    inv_deg: np.ndarray,
    tol: float,
    max_iters: int,
    certify: bool,
) -> tuple[np.ndarray, int, np.ndarray]:
    """Vectorized sweep loop; mutates ``values`` in place (reference path)."""
    n = values.shape[0]
    swept = np.empty_like(values)
    diff = np.empty_like(values)
    residual = np.full(n, np.inf)
    previous = np.full(n, np.inf)
    converged = np.zeros(n, dtype=bool)
    iters = 0
    for iters in range(1, max_iters + 1):
        _neighbor_sum(values, swept)
        np.multiply(swept, inv_deg, out=swept)
        np.copyto(swept, values, where=fixed)
        np.subtract(swept, values, out=diff)
        np.abs(diff, out=diff)
        residual = diff.reshape(n, -1).max(axis=1)
        values[...] = swept
        if certify:
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = residual / previous
                estimate = residual * ratio / (1.0 - ratio)
            improving = np.isfinite(previous) & (residual < previous)
            converged = (residual == 0.0) | (
                (residual <= tol) & improving & (estimate <= tol)
            )
        else:
            converged = residual <= tol
        if converged.all():
            break
        previous = residual
    return residual, iters, converged


def _sweep_loop_jit_source():
    """Numba version of the sweep loop; factored out for lazy compilation.

    Neighbor accumulation order (up, down, left, right) matches the
    vectorized path, so the two produce bit-identical values.
    """
    import numba

    @numba.njit(cache=True)
    def sweep_loop(values, fixed, inv_deg, tol, max_iters, certify):
        n, rows, cols = values.shape
        residual = np.full(n, np.inf)
        previous = np.full(n, np.inf)
        converged = np.zeros(n, np.bool_)
        swept = np.empty((rows, cols))
        iters = 0
        for iters in range(1, max_iters + 1):
            for k in range(n):
                worst = 0.0
                for i in range(rows):
                    for j in range(cols):
                        if fixed[k, i, j]:
                            swept[i, j] = values[k, i, j]
                        else:
                            total = 0.0
                            if i > 0:
                                total += values[k, i - 1, j]
                            if i < rows - 1:
                                total += values[k, i + 1, j]
                            if j > 0:
                                total += values[k, i, j - 1]
                            if j < cols - 1:
                                total += values[k, i, j + 1]
                            new = total * inv_deg[i, j]
                            gap = abs(new - values[k, i, j])
                            if gap > worst:
                                worst = gap
                            swept[i, j] = new
                for i in range(rows):
                    for j in range(cols):
                        values[k, i, j] = swept[i, j]
                residual[k] = worst
            all_done = True
            for k in range(n):
                if certify:
                    done = residual[k] == 0.0
                    if (
                        not done
                        and residual[k] <= tol
                        and np.isfinite(previous[k])
                        and residual[k] < previous[k]
                    ):
                        ratio = residual[k] / previous[k]
                        done = residual[k] * ratio / (1.0 - ratio) <= tol
                    converged[k] = done
                else:
                    converged[k] = residual[k] <= tol
                if not converged[k]:
                    all_done = False
            if all_done:
                break
            for k in range(n):
                previous[k] = residual[k]
        return residual, iters, converged

    return sweep_loop


_SWEEP_JIT = None
_SWEEP_JIT_FAILED = False


def _compiled_sweep_loop():
    """Best-available sweep loop: the jitted kernel, or None if numba is absent."""
    global _SWEEP_JIT, _SWEEP_JIT_FAILED
    if _SWEEP_JIT is None and not _SWEEP_JIT_FAILED:
        try:
            _SWEEP_JIT = _sweep_loop_jit_source()
        except ImportError:
            _SWEEP_JIT_FAILED = True
    return _SWEEP_JIT


def direct_solve_oracle(potential: PotentialField) -> PotentialField:
    """Solve the free-cell neighbor-average system exactly (sparse LU).

    Independent check for the Jacobi path: assembles the linear system
    "each free cell equals the mean of its in-grid neighbors" with fixed
    cells as boundary data and solves it directly. Intended for grids up to
    64x64.
    """
    from scipy.sparse import lil_matrix
    from scipy.sparse.linalg import spsolve

    out = potential.copy()
    free = out.free_mask()
    n_free = int(free.sum())
    if n_free == 0:
        out.residual = 0.0
        out.iterations_used = 0
        out.converged = True
        return out
    if out.values.size > 64 * 64:
        raise ValueError("direct solve is intended for grids up to 64x64")

    index = -np.ones(out.values.shape, dtype=np.int64)
    index[free] = np.arange(n_free)
    system = lil_matrix((n_free, n_free))
    rhs = np.zeros(n_free)
    rows, cols = np.nonzero(free)
    shape = out.values.shape
    for r, c in zip(rows, cols):
        u = index[r, c]
        neighbors = []
        if r > 0:
            neighbors.append((r - 1, c))
        if r < shape[0] - 1:
            neighbors.append((r + 1, c))
        if c > 0:
            neighbors.append((r, c - 1))
        if c < shape[1] - 1:
            neighbors.append((r, c + 1))
        system[u, u] = float(len(neighbors))
        for nr, nc in neighbors:
            if free[nr, nc]:
                system[u, index[nr, nc]] = -1.0
            else:
                rhs[u] += out.values[nr, nc]
    solution = spsolve(system.tocsr(), rhs)
    assert np.all(np.isfinite(solution)), "singular system: free region has no fixed cell"
    out.values[free] = solution
    out.residual = 0.0
    out.iterations_used = 0
    out.converged = True
    return out


def sample(potential: PotentialField, position: np.ndarray) -> float:
    """Bilinear interpolation of a solved field at a continuous position.

    Interpolates over the four surrounding cell centers; positions in the
    outer half-cell margin clamp to the nearest center. The field must have
    been solved (its grid is required for geometry).
    """
    if not potential.solved:
        raise ValueError("field must be solved before sampling")
    grid = potential.grid
    if grid is None:
        raise ValueError("field has no grid geometry attached")
    g = grid.cells_per_side
    pos = np.asarray(position, dtype=np.float64)
    # continuous cell-center coordinates: center k sits at index k
    coords = (pos + grid.world_half_extent) / grid.cell_size - 0.5
    coords = np.clip(coords, 0.0, g - 1.0)
    ix0, iy0 = np.floor(coords).astype(int)
    ix0 = min(ix0, g - 2) if g > 1 else 0
    iy0 = min(iy0, g - 2) if g > 1 else 0
    fx = coords[0] - ix0
    fy = coords[1] - iy0
    v = potential.values
    top = v[ix0, iy0] * (1.0 - fx) + v[ix0 + 1, iy0] * fx
    bottom = v[ix0, iy0 + 1] * (1.0 - fx) + v[ix0 + 1, iy0 + 1] * fx
    return float(top * (1.0 - fy) + bottom * fy)
