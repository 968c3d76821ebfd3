"""Hot array kernels for the Match-3 board: match labeling, swap tests,
gravity, refill, and full random playouts.

Every kernel is written once in plain Python over numpy arrays and compiled
with numba's ``@njit`` when available. Setting ``M3LAB_NO_NUMBA=1`` selects
the uncompiled pure-numpy path; both paths execute the same source and
produce bit-identical results (the benchmark in ``m3lab.bench`` relies on
this).

Conventions shared by all kernels:

- ``grid`` is an ``int8[H, W]`` array of color ids; ``-1`` marks a cleared
  cell mid-cascade. Public entry/exit states never contain ``-1``.
- RNG state is SplitMix64 carried in a one-element ``uint64`` array that the
  kernel advances in place. Keeping the state in an array (not a scalar)
  preserves the uint64 dtype across the Python/numba boundary.
- Scripted refill queues are ``qarr: int8[W, L]`` with per-column cursor
  ``qpos`` and length ``qlen`` (``int64[W]``); an exhausted or empty queue
  falls back to SplitMix64 draws from ``rng``.
"""

import functools
import os

import numpy as np

USE_NUMBA = os.environ.get("M3LAB_NO_NUMBA", "") not in ("1", "true", "yes")

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)

CASCADE_STEP_CAP = 1000
RESHUFFLE_ATTEMPT_CAP = 1000


def rand_u64(rng):
    """Advance the SplitMix64 state ``rng`` (uint64[1]) and return a raw draw."""
    s = rng[0] + _GOLDEN
    rng[0] = s
    z = (s ^ (s >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def rand_below(rng, n):
    """Uniform draw in [0, n) from the SplitMix64 state ``rng``."""
    return np.int64(rand_u64(rng) % np.uint64(n))


def fill_board(grid, rng, num_colors):
    """Fill ``grid`` in place with seeded colors, redrawing any spawn that
    would complete a horizontal or vertical triple. Row-major draw order."""
    h, w = grid.shape
    for r in range(h):
        for c in range(w):
            while True:
                color = rand_below(rng, num_colors)
                if c >= 2 and grid[r, c - 1] == color and grid[r, c - 2] == color:
                    continue
                if r >= 2 and grid[r - 1, c] == color and grid[r - 2, c] == color:
                    continue
                grid[r, c] = color
                break


def has_match(grid):
    """True if any horizontal or vertical run of >=3 identical cells exists."""
    h, w = grid.shape
    for r in range(h):
        for c in range(w - 2):
            v = grid[r, c]
            if v >= 0 and grid[r, c + 1] == v and grid[r, c + 2] == v:
                return True
    for c in range(w):
        for r in range(h - 2):
            v = grid[r, c]
            if v >= 0 and grid[r + 1, c] == v and grid[r + 2, c] == v:
                return True
    return False


def match_labels(grid):
    """Label every matched cell with its group id.

    A group is the union of all horizontal/vertical runs of >=3 identical
    cells that share at least one cell (so crosses, Ls and Ts count once).
    Group ids are dense and assigned in row-major order of each group's
    first cell.

    Returns ``(labels, sizes, n)``: ``labels`` is int64[H, W] with -1 for
    unmatched cells, ``sizes[:n]`` the per-group cell counts.
    """
    h, w = grid.shape
    max_runs = h * (w // 3) + w * (h // 3) + 1
    run_of = np.full((h, w), -1, dtype=np.int64)
    parent = np.empty(max_runs, dtype=np.int64)
    n_runs = 0

    for r in range(h):
        c = 0
        while c < w - 2:
            v = grid[r, c]
            if v >= 0:
                end = c + 1
                while end < w and grid[r, end] == v:
                    end += 1
                if end - c >= 3:
                    parent[n_runs] = n_runs
                    for k in range(c, end):
                        run_of[r, k] = n_runs
                    n_runs += 1
                c = end
            else:
                c += 1

    for c in range(w):
        r = 0
        while r < h - 2:
            v = grid[r, c]
            if v >= 0:
                end = r + 1
                while end < h and grid[end, c] == v:
                    end += 1
                if end - r >= 3:
                    parent[n_runs] = n_runs
                    rid = n_runs
                    n_runs += 1
                    for k in range(r, end):
                        other = run_of[k, c]
                        if other >= 0:
                            # union rid <- other's root
                            a = rid
                            while parent[a] != a:
                                a = parent[a]
                            b = other
                            while parent[b] != b:
                                b = parent[b]
                            if a != b:
                                parent[b] = a
                        else:
                            run_of[k, c] = rid
                r = end
            else:
                r += 1

    labels = np.full((h, w), -1, dtype=np.int64)
    sizes = np.zeros(max_runs, dtype=np.int64)
    compact = np.full(max_runs, -1, dtype=np.int64)
    n_groups = 0
    for r in range(h):
        for c in range(w):
            rid = run_of[r, c]
            if rid >= 0:
                root = rid
                while parent[root] != root:
                    root = parent[root]
                g = compact[root]
                if g < 0:
                    g = n_groups
                    compact[root] = g
                    n_groups += 1
                labels[r, c] = g
                sizes[g] += 1
    return labels, sizes, n_groups


def _line_match_at(grid, r, c):
    """True if the cell (r, c) sits on a horizontal or vertical run >=3."""
    h, w = grid.shape
    v = grid[r, c]
    lo = c
    while lo > 0 and grid[r, lo - 1] == v:
        lo -= 1
    hi = c
    while hi < w - 1 and grid[r, hi + 1] == v:
        hi += 1
    if hi - lo >= 2:
        return True
    lo = r
    while lo > 0 and grid[lo - 1, c] == v:
        lo -= 1
    hi = r
    while hi < h - 1 and grid[hi + 1, c] == v:
        hi += 1
    return hi - lo >= 2


def swap_makes_match(grid, r0, c0, r1, c1):
    """Virtually swap two cells and report whether a match appears.

    The board is restored before returning. Assumes the rest of the board
    holds no match, so only lines through the swapped cells are checked.
    """
    if grid[r0, c0] == grid[r1, c1]:
        return False
    tmp = grid[r0, c0]
    grid[r0, c0] = grid[r1, c1]
    grid[r1, c1] = tmp
    found = _line_match_at(grid, r0, c0) or _line_match_at(grid, r1, c1)
    tmp = grid[r0, c0]
    grid[r0, c0] = grid[r1, c1]
    grid[r1, c1] = tmp
    return found


def moves_into(grid, out):
    """Enumerate legal swaps into ``out`` (int64[:, 4] rows r0,c0,r1,c1).

    Scan order is canonical: row-major over the first cell, right-neighbor
    swap before down-neighbor swap, which equals lexicographic order of the
    canonical (a, b) pair. Returns the number of rows written.
    """
    h, w = grid.shape
    n = 0
    for r in range(h):
        for c in range(w):
            if c + 1 < w and swap_makes_match(grid, r, c, r, c + 1):
                out[n, 0] = r
                out[n, 1] = c
                out[n, 2] = r
                out[n, 3] = c + 1
                n += 1
            if r + 1 < h and swap_makes_match(grid, r, c, r + 1, c):
                out[n, 0] = r
                out[n, 1] = c
                out[n, 2] = r + 1
                out[n, 3] = c
                n += 1
    return n


def count_moves(grid):
    """Number of legal swaps on the board."""
    h, w = grid.shape
    n = 0
    for r in range(h):
        for c in range(w):
            if c + 1 < w and swap_makes_match(grid, r, c, r, c + 1):
                n += 1
            if r + 1 < h and swap_makes_match(grid, r, c, r + 1, c):
                n += 1
    return n


def clear_and_gravity(grid, labels):
    """Remove labeled cells and let survivors fall straight down.

    Cleared slots surface as -1 at the top of each column; column order of
    surviving tiles is preserved.
    """
    h, w = grid.shape
    for c in range(w):
        dst = h - 1
        for r in range(h - 1, -1, -1):
            if labels[r, c] < 0:
                grid[dst, c] = grid[r, c]
                dst -= 1
        for r in range(dst, -1, -1):
            grid[r, c] = -1


def refill(grid, qarr, qlen, qpos, rng, num_colors):
    """Fill every -1 cell, columns left to right, rows top-down.

    Each spawn comes from the column's scripted queue while it lasts, then
    from SplitMix64 fallback draws.
    """
    h, w = grid.shape
    for c in range(w):
        for r in range(h):
            if grid[r, c] == -1:
                if qpos[c] < qlen[c]:
                    grid[r, c] = qarr[c, qpos[c]]
                    qpos[c] += 1
                else:
                    grid[r, c] = rand_below(rng, num_colors)


def resolve_fast(grid, qarr, qlen, qpos, rng, num_colors):
    """Run the full cascade loop without building step records.

    Returns ``(points, steps)``; ``points == -1`` signals the defensive
    step cap was exceeded (never expected on well-formed boards).
    """
    points = np.int64(0)
    mult = np.int64(1)
    steps = 0
    while True:
        labels, sizes, n = match_labels(grid)
        if n == 0:
            break
        steps += 1
        if steps > CASCADE_STEP_CAP:
            return np.int64(-1), steps
        for g in range(n):
            sz = sizes[g]
            points += (20 + 10 * (sz - 3)) * sz * mult
        clear_and_gravity(grid, labels)
        refill(grid, qarr, qlen, qpos, rng, num_colors)
        mult += 1
    return points, steps


def swap_and_resolve(grid, r0, c0, r1, c1, qarr, qlen, qpos, rng, num_colors):
    """Apply a swap and resolve cascades; 0 means the swap was invalid and
    the board is unchanged. -1 signals the cascade step-cap fault."""
    if not swap_makes_match(grid, r0, c0, r1, c1):
        return np.int64(0)
    tmp = grid[r0, c0]
    grid[r0, c0] = grid[r1, c1]
    grid[r1, c1] = tmp
    points, _steps = resolve_fast(grid, qarr, qlen, qpos, rng, num_colors)
    return points


def reshuffle_board(grid, rng):
    """Permute the tile multiset in place until the board has no matches and
    at least one legal move.

    Returns the number of attempts used, or -1 if no valid permutation was
    found within the cap (the board is then restored).
    """
    h, w = grid.shape
    n = h * w
    original = grid.copy()
    flat = np.empty(n, dtype=np.int8)
    for i in range(n):
        flat[i] = grid[i // w, i % w]
    for attempt in range(1, RESHUFFLE_ATTEMPT_CAP + 1):
        for i in range(n - 1, 0, -1):
            j = rand_below(rng, i + 1)
            tmp = flat[i]
            flat[i] = flat[j]
            flat[j] = tmp
        for i in range(n):
            grid[i // w, i % w] = flat[i]
        if not has_match(grid) and count_moves(grid) > 0:
            return attempt
    for r in range(h):
        for c in range(w):
            grid[r, c] = original[r, c]
    return -1


def random_playout(grid, qarr, qlen, qpos, rng, srng, num_colors, max_moves):
    """Play up to ``max_moves`` uniformly random legal moves in place.

    Move choice draws from ``srng``; refills and reshuffles draw from
    ``rng`` (the refill stream), mirroring real play. The available-move
    count is sampled after each move's cascade resolution, before any
    reshuffle.

    Returns ``(points_gained, avail_sum, moves_played)``; points of -1
    signals an internal fault bubbled up from the cascade or reshuffle.
    """
    h, w = grid.shape
    buf = np.empty((h * (w - 1) + (h - 1) * w, 4), dtype=np.int64)
    gained = np.int64(0)
    avail_sum = np.int64(0)
    played = 0
    n = moves_into(grid, buf)
    for _t in range(max_moves):
        if n == 0:
            if reshuffle_board(grid, rng) < 0:
                return np.int64(-1), avail_sum, played
            n = moves_into(grid, buf)
        k = rand_below(srng, n)
        pts = swap_and_resolve(
            grid, buf[k, 0], buf[k, 1], buf[k, 2], buf[k, 3],
            qarr, qlen, qpos, rng, num_colors,
        )
        if pts <= 0:
            return np.int64(-1), avail_sum, played
        gained += pts
        played += 1
        # one scan doubles as the post-move sample and the next selection pool
        n = moves_into(grid, buf)
        avail_sum += n
    return gained, avail_sum, played


def _errstate_wrapped(fn):
    # uint64 wraparound is intentional; silence numpy's scalar overflow
    # warnings on the uncompiled path (numba wraps silently by design).
    @functools.wraps(fn)
    def wrapper(*args):
        with np.errstate(over="ignore"):
            return fn(*args)

    return wrapper


if USE_NUMBA:
    from numba import njit

    _jit = njit(cache=True)
    # Rebind in dependency order so cross-kernel calls resolve to the
    # compiled versions at numba's type-inference time.
    rand_u64 = _jit(rand_u64)
    rand_below = _jit(rand_below)
    fill_board = _jit(fill_board)
    has_match = _jit(has_match)
    match_labels = _jit(match_labels)
    _line_match_at = _jit(_line_match_at)
    swap_makes_match = _jit(swap_makes_match)
    moves_into = _jit(moves_into)
    count_moves = _jit(count_moves)
    clear_and_gravity = _jit(clear_and_gravity)
    refill = _jit(refill)
    resolve_fast = _jit(resolve_fast)
    swap_and_resolve = _jit(swap_and_resolve)
    reshuffle_board = _jit(reshuffle_board)
    random_playout = _jit(random_playout)
else:
    rand_below = _errstate_wrapped(rand_below)
    fill_board = _errstate_wrapped(fill_board)
    swap_makes_match = _errstate_wrapped(swap_makes_match)
    moves_into = _errstate_wrapped(moves_into)
    count_moves = _errstate_wrapped(count_moves)
    refill = _errstate_wrapped(refill)
    resolve_fast = _errstate_wrapped(resolve_fast)
    swap_and_resolve = _errstate_wrapped(swap_and_resolve)
    reshuffle_board = _errstate_wrapped(reshuffle_board)
    random_playout = _errstate_wrapped(random_playout)


def new_rng_state(seed):
    """SplitMix64 state array from a 64-bit integer seed."""
    return np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF)], dtype=np.uint64)


def max_move_count(height, width):
    """Upper bound on the number of adjacent swaps on an H x W board."""
    return height * (width - 1) + (height - 1) * width
