"""Static maze geometry: parsing, adjacency, census and shortest paths.

A maze is loaded from a plain-text grid, one glyph per cell:

    `#` wall          `.` pill corridor      `o` power pill
    ` ` empty corridor `P` Pac-Man start     `G` ghost start (4, in the house)
    `H` ghost-house cell `F` fruit cell      `T` teleport mouth (edge cell)

Teleport mouths pair up in scan order (left-to-right, top-to-bottom); the
link between a pair is an ordinary edge of cost 1.  Ghost-house cells are
the `H` and `G` cells; the house exit is the unique navigable non-house
cell adjacent to the house.  Navigable cells get dense integer ids in scan
order, which every other module uses as its cell type.

A Maze is immutable after load and safe to share between threads; the
per-source distance maps are cached lazily behind a lock-free dict (worst
case a map is computed twice).
"""

from __future__ import annotations

import hashlib
import heapq
from collections import deque
from dataclasses import dataclass, field

# Canonical heading order is also the tie-break order everywhere.
UP, LEFT, DOWN, RIGHT = 0, 1, 2, 3
HEADINGS = (UP, LEFT, DOWN, RIGHT)
HEADING_NAMES = ("Up", "Left", "Down", "Right")
DELTAS = ((-1, 0), (0, -1), (1, 0), (0, 1))

WALL = "#"
GLYPHS = frozenset("#.o PGHFT")


def reverse_heading(heading: int) -> int:
    return (heading + 2) % 4


def heading_name(heading: int) -> str:
    return HEADING_NAMES[heading]


def heading_from_name(name: str) -> int:
    try:
        return HEADING_NAMES.index(name)
    except ValueError:
        raise MazeError(f"unknown heading name {name!r}") from None


class MazeError(ValueError):
    """Raised for malformed maze files."""


@dataclass(frozen=True)
class AdjacencyCensus:
    """Counts of navigable cells by degree (2, 3 and 4 only)."""

    deg2: int
    deg3: int
    deg4: int

    @property
    def total(self) -> int:
        return self.deg2 + self.deg3 + self.deg4

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.deg2, self.deg3, self.deg4)


@dataclass(eq=False)
class Maze:
    """Parsed level geometry.  Cells are dense ints in scan order."""

    width: int
    height: int
    text: str
    cell_rc: tuple[tuple[int, int], ...]          # id -> (row, col)
    id_at: dict[tuple[int, int], int]             # (row, col) -> id
    neighbors: tuple[tuple[int, ...], ...]        # id -> adjacent ids (incl. teleport)
    move_to: tuple[tuple[int | None, ...], ...]   # id -> per-heading target id
    teleport_pairs: tuple[tuple[int, int], ...]
    teleport_exit_heading: dict[int, int]         # T cell id -> off-grid heading
    house: frozenset[int]                         # H and G cells
    house_exit: int | None
    pill_layout: frozenset[int]
    power_pill_layout: frozenset[int]
    fruit_cell: int | None
    pacman_start: int
    ghost_starts: tuple[int, ...]
    corner_anchors: tuple[int, int, int, int]     # nearest navigable to each grid corner
    checksum: str
    _dist_maps: dict[int, list[int]] = field(default_factory=dict, repr=False)
    _diameter: int | None = field(default=None, repr=False)

    @property
    def n_cells(self) -> int:
        return len(self.cell_rc)

    def degree(self, cell: int) -> int:
        return len(self.neighbors[cell])

    def rc(self, cell: int) -> tuple[int, int]:
        return self.cell_rc[cell]

    def cell_at(self, row: int, col: int) -> int | None:
        return self.id_at.get((row, col))

    def is_teleport_move(self, cell: int, heading: int) -> bool:
        return self.teleport_exit_heading.get(cell) == heading

    def dist_row(self, src: int) -> list[int]:
        """BFS distance map from src; -1 marks unreachable cells.  Cached."""
        row = self._dist_maps.get(src)
        if row is None:
            row = self._bfs(src)
            self._dist_maps[src] = row
        return row

    def distance(self, a: int, b: int) -> int | None:
        """Shortest path length between navigable cells, None if unreachable."""
        d = self.dist_row(a)[b]
        return None if d < 0 else d

    def diameter(self) -> int:
        """Largest finite pairwise distance; used to normalise features."""
        if self._diameter is None:
            best = 0
            for src in range(self.n_cells):
                best = max(best, max(self.dist_row(src)))
            self._diameter = best
        return self._diameter

    def _bfs(self, src: int) -> list[int]:
        dist = [-1] * self.n_cells
        dist[src] = 0
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            d = dist[cur] + 1
            for nxt in self.neighbors[cur]:
                if dist[nxt] < 0:
                    dist[nxt] = d
                    queue.append(nxt)
        return dist


def load_maze(text: str) -> Maze:
    """Parse maze-file contents into a Maze, validating every invariant."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MazeError("empty maze file")
    width = len(lines[0])
    for r, line in enumerate(lines):
        if len(line) != width:
            raise MazeError(f"ragged grid: row {r} has length {len(line)}, expected {width}")
        for c, g in enumerate(line):
            if g not in GLYPHS:
                raise MazeError(f"unknown glyph {g!r} at row {r}, column {c}")
    height = len(lines)

    cell_rc: list[tuple[int, int]] = []
    id_at: dict[tuple[int, int], int] = {}
    for r in range(height):
        for c in range(width):
            if lines[r][c] != WALL:
                id_at[(r, c)] = len(cell_rc)
                cell_rc.append((r, c))
    n = len(cell_rc)
    if n == 0:
        raise MazeError("maze has no navigable cells")

    def cells_of(glyph: str) -> list[int]:
        return [i for i, (r, c) in enumerate(cell_rc) if lines[r][c] == glyph]

    pacman_cells = cells_of("P")
    if len(pacman_cells) != 1:
        raise MazeError(
            "missing Pac-Man start" if not pacman_cells
            else f"expected 1 Pac-Man start, found {len(pacman_cells)}"
        )
    ghost_starts = cells_of("G")
    if len(ghost_starts) not in (0, 4):
        raise MazeError(f"expected 4 ghost starts, found {len(ghost_starts)}")
    power_pills = cells_of("o")
    if len(power_pills) not in (0, 4):
        raise MazeError(f"expected 4 power pills, found {len(power_pills)}")
    fruit_cells = cells_of("F")
    if len(fruit_cells) > 1:
        raise MazeError(f"expected at most 1 fruit cell, found {len(fruit_cells)}")

    # Teleports: pair in scan order, each mouth must sit on the border with
    # exactly one off-grid heading (so the exit direction is unambiguous).
    t_cells = cells_of("T")
    if len(t_cells) % 2 != 0:
        r, c = cell_rc[t_cells[-1]]
        raise MazeError(f"unpaired teleport at row {r}, column {c}")
    teleport_exit_heading: dict[int, int] = {}
    for cell in t_cells:
        r, c = cell_rc[cell]
        off = [h for h, (dr, dc) in enumerate(DELTAS)
               if not (0 <= r + dr < height and 0 <= c + dc < width)]
        if len(off) != 1:
            raise MazeError(
                f"teleport at row {r}, column {c} must have exactly one "
                f"off-grid side, found {len(off)}"
            )
        teleport_exit_heading[cell] = off[0]
    teleport_pairs = tuple(
        (t_cells[i], t_cells[i + 1]) for i in range(0, len(t_cells), 2)
    )
    teleport_link = {}
    for a, b in teleport_pairs:
        teleport_link[a] = b
        teleport_link[b] = a

    # Movement table: grid neighbours plus the teleport link on the off-grid
    # heading of a mouth.  The traverser keeps its heading.
    move_to: list[tuple[int | None, ...]] = []
    for i, (r, c) in enumerate(cell_rc):
        row: list[int | None] = []
        for h, (dr, dc) in enumerate(DELTAS):
            rr, cc = r + dr, c + dc
            if 0 <= rr < height and 0 <= cc < width:
                row.append(id_at.get((rr, cc)))
            elif teleport_exit_heading.get(i) == h:
                row.append(teleport_link[i])
            else:
                row.append(None)
        move_to.append(tuple(row))
    neighbors = tuple(
        tuple(t for t in row if t is not None) for row in move_to
    )

    if n > 1:
        for i, nbrs in enumerate(neighbors):
            if not nbrs:
                r, c = cell_rc[i]
                raise MazeError(f"isolated navigable cell at row {r}, column {c}")

    house = frozenset(cells_of("H") + ghost_starts)
    house_exit: int | None = None
    if house:
        exits = {nbr for cell in house for nbr in neighbors[cell] if nbr not in house}
        if len(exits) != 1:
            raise MazeError(f"ghost house must have exactly 1 exit, found {len(exits)}")
        (house_exit,) = exits

    pills = frozenset(cells_of("."))

    # Nearest navigable cell to each grid corner, scan order breaking ties.
    anchors = []
    for cr, cc in ((0, 0), (0, width - 1), (height - 1, 0), (height - 1, width - 1)):
        anchors.append(min(
            range(n), key=lambda i: (abs(cell_rc[i][0] - cr) + abs(cell_rc[i][1] - cc), i)
        ))

    canonical = "\n".join(lines) + "\n"
    return Maze(
        width=width,
        height=height,
        text=canonical,
        cell_rc=tuple(cell_rc),
        id_at=id_at,
        neighbors=neighbors,
        move_to=tuple(move_to),
        teleport_pairs=teleport_pairs,
        teleport_exit_heading=teleport_exit_heading,
        house=house,
        house_exit=house_exit,
        pill_layout=pills,
        power_pill_layout=frozenset(power_pills),
        fruit_cell=fruit_cells[0] if fruit_cells else None,
        pacman_start=pacman_cells[0],
        ghost_starts=tuple(ghost_starts),
        corner_anchors=tuple(anchors),
        checksum=hashlib.sha256(canonical.encode()).hexdigest(),
    )


def load_maze_file(path) -> Maze:
    with open(path, encoding="utf-8") as fh:
        return load_maze(fh.read())


def adjacency_census(maze: Maze) -> AdjacencyCensus:
    """Per-degree counts of navigable cells (teleport links count)."""
    counts = {2: 0, 3: 0, 4: 0}
    for cell in range(maze.n_cells):
        d = maze.degree(cell)
        if d in counts:
            counts[d] += 1
    return AdjacencyCensus(counts[2], counts[3], counts[4])


def branching_rate(census: AdjacencyCensus, w: float) -> float:
    """Census-weighted mean moves per step for w actors."""
    total = census.total
    if total <= 0:
        raise ValueError("branching rate undefined for an empty census")
    if w < 0:
        raise ValueError("actor count must be >= 0")
    return (census.deg2 * 2 * w + census.deg3 * 3 * w + census.deg4 * 4 * w) / total


def shortest_distance(maze: Maze, a: int, b: int) -> int | None:
    """A* shortest path length between navigable cells; None if unreachable.

    The heuristic is Manhattan distance relaxed through every teleport pair,
    which keeps it admissible on mazes with tunnels.
    """
    if a == b:
        return 0
    (br, bc) = maze.cell_rc[b]
    shortcuts = []
    for t1, t2 in maze.teleport_pairs:
        for mouth_in, mouth_out in ((t1, t2), (t2, t1)):
            (orow, ocol) = maze.cell_rc[mouth_out]
            shortcuts.append((maze.cell_rc[mouth_in], abs(orow - br) + abs(ocol - bc) + 1))

    def h(cell: int) -> int:
        r, c = maze.cell_rc[cell]
        best = abs(r - br) + abs(c - bc)
        for (ir, ic), tail in shortcuts:
            best = min(best, abs(r - ir) + abs(c - ic) + tail)
        return best

    best_g = {a: 0}
    frontier = [(h(a), 0, a)]
    while frontier:
        f, g, cur = heapq.heappop(frontier)
        if cur == b:
            return g
        if g > best_g.get(cur, g):
            continue
        for nxt in maze.neighbors[cur]:
            ng = g + 1
            if ng < best_g.get(nxt, ng + 1):
                best_g[nxt] = ng
                heapq.heappush(frontier, (ng + h(nxt), ng, nxt))
    return None
