"""Bottom-up tree automata over cell-extraction programs.

States are table cells plus a bottom state (out of range / failure) and the
accepting state reached only through List/Filter. A single automaton built
for several examples keeps one cell-or-bottom component per example; the
intersection of two automata is the automaton over the concatenated example
vectors, which is the standard product construction with only reachable
pairs kept.

Predicates are grouped into behavior classes (same truth table over all
(y, z) cell pairs); transitions are computed per class and shared between
all automata over one table. Final transitions for negative examples are
kept symbolic (a guard over argument tuples) and never materialized.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .grid import DIRECTIONS, CellRef, Grid
from .lang import (
    GETCELL_KS,
    Atom,
    FilterProg,
    GetCell,
    ListProg,
    Predicate,
    X,
    eval_atom,
    print_cellprog,
    print_simple,
)
from .preds import PredicateUniverse
from .score import DEFAULT_SCORES, ScoreTable

DEFAULT_DEPTH = 4


class SynthTimeout(Exception):
    """Raised when a synthesis deadline expires."""


class ArityMismatch(Exception):
    pass


def _deadline_check(deadline: Optional[float]) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise SynthTimeout()


# ---------------------------------------------------------------------------
# Base automaton: table-dependent, example-independent machinery
# ---------------------------------------------------------------------------


class BaseFta:
    """Shared transition structure for one (table, predicate universe) pair.

    GetCell transitions exist for every cell (and bottom) and every symbol;
    they are computed from behavior classes on demand rather than stored as
    an explicit list, which keeps construction linear in practice.
    """

    def __init__(self, grid: Grid, universe: PredicateUniverse,
                 scores: ScoreTable = DEFAULT_SCORES):
        scores.validate()
        self.grid = grid
        self.universe = universe
        self.scores = scores
        self.m = grid.rows * grid.cols
        self.bot = self.m  # state index for the bottom state
        self._cell_mask = (1 << self.m) - 1
        self._rep = sum(1 << (i * self.m) for i in range(self.m))

        self._rays = {}
        for d in DIRECTIONS:
            per_cell = []
            for idx in range(self.m):
                cells = [self.index(z) for z in _ray_cells(grid, self.cell(idx), d)]
                per_cell.append(tuple(cells))
            self._rays[d] = per_cell

        self._build_classes()

        self._ray_group_cache = {}
        self._joint_cache = {}
        self._behavior_cache = {}
        self._span_class_cache = {}

    # -- indexing ----------------------------------------------------------

    def index(self, c: CellRef) -> int:
        return (c.row - 1) * self.grid.cols + (c.col - 1)

    def cell(self, idx: int) -> CellRef:
        return CellRef(idx // self.grid.cols + 1, idx % self.grid.cols + 1)

    def cells_mask(self, cells) -> int:
        mask = 0
        for c in cells:
            mask |= 1 << self.index(c)
        return mask

    # -- predicate behaviors -----------------------------------------------

    def _atom_behavior(self, atom: Atom) -> int:
        g = self.grid
        if atom.kind != "eq_cells":
            zmask = 0
            for zi in range(self.m):
                if eval_atom(atom, g, self.cell(0), self.cell(zi)):
                    zmask |= 1 << zi
            return zmask * self._rep
        behavior = 0
        for yi in range(self.m):
            y = self.cell(yi)
            for zi in range(self.m):
                if eval_atom(atom, g, y, self.cell(zi)):
                    behavior |= 1 << (yi * self.m + zi)
        return behavior

    def _build_classes(self) -> None:
        atom_behaviors = {}
        full = self._cell_mask * self._rep
        groups = {}  # behavior -> [best_theta, best_pred, best_text]
        for pred in self.universe.predicates:
            if pred.is_true():
                b = full
            else:
                b = full
                for a in pred.atoms:
                    ab = atom_behaviors.get(a)
                    if ab is None:
                        ab = self._atom_behavior(a)
                        atom_behaviors[a] = ab
                    b &= ab
                    if not b:
                        break
            theta = self.scores.predicate(pred)
            entry = groups.get(b)
            if entry is None:
                groups[b] = [theta, pred, None]
            elif theta > entry[0]:
                groups[b] = [theta, pred, None]
            elif theta == entry[0]:
                if entry[2] is None:
                    entry[2] = entry[1].text()
                text = pred.text()
                if text < entry[2]:
                    groups[b] = [theta, pred, text]
        descriptors = []
        for behavior, (theta, pred, text) in groups.items():
            descriptors.append((-theta, text if text is not None else pred.text(),
                                behavior, pred, theta))
        descriptors.sort(key=lambda d: (d[0], d[1]))
        self.n_classes = len(descriptors)
        self.class_behavior = [d[2] for d in descriptors]
        self.class_pred = [d[3] for d in descriptors]
        self.class_theta = [d[4] for d in descriptors]
        self.class_text = [d[1] for d in descriptors]
        self._behavior_to_class = {d[2]: i for i, d in enumerate(descriptors)}

    def behavior_of(self, pred: Predicate) -> int:
        """Truth-table bitmask of an arbitrary predicate (not only universe ones)."""
        cached = self._behavior_cache.get(pred)
        if cached is not None:
            return cached
        b = self._cell_mask * self._rep
        for a in pred.atoms:
            b &= self._atom_behavior(a)
        self._behavior_cache[pred] = b
        return b

    def zmask(self, behavior: int, y_idx: int) -> int:
        return (behavior >> (y_idx * self.m)) & self._cell_mask

    # -- GetCell transitions -------------------------------------------------

    def _targets_for(self, ray, restricted: int):
        hits = [z for z in ray if (restricted >> z) & 1]
        n = len(hits)
        out = []
        for k in GETCELL_KS:
            if abs(k) > n:
                out.append(self.bot)
            elif k > 0:
                out.append(hits[k - 1])
            else:
                out.append(hits[n - abs(k)])
        return tuple(out)

    def getcell_target(self, src: int, dir: str, k: int, behavior: int) -> int:
        """Single transition: source state, symbol -> target state."""
        if src == self.bot:
            return self.bot
        ray = self._rays[dir][src]
        restricted = self.zmask(behavior, src)
        hits = [z for z in ray if (restricted >> z) & 1]
        n = len(hits)
        if abs(k) > n:
            return self.bot
        return hits[k - 1] if k > 0 else hits[n - abs(k)]

    def ray_groups(self, cell_idx: int, dir: str):
        """Classes grouped by their filtered ray at (cell, dir).

        Returns (rgid array indexed by class, groups list of
        (representative class id, targets aligned with GETCELL_KS)).
        """
        key = (cell_idx, dir)
        cached = self._ray_group_cache.get(key)
        if cached is not None:
            return cached
        ray = self._rays[dir][cell_idx]
        raymask = 0
        for z in ray:
            raymask |= 1 << z
        m = self.m
        shift = cell_idx * m
        mask_m = self._cell_mask
        seen = {}
        rgid = []
        groups = []
        for cls in range(self.n_classes):
            r = ((self.class_behavior[cls] >> shift) & mask_m) & raymask
            gid = seen.get(r)
            if gid is None:
                gid = len(groups)
                seen[r] = gid
                groups.append((cls, self._targets_for(ray, r)))
            rgid.append(gid)
        result = (rgid, groups)
        self._ray_group_cache[key] = result
        return result

    def joint_successors(self, cells: tuple, dir: str):
        """Per k: deduplicated (targets per distinct cell, best class id) list.

        `cells` is a sorted tuple of distinct cell indices. Classes with the
        same joint filtered outcome share an entry; the representative class
        is the best-scoring one (lowest id).
        """
        key = (cells, dir)
        cached = self._joint_cache.get(key)
        if cached is not None:
            return cached
        parts = [self.ray_groups(c, dir) for c in cells]
        per_k = [dict() for _ in GETCELL_KS]
        if len(cells) == 1:
            for cls, targets in parts[0][1]:
                for ki in range(len(GETCELL_KS)):
                    tgt = (targets[ki],)
                    if tgt not in per_k[ki]:
                        per_k[ki][tgt] = cls
        else:
            arrays = [p[0] for p in parts]
            group_lists = [p[1] for p in parts]
            seen = {}
            for cls in range(self.n_classes):
                sig = tuple(arr[cls] for arr in arrays)
                if sig in seen:
                    continue
                seen[sig] = cls
                for ki in range(len(GETCELL_KS)):
                    tgt = tuple(group_lists[p][sig[p]][1][ki] for p in range(len(cells)))
                    if tgt not in per_k[ki]:
                        per_k[ki][tgt] = cls
        result = [list(d.items()) for d in per_k]
        self._joint_cache[key] = result
        return result

    def span_classes(self, y_idx: int, span_mask: int, out_mask: int) -> int:
        """Bitmask of classes whose filtered span (with y bound) equals out."""
        key = (y_idx, span_mask, out_mask)
        cached = self._span_class_cache.get(key)
        if cached is not None:
            return cached
        m = self.m
        shift = y_idx * m
        mask_m = self._cell_mask
        result = 0
        for cls in range(self.n_classes):
            if ((self.class_behavior[cls] >> shift) & mask_m) & span_mask == out_mask:
                result |= 1 << cls
        self._span_class_cache[key] = result
        return result

    def base_transition_count(self) -> int:
        """Explicit GetCell transitions plus the bottom-propagation rule."""
        return self.m * 24 * len(self.universe.predicates) + 1


def _ray_cells(g: Grid, c: CellRef, dir: str):
    if dir == "u":
        return [CellRef(r, c.col) for r in range(c.row, 0, -1)]
    if dir == "d":
        return [CellRef(r, c.col) for r in range(c.row, g.rows + 1)]
    if dir == "l":
        return [CellRef(c.row, k) for k in range(c.col, 0, -1)]
    return [CellRef(c.row, k) for k in range(c.col, g.cols + 1)]


def build_base(grid: Grid, universe: PredicateUniverse,
               scores: ScoreTable = DEFAULT_SCORES) -> BaseFta:
    return BaseFta(grid, universe, scores)


# ---------------------------------------------------------------------------
# Per-example automata and products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Chain:
    theta: float
    prog: object  # CellProg
    text: str
    size: int


class Fta:
    """Automaton for a list of examples over one shared base.

    `examples` holds (input cell index, output) pairs where the output is a
    tuple of cell indices for a positive example and None for a negative
    one. The language is exactly the simple programs consistent with every
    example (within the GetCell depth cap used for extraction).
    """

    def __init__(self, base: BaseFta, t: int, examples: tuple,
                 depth: int = DEFAULT_DEPTH,
                 enable_list: bool = True, enable_filter: bool = True,
                 parents=None):
        self.base = base
        self.t = t
        self.examples = examples
        self.depth = depth
        self.enable_list = enable_list
        self.enable_filter = enable_filter
        self._layers = None
        self._rank = None
        self._ranked = False
        self._run_cache = {}
        self._parents = parents

    # -- reachability ---------------------------------------------------------

    def _init_vector(self) -> tuple:
        return tuple(inp for inp, _ in self.examples)

    def layers(self, deadline: Optional[float] = None):
        """Best chain per (state vector, GetCell depth), by score then text."""
        if self._layers is not None:
            return self._layers
        base = self.base
        bot = base.bot
        ints = base.scores.ints
        cls_theta = base.class_theta
        cls_pred = base.class_pred
        init = self._init_vector()
        layers = [{init: _Chain(1.0, X(), "x", 1)}]
        for d in range(self.depth):
            _deadline_check(deadline)
            nxt = {}
            for sv, chain in layers[d].items():
                distinct = tuple(sorted({c for c in sv if c != bot}))
                if not distinct:
                    continue  # all-bottom: every extension stays all-bottom
                positions = tuple(
                    -1 if c == bot else distinct.index(c) for c in sv
                )
                for dir in DIRECTIONS:
                    per_k = base.joint_successors(distinct, dir)
                    for ki, k in enumerate(GETCELL_KS):
                        int_theta = ints[k]
                        for tgts, cls in per_k[ki]:
                            succ = tuple(
                                bot if p < 0 else tgts[p] for p in positions
                            )
                            step = int_theta * cls_theta[cls]
                            nt = step if d == 0 else (chain.theta + step) / d
                            cur = nxt.get(succ)
                            if cur is not None and nt < cur.theta:
                                continue
                            prog = GetCell(chain.prog, dir, k, cls_pred[cls])
                            text = print_cellprog(prog)
                            if cur is None or nt > cur.theta or text < cur.text:
                                nxt[succ] = _Chain(nt, prog, text, d + 2)
            layers.append(nxt)
        self._layers = layers
        return layers

    # -- ranking ---------------------------------------------------------------

    def rank(self, deadline: Optional[float] = None):
        """Best accepted program: minimum size, then score, then printed text.

        Returns None when the automaton is empty (no accepted program within
        the depth cap).
        """
        if self._ranked:
            return self._rank
        best_list = self._rank_list(deadline)
        best_filter = self._rank_filter(
            deadline, None if best_list is None else best_list[0]
        )
        best = None
        for cand in (best_list, best_filter):
            if cand is None:
                continue
            if best is None or (cand[0], -cand[1], cand[2]) < (best[0], -best[1], best[2]):
                best = cand
        self._rank = None if best is None else best[3]
        self._ranked = True
        return self._rank

    def is_empty(self, deadline: Optional[float] = None) -> bool:
        return self.rank(deadline) is None

    def _positive_items(self):
        return [(i, out) for i, (_, out) in enumerate(self.examples) if out is not None]

    def _negative_positions(self):
        return [i for i, (_, out) in enumerate(self.examples) if out is None]

    def _rank_list(self, deadline):
        t = self.t
        if t < 1 or not self.enable_list:
            return None
        bot = self.base.bot
        layers = self.layers(deadline)
        positives = self._positive_items()
        negatives = self._negative_positions()
        full_cover = (1 << len(negatives)) - 1

        candidates = []  # per j: list of (size, -theta, text, prog, cover)
        for j in range(t):
            cj = []
            for layer in layers:
                for sv, chain in layer.items():
                    if any(sv[pos] != out[j] for pos, out in positives):
                        continue
                    cover = 0
                    for ni, pos in enumerate(negatives):
                        if sv[pos] == bot:
                            cover |= 1 << ni
                    cj.append((chain.size, -chain.theta, chain.text, chain.prog, cover))
            if not cj:
                return None
            cj.sort(key=lambda c: (c[0], c[1], c[2]))
            candidates.append(cj)

        states = {0: (0, 0.0, (), ())}  # cover -> (sum size, -sum theta, texts, progs)
        for j in range(t):
            _deadline_check(deadline)
            nxt = {}
            for cover, (ss, st, texts, progs) in states.items():
                for size, negtheta, text, prog, ccover in candidates[j]:
                    ncover = cover | ccover
                    val = (ss + size, st + negtheta, texts + (text,), progs + (prog,))
                    cur = nxt.get(ncover)
                    if cur is None or val < cur:
                        nxt[ncover] = val
            states = nxt
        done = [v for cover, v in states.items() if cover == full_cover]
        if not done:
            return None
        ss, st, _texts, progs = min(done)
        prog = ListProg(tuple(progs))
        return (1 + ss, -st / t, print_simple(prog), prog)

    def _pair_span(self, s2, s3, positives):
        """Per-positive span masks for a Filter start/end pair, or None."""
        base = self.base
        g = base.grid
        bot = base.bot
        spans = []
        for pos, out in positives:
            c2i, c3i = s2[pos], s3[pos]
            if c2i == bot or c3i == bot:
                return None
            c2, c3 = base.cell(c2i), base.cell(c3i)
            span = g.line_range(c2, c3)
            if span is None:
                return None
            span_idx = [base.index(c) for c in span]
            out_set = set(out)
            if not out_set.issubset(span_idx):
                return None
            # output order must follow the range orientation
            ordered = [z for z in span_idx if z in out_set]
            if tuple(ordered) != out:
                return None
            mask = 0
            for z in span_idx:
                mask |= 1 << z
            spans.append(mask)
        return spans

    def _rank_filter(self, deadline, size_budget):
        if not self.enable_filter:
            return None
        base = self.base
        bot = base.bot
        layers = self.layers(deadline)
        positives = self._positive_items()
        negatives = self._negative_positions()
        out_masks = []
        for _, out in positives:
            mask = 0
            for z in out:
                mask |= 1 << z
            out_masks.append(mask)

        states_by_depth = []
        for layer in layers:
            states_by_depth.append(sorted(
                layer.items(), key=lambda kv: (-kv[1].theta, kv[1].text)
            ))

        # endpoint candidates must put every positive component on a line
        # through that example's output cells
        def endpoint_ok(sv):
            for pos, out in positives:
                ci = sv[pos]
                if ci == bot:
                    return False
                c = base.cell(ci)
                o0 = base.cell(out[0])
                on_line = c.row == o0.row or c.col == o0.col
                if len(out) > 1:
                    o1 = base.cell(out[1])
                    if o0.row == o1.row:
                        on_line = c.row == o0.row
                    else:
                        on_line = c.col == o0.col
                if not on_line:
                    return False
            return True

        best = None
        max_d = self.depth
        for dsum in range(0, 3 * max_d + 1):
            _deadline_check(deadline)
            if best is not None:
                break
            if size_budget is not None and 4 + dsum > size_budget:
                break
            for d2 in range(0, min(dsum, max_d) + 1):
                for d3 in range(0, min(dsum - d2, max_d) + 1):
                    d1 = dsum - d2 - d3
                    if d1 > max_d:
                        continue
                    for s2, ch2 in states_by_depth[d2]:
                        if not endpoint_ok(s2):
                            continue
                        for s3, ch3 in states_by_depth[d3]:
                            if not endpoint_ok(s3):
                                continue
                            spans = self._pair_span(s2, s3, positives)
                            if spans is None:
                                continue
                            for s1, ch1 in states_by_depth[d1]:
                                if any(s1[pos] == bot for pos, _ in positives):
                                    continue
                                covered = all(
                                    s1[pos] == bot or s2[pos] == bot or s3[pos] == bot
                                    for pos in negatives
                                )
                                if not covered:
                                    continue
                                clsmask = -1
                                for (pos, out), span_mask, out_mask in zip(
                                    positives, spans, out_masks
                                ):
                                    clsmask &= base.span_classes(
                                        s1[pos], span_mask, out_mask
                                    )
                                    if not clsmask:
                                        break
                                if not clsmask:
                                    continue
                                theta = (ch1.theta + ch2.theta + ch3.theta) / 3
                                size = 4 + dsum
                                key = (size, -theta, ch1.text, ch2.text, ch3.text)
                                if best is None or key < best[0]:
                                    best = (key, clsmask, ch1.prog, ch2.prog, ch3.prog)
        if best is None:
            return None
        key, clsmask, p1, p2, p3 = best
        pred = self._best_class_text(clsmask)
        prog = FilterProg(p1, p2, p3, pred)
        return (key[0], -key[1], print_simple(prog), prog)

    def _best_class_text(self, clsmask: int) -> Predicate:
        # Filter scores ignore the predicate, so the tie-break among eligible
        # classes is the printed text alone.
        best = None
        mask = clsmask
        while mask:
            low = mask & -mask
            cls = low.bit_length() - 1
            mask ^= low
            text = self.base.class_text[cls]
            if best is None or text < best[0]:
                best = (text, cls)
        return self.base.class_pred[best[1]]

    # -- membership -------------------------------------------------------------

    def _run_cellprog(self, prog) -> Optional[tuple]:
        """State vector a cell program rewrites to (memoized per automaton).

        Callers check the depth cap; rewriting itself is total.
        """
        if isinstance(prog, X):
            return self._init_vector()
        cached = self._run_cache.get(prog)
        if cached is not None:
            return cached
        if self._parents is not None:
            left, right = self._parents
            vec = left._run_cellprog(prog) + right._run_cellprog(prog)
        else:
            inner = self._run_cellprog(prog.inner)
            behavior = self.base.behavior_of(prog.pred)
            vec = tuple(
                self.base.getcell_target(c, prog.dir, prog.k, behavior)
                for c in inner
            )
        self._run_cache[prog] = vec
        return vec

    def accepts(self, prog) -> bool:
        """Membership of a simple program, honoring the depth cap."""
        base = self.base
        bot = base.bot
        if isinstance(prog, ListProg):
            comps = prog.cells
            if self.t != len(comps) or not self.enable_list:
                return False
            cap = self.depth
            for cp in comps:
                if cp.depth() > cap:
                    return False
            vectors = [self._run_cellprog(cp) for cp in comps]
            for pos, (_, out) in enumerate(self.examples):
                if out is not None:
                    for j, v in enumerate(vectors):
                        if v[pos] != out[j]:
                            return False
                else:
                    for v in vectors:
                        if v[pos] == bot:
                            break
                    else:
                        return False
            return True
        if isinstance(prog, FilterProg):
            if not self.enable_filter:
                return False
            parts = (prog.bind, prog.start, prog.end)
            if any(cp.depth() > self.depth for cp in parts):
                return False
            v1, v2, v3 = (self._run_cellprog(cp) for cp in parts)
            behavior = base.behavior_of(prog.pred)
            g = base.grid
            for pos, (_, out) in enumerate(self.examples):
                a, b, c = v1[pos], v2[pos], v3[pos]
                if out is None:
                    if a != bot and b != bot and c != bot:
                        return False
                    continue
                if a == bot or b == bot or c == bot:
                    return False
                span = g.line_range(base.cell(b), base.cell(c))
                if span is None:
                    return False
                zmask = base.zmask(behavior, a)
                got = tuple(
                    base.index(z) for z in span if (zmask >> base.index(z)) & 1
                )
                if got != out:
                    return False
            return True
        raise TypeError(f"accepts expects a simple program, got {prog!r}")

    # -- transition queries and debug dump ---------------------------------------

    def _single(self) -> tuple:
        if len(self.examples) != 1:
            raise ValueError("transition queries expect a single-example automaton")
        return self.examples[0]

    def has_init(self, c: CellRef) -> bool:
        inp, _ = self._single()
        return self.base.index(c) == inp

    def has_getcell(self, dir: str, k: int, pred: Predicate,
                    src: Optional[CellRef], dst: Optional[CellRef]) -> bool:
        """Base transition query; src/dst None stands for the bottom state."""
        base = self.base
        s = base.bot if src is None else base.index(src)
        d = base.bot if dst is None else base.index(dst)
        return base.getcell_target(s, dir, k, base.behavior_of(pred)) == d

    def has_list_final(self, args) -> bool:
        """args: tuple of CellRef or None (bottom) per List slot."""
        _, out = self._single()
        base = self.base
        if self.t < 1 or len(args) != self.t:
            return False
        states = [base.bot if a is None else base.index(a) for a in args]
        if out is not None:
            return all(s == o for s, o in zip(states, out))
        return any(s == base.bot for s in states)

    def has_filter_final(self, pred: Predicate, args) -> bool:
        _, out = self._single()
        base = self.base
        g = base.grid
        states = [base.bot if a is None else base.index(a) for a in args]
        if out is None:
            return any(s == base.bot for s in states)
        if any(s == base.bot for s in states):
            return False
        a, b, c = states
        span = g.line_range(base.cell(b), base.cell(c))
        if span is None:
            return False
        zmask = base.zmask(base.behavior_of(pred), a)
        got = tuple(base.index(z) for z in span if (zmask >> base.index(z)) & 1)
        return got == out

    def dump(self, max_lines: int = 200_000) -> str:
        """Line-oriented transition dump in canonical order (small automata only)."""
        base = self.base
        preds = base.universe.predicates
        estimated = base.m * 24 * len(preds)
        if estimated > max_lines:
            raise ValueError(f"dump would emit ~{estimated} lines; shrink the universe")
        inp, out = self._single()

        def state(idx: int) -> str:
            return "q_bot" if idx == base.bot else f"q{base.cell(idx)}"

        lines = [f"x -> {state(inp)}"]
        for dir in DIRECTIONS:
            for k in GETCELL_KS:
                for pred in preds:
                    behavior = base.behavior_of(pred)
                    for src in range(base.m):
                        dst = base.getcell_target(src, dir, k, behavior)
                        lines.append(
                            f"GetCell({dir}, {k}, {pred.lambda_text()})"
                            f"({state(src)}) -> {state(dst)}"
                        )
        lines.append("# every symbol applied to q_bot yields q_bot")
        if out is not None:
            if self.t >= 1:
                args = ", ".join(state(o) for o in out)
                lines.append(f"List({args}) -> q*")
            for pred in preds:
                behavior = base.behavior_of(pred)
                for c1 in range(base.m):
                    zmask = base.zmask(behavior, c1)
                    for c2 in range(base.m):
                        for c3 in range(base.m):
                            span = base.grid.line_range(base.cell(c2), base.cell(c3))
                            if span is None:
                                continue
                            got = tuple(
                                base.index(z) for z in span
                                if (zmask >> base.index(z)) & 1
                            )
                            if got == out:
                                lines.append(
                                    f"Filter({pred.lambda_text()})"
                                    f"({state(c1)}, {state(c2)}, {state(c3)}) -> q*"
                                )
        else:
            if self.t >= 1:
                lines.append("List(<some arg is q_bot, none is q*>) -> q*")
            lines.append("Filter(<any pred>)(<some arg is q_bot, none is q*>) -> q*")
        head, rest = lines[0], sorted(lines[1:])
        return "\n".join([head] + rest) + "\n"


def build_fta(base: BaseFta, i: CellRef, output, t: int,
              depth: int = DEFAULT_DEPTH,
              enable_list: bool = True, enable_filter: bool = True) -> Fta:
    """Automaton for one example: `output` is a CellRef list or None (bottom)."""
    if not base.grid.in_range(i):
        raise ValueError(f"input cell {i} is out of range")
    if output is None:
        out = None
    else:
        out = tuple(base.index(c) for c in output)
        if t >= 1 and len(out) != t:
            raise ArityMismatch(f"output length {len(out)} != arity {t}")
    return Fta(base, t, ((base.index(i), out),),
               depth=depth, enable_list=enable_list, enable_filter=enable_filter)


def intersect(a: Fta, b: Fta) -> Fta:
    """Product automaton; its language is the intersection of the inputs."""
    if a.base is not b.base:
        raise ValueError("intersection requires automata over the same base")
    if a.t != b.t:
        raise ValueError("intersection requires the same output arity")
    if (a.depth, a.enable_list, a.enable_filter) != (
        b.depth, b.enable_list, b.enable_filter
    ):
        raise ValueError("intersection requires identical extraction config")
    return Fta(a.base, a.t, a.examples + b.examples,
               depth=a.depth, enable_list=a.enable_list,
               enable_filter=a.enable_filter, parents=(a, b))
