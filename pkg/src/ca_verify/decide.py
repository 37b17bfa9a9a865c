"""Ground-truth deciders for global injectivity and surjectivity.

Everything here works on the full rule table, with no algebraic
assumptions; the criteria module audits its closed-form predictions
against these verdicts. Negative verdicts come with finite witnesses
that re-validate against the rule:

  * UnbalancedWord  - a finite word whose preimage count under the
                      finite-word extension map differs from m^d;
  * Diamond         - two distinct equal-length words sharing their
                      first d and last d letters with equal images;
  * PeriodicPair    - two distinct spatially periodic configurations
                      with equal image configurations.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from ca_verify.caps import CapExceeded, Caps, DEFAULT_CAPS
from ca_verify.rule import CyclicWord, RuleTable, SeparationClass, is_permutive_at
from ca_verify.zmod import monomial_invert


@dataclass(frozen=True)
class UnbalancedWord:
    word: tuple[int, ...]
    count: int
    expected: int

    def validate(self, rule: RuleTable) -> bool:
        return (
            self.expected == rule.m**rule.d
            and self.count != self.expected
            and count_preimages(rule, self.word) == self.count
        )


@dataclass(frozen=True)
class Diamond:
    u: tuple[int, ...]
    v: tuple[int, ...]

    def validate(self, rule: RuleTable) -> bool:
        d = rule.d
        n = len(self.u)
        return (
            self.u != self.v
            and n == len(self.v)
            and n > d
            and self.u[:d] == self.v[:d]
            and self.u[n - d :] == self.v[n - d :]
            and rule.f_star(self.u) == rule.f_star(self.v)
        )


@dataclass(frozen=True)
class PeriodicPair:
    x: CyclicWord
    y: CyclicWord

    def validate(self, rule: RuleTable) -> bool:
        return not self.x.config_equal(self.y) and rule.apply_periodic(
            self.x
        ).config_equal(rule.apply_periodic(self.y))


@dataclass(frozen=True)
class SurjectivityResult:
    surjective: bool
    witness: UnbalancedWord | None


@dataclass(frozen=True)
class InjectivityResult:
    injective: bool
    witness: Diamond | PeriodicPair | None


def count_preimages(rule: RuleTable, word: Sequence[int]) -> int:
    """Number of words of length len(word) + d mapping onto `word` under
    the finite-word extension map. Surjective rules give exactly m^d for
    every word (balance); any other count certifies non-surjectivity.
    """
    if len(word) < 1:
        raise ValueError("preimage counting needs a non-empty word")
    m, d, table = rule.m, rule.d, rule.table
    n = m**d
    counts = [1] * n
    for letter in word:
        if not 0 <= letter < m:
            raise ValueError(f"letter {letter} out of range for Z_{m}")
        nxt = [0] * n
        for v in range(n):
            c = counts[v]
            if not c:
                continue
            base = v * m
            for a in range(m):
                if table[base + a] == letter:
                    nxt[(base + a) % n] += c
        counts = nxt
    return sum(counts)


def _successor_masks(rule: RuleTable) -> list[list[int]]:
    """mask[v][letter] = bitmask of de Bruijn successors of v under edges
    emitting `letter`. Vertex v encodes a length-d word, most significant
    letter first, so the window index of (v, a) is simply v*m + a.
    """
    m, d, table = rule.m, rule.d, rule.table
    n = m**d
    masks = [[0] * m for _ in range(n)]
    for v in range(n):
        base = v * m
        for a in range(m):
            w = base + a
            masks[v][table[w]] |= 1 << (w % n)
    return masks


def decide_surjective(rule: RuleTable, caps: Caps = DEFAULT_CAPS) -> SurjectivityResult:
    """Exact surjectivity via the subset construction on the de Bruijn
    graph, starting from the full vertex set: the empty subset is
    reachable iff some finite word has no preimage iff the rule is not
    surjective. Negative verdicts carry the shortest unbalanced word.
    """
    masks = _successor_masks(rule)
    n = rule.m**rule.d
    full = (1 << n) - 1
    seen = {full}
    frontier = deque([full])
    surjective = True
    while frontier:
        subset = frontier.popleft()
        for letter in range(rule.m):
            nxt = 0
            rest = subset
            while rest:
                low = rest & -rest
                nxt |= masks[low.bit_length() - 1][letter]
                rest ^= low
            if nxt == 0:
                surjective = False
                frontier.clear()
                break
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > caps.subset_states:
                    raise CapExceeded(
                        f"subset construction exceeded {caps.subset_states} states"
                    )
                frontier.append(nxt)
    if surjective:
        return SurjectivityResult(True, None)
    witness = shortest_unbalanced_word(rule, caps)
    if witness is None:
        raise AssertionError("unreachable: non-surjective rules are unbalanced")
    return SurjectivityResult(False, witness)


def shortest_unbalanced_word(
    rule: RuleTable, caps: Caps = DEFAULT_CAPS
) -> UnbalancedWord | None:
    """Breadth-first search over preimage-count vectors for the shortest
    word whose preimage count differs from m^d; ties break to the
    lexicographically smallest word. None when every reachable count is
    balanced (i.e. the rule is surjective).
    """
    m, d, table = rule.m, rule.d, rule.table
    n = m**d
    expected = n
    start = (1,) * n
    seen = {start}
    frontier: deque[tuple[tuple[int, ...], tuple[int, ...]]] = deque([(start, ())])
    while frontier:
        counts, word = frontier.popleft()
        for letter in range(m):
            nxt = [0] * n
            for v in range(n):
                c = counts[v]
                if not c:
                    continue
                base = v * m
                for a in range(m):
                    if table[base + a] == letter:
                        nxt[(base + a) % n] += c
            if sum(nxt) != expected:
                return UnbalancedWord(word + (letter,), sum(nxt), expected)
            key = tuple(nxt)
            if key not in seen:
                seen.add(key)
                if len(seen) > caps.subset_states:
                    raise CapExceeded(
                        f"balance search exceeded {caps.subset_states} states"
                    )
                frontier.append((key, word + (letter,)))
    return None


def _pair_graph(rule: RuleTable, caps: Caps):
    """Successor lists of the pair graph: vertices are ordered pairs of
    de Bruijn vertices, edges are letter pairs producing equal outputs.
    """
    m, d, table = rule.m, rule.d, rule.table
    n = m**d
    total = n * n
    if total > caps.pair_vertices:
        raise CapExceeded(f"pair graph needs {total} vertices, cap is {caps.pair_vertices}")
    succ: list[list[int]] = [[] for _ in range(total)]
    edges: list[list[tuple[int, int, int]]] = [[] for _ in range(total)]
    for u in range(n):
        ubase = u * m
        for v in range(n):
            vbase = v * m
            pid = u * n + v
            for a in range(m):
                label = table[ubase + a]
                unext = (ubase + a) % n
                for b in range(m):
                    if table[vbase + b] == label:
                        head = unext * n + (vbase + b) % n
                        succ[pid].append(head)
                        edges[pid].append((a, b, head))
    return succ, edges


def _survivors_backward(succ: list[list[int]]) -> list[bool]:
    """Vertices with an infinite backward path: iteratively delete
    vertices that no surviving edge enters.
    """
    total = len(succ)
    indeg = [0] * total
    for tail in range(total):
        for head in succ[tail]:
            indeg[head] += 1
    alive = [True] * total
    queue = deque(v for v in range(total) if indeg[v] == 0)
    while queue:
        v = queue.popleft()
        if not alive[v]:
            continue
        alive[v] = False
        for head in succ[v]:
            indeg[head] -= 1
            if indeg[head] == 0 and alive[head]:
                queue.append(head)
    return alive


def _survivors_forward(succ: list[list[int]]) -> list[bool]:
    """Vertices with an infinite forward path: iteratively delete
    vertices all of whose surviving edges are gone.
    """
    total = len(succ)
    pred: list[list[int]] = [[] for _ in range(total)]
    outdeg = [0] * total
    for tail in range(total):
        outdeg[tail] = len(succ[tail])
        for head in succ[tail]:
            pred[head].append(tail)
    alive = [True] * total
    queue = deque(v for v in range(total) if outdeg[v] == 0)
    while queue:
        v = queue.popleft()
        if not alive[v]:
            continue
        alive[v] = False
        for tail in pred[v]:
            outdeg[tail] -= 1
            if outdeg[tail] == 0 and alive[tail]:
                queue.append(tail)
    return alive


def _vertex_word(v: int, m: int, d: int) -> tuple[int, ...]:
    digits = []
    for _ in range(d):
        v, rem = divmod(v, m)
        digits.append(rem)
    return tuple(reversed(digits))


def _shortest_diamond(rule: RuleTable, edges, n: int) -> Diamond | None:
    """Multi-source BFS over (pair vertex, saw-unequal-letters flag) from
    the diagonal back to the diagonal. First hit is the shortest diamond;
    sorted expansion makes it lexicographically least on (shared prefix,
    letter pairs) among those.
    """
    starts = [u * n + u for u in range(n)]
    parents: dict[tuple[int, int], tuple[tuple[int, int], int, int] | None] = {}
    frontier: deque[tuple[int, int]] = deque()
    for pid in starts:
        state = (pid, 0)
        parents[state] = None
        frontier.append(state)
    target: tuple[int, int] | None = None
    while frontier and target is None:
        pid, flag = frontier.popleft()
        for a, b, head in edges[pid]:
            nflag = flag | (a != b)
            state = (head, nflag)
            if state in parents:
                continue
            parents[state] = ((pid, flag), a, b)
            if nflag and head % n == head // n:
                target = state
                break
            frontier.append(state)
    if target is None:
        return None
    letters: list[tuple[int, int]] = []
    state = target
    while parents[state] is not None:
        prev, a, b = parents[state]  # type: ignore[misc]
        letters.append((a, b))
        state = prev
    letters.reverse()
    prefix = _vertex_word(state[0] // n, rule.m, rule.d)
    u = prefix + tuple(a for a, _ in letters)
    v = prefix + tuple(b for _, b in letters)
    return Diamond(u, v)


def _strongly_connected_components(succ: list[list[int]]) -> list[int]:
    """Kosaraju's algorithm, iterative. Returns the component id of every
    vertex; ids are assigned deterministically from the vertex order.
    """
    total = len(succ)
    order: list[int] = []
    seen = [False] * total
    for root in range(total):
        if seen[root]:
            continue
        stack: list[tuple[int, int]] = [(root, 0)]
        seen[root] = True
        while stack:
            v, i = stack.pop()
            if i < len(succ[v]):
                stack.append((v, i + 1))
                head = succ[v][i]
                if not seen[head]:
                    seen[head] = True
                    stack.append((head, 0))
            else:
                order.append(v)
    pred: list[list[int]] = [[] for _ in range(total)]
    for tail in range(total):
        for head in succ[tail]:
            pred[head].append(tail)
    component = [-1] * total
    current = 0
    for v in reversed(order):
        if component[v] != -1:
            continue
        component[v] = current
        stack2 = [v]
        while stack2:
            w = stack2.pop()
            for tail in pred[w]:
                if component[tail] == -1:
                    component[tail] = current
                    stack2.append(tail)
        current += 1
    return component


def _offdiagonal_cycle_pair(rule: RuleTable, succ, edges, n: int) -> PeriodicPair | None:
    """A pair-graph cycle through an off-diagonal vertex. Such a cycle
    necessarily passes an unequal letter pair, so its two letter tracks
    are distinct periodic configurations with equal images. The start is
    the smallest off-diagonal vertex lying on any cycle and the cycle is
    the breadth-first shortest through it, so the result is deterministic.
    """
    component = _strongly_connected_components(succ)
    comp_size: dict[int, int] = {}
    for cid in component:
        comp_size[cid] = comp_size.get(cid, 0) + 1
    start = None
    for v0 in range(n * n):
        if v0 % n == v0 // n:
            continue
        if comp_size[component[v0]] > 1 or v0 in succ[v0]:
            start = v0
            break
    if start is None:
        return None
    cid = component[start]
    parents: dict[int, tuple[int, int, int] | None] = {start: None}
    frontier = deque([start])
    letters: list[tuple[int, int]] | None = None
    while frontier and letters is None:
        pid = frontier.popleft()
        for a, b, head in edges[pid]:
            if head == start:
                chain = [(a, b)]
                state = pid
                while parents[state] is not None:
                    prev, pa, pb = parents[state]  # type: ignore[misc]
                    chain.append((pa, pb))
                    state = prev
                chain.reverse()
                letters = chain
                break
            if component[head] == cid and head not in parents:
                parents[head] = (pid, a, b)
                frontier.append(head)
    if letters is None:
        raise AssertionError("unreachable: SCC vertices lie on cycles")
    x = CyclicWord(rule.m, tuple(a for a, _ in letters))
    y = CyclicWord(rule.m, tuple(b for _, b in letters))
    return PeriodicPair(x, y)


def decide_injective(rule: RuleTable, caps: Caps = DEFAULT_CAPS) -> InjectivityResult:
    """Exact injectivity via the pair graph.

    The rule is non-injective iff some unequal-letter edge runs from a
    vertex with an infinite backward path to one with an infinite forward
    path (two tracks of one bi-infinite labelled path then disagree at
    that step while their images agree everywhere). Negative verdicts
    prefer a Diamond witness and fall back to a PeriodicPair when no
    diamond exists.
    """
    n = rule.m**rule.d
    succ, edges = _pair_graph(rule, caps)
    backward = _survivors_backward(succ)
    forward = _survivors_forward(succ)
    witnessed = False
    for pid in range(n * n):
        if not backward[pid]:
            continue
        for a, b, head in edges[pid]:
            if a != b and forward[head]:
                witnessed = True
                break
        if witnessed:
            break
    if not witnessed:
        return InjectivityResult(True, None)
    witness: Diamond | PeriodicPair | None = _shortest_diamond(rule, edges, n)
    if witness is None:
        witness = _offdiagonal_cycle_pair(rule, succ, edges, n)
    if witness is None:
        raise AssertionError("unreachable: non-injective rules have a witness")
    return InjectivityResult(False, witness)


@dataclass(frozen=True)
class BipermutiveCollision:
    """Two distinct words with the same constant image under the
    finite-word extension map.
    """

    u: tuple[int, ...]
    v: tuple[int, ...]
    image_letter: int

    def validate(self, rule: RuleTable) -> bool:
        image = (self.image_letter,) * (len(self.u) - rule.d)
        return (
            self.u != self.v
            and len(self.u) == len(self.v)
            and rule.f_star(self.u) == image
            and rule.f_star(self.v) == image
        )


def bipermutive_collision(
    rule: RuleTable, cls: SeparationClass, window: int
) -> BipermutiveCollision:
    """Constructive non-injectivity for rules separated and permutive at
    both end positions ell < r: solve the end monomials outward from two
    different central seeds so that every sliding window evaluates to the
    same letter. Returns two words of length 2*window + 1 whose images
    are that constant; requires window >= r - ell + d.
    """
    if not cls.lr_separated or cls.ell is None or cls.r is None or cls.ell >= cls.r:
        raise ValueError("rule is not separated at two distinct end positions")
    ell, r = cls.ell, cls.r
    if not (is_permutive_at(rule, ell) and is_permutive_at(rule, r)):
        raise ValueError("rule is not permutive at both end positions")
    span = r - ell
    if window < span + rule.d:
        raise ValueError(
            f"window {window} too small, need at least {span + rule.d}"
        )
    m = rule.m
    comp_l = cls.component_at(ell)
    comp_r = cls.component_at(r)
    assert comp_l is not None and comp_r is not None
    b_ell = monomial_invert(comp_l.a, comp_l.q, 1 % m, m)[0]
    c_r = monomial_invert(comp_r.a, comp_r.q, (m - 1) % m, m)[0]
    target = rule.table[0]

    length = 2 * window + 1
    seed_at = (2 * window - span) // 2

    def extend(seed: list[int | None]) -> tuple[int, ...]:
        cells = list(seed)

        def window_value(start: int, unknown_offset: int, x: int) -> int:
            win = []
            for k in range(rule.nvars):
                idx = start + k
                if k == unknown_offset:
                    win.append(x)
                elif 0 <= idx < length and cells[idx] is not None:
                    win.append(cells[idx])  # type: ignore[arg-type]
                else:
                    win.append(0)
            return rule.evaluate(win)

        for c in range(seed_at + span + 1, length):
            start = c - (r - 1)
            cells[c] = next(
                x for x in range(m) if window_value(start, r - 1, x) == target
            )
        for c in range(seed_at - 1, -1, -1):
            start = c - (ell - 1)
            cells[c] = next(
                x for x in range(m) if window_value(start, ell - 1, x) == target
            )
        assert all(v is not None for v in cells)
        return tuple(cells)  # type: ignore[arg-type]

    seed_u: list[int | None] = [None] * length
    seed_v: list[int | None] = [None] * length
    for offset in range(span + 1):
        seed_u[seed_at + offset] = 0
        seed_v[seed_at + offset] = 0
    seed_u[seed_at] = b_ell
    seed_u[seed_at + span] = c_r

    u = extend(seed_u)
    v = extend(seed_v)
    collision = BipermutiveCollision(u, v, target)
    if not collision.validate(rule):
        raise AssertionError("unreachable: outward solving produced a bad collision")
    return collision
