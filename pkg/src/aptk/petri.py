"""Place/transition nets: data model, firing rule, state space construction,
and the behavioural and structural predicates defined on them.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from .common import (
    AptError,
    Check,
    StateLimitExceededError,
    UnboundedNetError,
)
from .lts import Lts, is_persistent as lts_is_persistent, is_reversible as lts_is_reversible

DEFAULT_STATE_LIMIT = 1_000_000


class _Omega:
    """The unbounded token count; bigger than every integer, absorbing."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OMEGA"


OMEGA = _Omega()

Count = Union[int, _Omega]


def _ge(a: Count, b: Count) -> bool:
    if a is OMEGA:
        return True
    if b is OMEGA:
        return False
    return a >= b


def _add(a: Count, n: int) -> Count:
    return OMEGA if a is OMEGA else a + n


def _sub(a: Count, n: int) -> Count:
    return OMEGA if a is OMEGA else a - n


class Marking:
    """Token counts per place, in the net's place order.

    Counts may be OMEGA in coverability contexts.  Instances are immutable
    and hashable.
    """

    __slots__ = ("places", "counts")

    def __init__(self, places: Tuple[str, ...], counts: Tuple[Count, ...]):
        self.places = places
        self.counts = tuple(counts)

    def get(self, place: str) -> Count:
        return self.counts[self.places.index(place)]

    __getitem__ = get

    def items(self):
        return zip(self.places, self.counts)

    def has_omega(self) -> bool:
        return any(c is OMEGA for c in self.counts)

    def covers(self, other: "Marking") -> bool:
        return all(_ge(a, b) for a, b in zip(self.counts, other.counts))

    def __le__(self, other: "Marking") -> bool:
        return other.covers(self)

    def __add__(self, other: "Marking") -> "Marking":
        if self.places != other.places:
            raise AptError("markings over different nets")
        return Marking(
            self.places,
            tuple(
                OMEGA if (a is OMEGA or b is OMEGA) else a + b
                for a, b in zip(self.counts, other.counts)
            ),
        )

    def scaled(self, k: int) -> "Marking":
        return Marking(
            self.places, tuple(OMEGA if c is OMEGA else k * c for c in self.counts)
        )

    def __rmul__(self, k: int) -> "Marking":
        return self.scaled(k)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Marking)
            and self.places == other.places
            and self.counts == other.counts
        )

    def __hash__(self) -> int:
        return hash(self.counts)

    def __repr__(self) -> str:
        inner = " ".join(f"[{p}:{c}]" for p, c in self.items())
        return f"[ {inner} ]"


class PetriNet:
    """Arc-weighted place/transition net with initial marking and labelling.

    All structural changes go through the net object itself; per-node
    pre/post-set views are cached and the caches are invalidated explicitly
    on every mutation.  Analyses never mutate a net, so a net that is no
    longer being built can be shared freely.
    """

    def __init__(self, name: str = "", description: str = ""):
        self.name = name
        self.description = description
        self._places: Dict[str, int] = {}
        self._transitions: Dict[str, str] = {}
        self._locations: Dict[str, str] = {}
        self._flow: Dict[Tuple[str, str], int] = {}
        self._version = 0
        self._cache_version = -1
        self._preset_cache: Dict[str, Dict[str, int]] = {}
        self._postset_cache: Dict[str, Dict[str, int]] = {}

    # -- construction -----------------------------------------------------

    def add_place(self, name: str, tokens: int = 0) -> None:
        if name in self._places:
            raise AptError(f"duplicate place {name!r}")
        if name in self._transitions:
            raise AptError(f"{name!r} is already a transition; P and T must be disjoint")
        if tokens < 0:
            raise AptError("token counts are nonnegative")
        self._places[name] = tokens
        self._version += 1

    def add_transition(
        self, name: str, label: Optional[str] = None, location: Optional[str] = None
    ) -> None:
        if name in self._transitions:
            raise AptError(f"duplicate transition {name!r}")
        if name in self._places:
            raise AptError(f"{name!r} is already a place; P and T must be disjoint")
        self._transitions[name] = label if label is not None else name
        if location is not None:
            self._locations[name] = location
        self._version += 1

    def add_flow(self, source: str, target: str, weight: int = 1) -> None:
        """Add weight to the flow from source to target; one end must be a
        place and the other a transition.  Repeated calls accumulate."""
        if weight <= 0:
            raise AptError("flow weights are positive")
        src_place = source in self._places
        tgt_place = target in self._places
        if src_place == tgt_place:
            raise AptError(f"flow {source!r} -> {target!r} must connect a place and a transition")
        if not src_place and source not in self._transitions:
            raise AptError(f"unknown node {source!r}")
        if not tgt_place and target not in self._transitions:
            raise AptError(f"unknown node {target!r}")
        key = (source, target)
        self._flow[key] = self._flow.get(key, 0) + weight
        self._version += 1

    def set_tokens(self, place: str, tokens: int) -> None:
        if place not in self._places:
            raise AptError(f"unknown place {place!r}")
        if tokens < 0:
            raise AptError("token counts are nonnegative")
        self._places[place] = tokens
        self._version += 1

    def set_label(self, transition: str, label: str) -> None:
        if transition not in self._transitions:
            raise AptError(f"unknown transition {transition!r}")
        self._transitions[transition] = label
        self._version += 1

    def set_location(self, transition: str, location: str) -> None:
        if transition not in self._transitions:
            raise AptError(f"unknown transition {transition!r}")
        self._locations[transition] = location
        self._version += 1

    # -- read access ------------------------------------------------------

    @property
    def places(self) -> Tuple[str, ...]:
        return tuple(self._places)

    @property
    def transitions(self) -> Tuple[str, ...]:
        return tuple(self._transitions)

    def label(self, transition: str) -> str:
        return self._transitions[transition]

    @property
    def labels(self) -> Tuple[str, ...]:
        """Alphabet: distinct labels in transition declaration order."""
        return tuple(dict.fromkeys(self._transitions.values()))

    @property
    def locations(self) -> Dict[str, str]:
        return dict(self._locations)

    def flow(self, source: str, target: str) -> int:
        return self._flow.get((source, target), 0)

    @property
    def flows(self) -> Dict[Tuple[str, str], int]:
        return dict(self._flow)

    def initial_marking(self) -> Marking:
        return Marking(self.places, tuple(self._places.values()))

    def marking(self, tokens: Dict[str, int]) -> Marking:
        unknown = [p for p in tokens if p not in self._places]
        if unknown:
            raise AptError(f"unknown place {unknown[0]!r}")
        return Marking(self.places, tuple(tokens.get(p, 0) for p in self._places))

    def _refresh_caches(self) -> None:
        if self._cache_version == self._version:
            return
        pre: Dict[str, Dict[str, int]] = {n: {} for n in (*self._places, *self._transitions)}
        post: Dict[str, Dict[str, int]] = {n: {} for n in (*self._places, *self._transitions)}
        for (src, tgt), w in self._flow.items():
            post[src][tgt] = w
            pre[tgt][src] = w
        self._preset_cache = pre
        self._postset_cache = post
        self._cache_version = self._version

    def preset(self, node: str) -> Dict[str, int]:
        """Nodes with flow into `node`, mapped to the arc weight."""
        self._refresh_caches()
        return dict(self._preset_cache[node])

    def postset(self, node: str) -> Dict[str, int]:
        self._refresh_caches()
        return dict(self._postset_cache[node])

    def __repr__(self) -> str:
        return (
            f"PetriNet({len(self._places)} places, {len(self._transitions)} transitions, "
            f"{len(self._flow)} flows)"
        )


# ---------------------------------------------------------------------------
# Firing rule.
# ---------------------------------------------------------------------------


def enabled(net: PetriNet, marking: Marking, transition: str) -> bool:
    if transition not in net.transitions:
        raise AptError(f"unknown transition {transition!r}")
    pre = net.preset(transition)
    return all(_ge(marking.get(p), w) for p, w in pre.items())


def fire(net: PetriNet, marking: Marking, transition: str) -> Marking:
    """Successor marking; firing a disabled transition names a deficient place."""
    if transition not in net.transitions:
        raise AptError(f"unknown transition {transition!r}")
    pre = net.preset(transition)
    for p, w in pre.items():
        if not _ge(marking.get(p), w):
            raise AptError(
                f"{transition} is not enabled: place {p} holds {marking.get(p)} < {w}"
            )
    post = net.postset(transition)
    counts = list(marking.counts)
    index = {p: i for i, p in enumerate(marking.places)}
    for p, w in pre.items():
        counts[index[p]] = _sub(counts[index[p]], w)
    for p, w in post.items():
        counts[index[p]] = _add(counts[index[p]], w)
    return Marking(marking.places, tuple(counts))


def fire_sequence(net: PetriNet, marking: Marking, sequence: Sequence[str]) -> Marking:
    for t in sequence:
        marking = fire(net, marking, t)
    return marking


# ---------------------------------------------------------------------------
# Reachability and coverability graphs.
# ---------------------------------------------------------------------------


@dataclass
class StateGraph:
    """An Lts over discovered markings plus the bookkeeping of discovery."""

    lts: Lts
    markings: Dict[str, Marking]
    parent: Dict[str, Tuple[str, str]] = field(default_factory=dict)
    fired_transitions: Set[str] = field(default_factory=set)

    def path_to(self, state: str) -> List[str]:
        """Transition sequence from the initial state to `state` along BFS parents."""
        path: List[str] = []
        cursor = state
        while cursor in self.parent:
            cursor, t = self.parent[cursor]
            path.append(t)
        path.reverse()
        return path


def reachability_graph(net: PetriNet, state_limit: int = DEFAULT_STATE_LIMIT) -> StateGraph:
    """BFS over concrete markings; states are named s0, s1, ... in discovery
    order and arcs carry the transition's label.

    Raises StateLimitExceededError past `state_limit` states, which suggests
    an unbounded net; the coverability graph always terminates.
    """
    lts = Lts(name="", description="")
    for lab in net.labels:
        lts.add_label(lab)
    initial = net.initial_marking()
    names: Dict[Marking, str] = {initial: "s0"}
    lts.add_state("s0", initial=True)
    markings = {"s0": initial}
    graph = StateGraph(lts, markings)
    queue = deque(["s0"])
    arcs: List[Tuple[str, str, str]] = []
    while queue:
        state = queue.popleft()
        marking = markings[state]
        for t in net.transitions:
            if not enabled(net, marking, t):
                continue
            nxt = fire(net, marking, t)
            name = names.get(nxt)
            if name is None:
                if len(names) >= state_limit:
                    raise StateLimitExceededError(
                        f"more than {state_limit} states; the net is possibly unbounded, "
                        "try the coverability graph"
                    )
                name = f"s{len(names)}"
                names[nxt] = name
                lts.add_state(name)
                markings[name] = nxt
                graph.parent[name] = (state, t)
                queue.append(name)
            graph.fired_transitions.add(t)
            arcs.append((state, net.label(t), name))
    for arc in arcs:
        lts.add_arc(*arc)
    return graph


def coverability_graph(net: PetriNet) -> StateGraph:
    """Karp-Miller style graph: when a new marking strictly covers one of its
    ancestors on the tree path, the strictly increased places jump to OMEGA.
    Identical omega-markings are merged globally.  For a bounded net no
    acceleration ever fires and the result is the reachability graph.
    """
    lts = Lts(name="", description="")
    for lab in net.labels:
        lts.add_label(lab)
    initial = net.initial_marking()
    names: Dict[Marking, str] = {initial: "s0"}
    lts.add_state("s0", initial=True)
    markings = {"s0": initial}
    tree_parent: Dict[str, Optional[str]] = {"s0": None}
    graph = StateGraph(lts, markings)
    queue = deque(["s0"])
    arcs: List[Tuple[str, str, str]] = []
    while queue:
        state = queue.popleft()
        marking = markings[state]
        for t in net.transitions:
            if not enabled(net, marking, t):
                continue
            nxt = fire(net, marking, t)
            # accelerate against the ancestor chain until stable
            changed = True
            while changed:
                changed = False
                cursor: Optional[str] = state
                while cursor is not None:
                    anc = markings[cursor]
                    if nxt.covers(anc) and nxt != anc:
                        counts = list(nxt.counts)
                        for i, (a, b) in enumerate(zip(nxt.counts, anc.counts)):
                            if a is not OMEGA and (b is OMEGA or a > b):
                                counts[i] = OMEGA
                                changed = True
                        nxt = Marking(nxt.places, tuple(counts))
                    cursor = tree_parent[cursor]
            name = names.get(nxt)
            if name is None:
                name = f"s{len(names)}"
                names[nxt] = name
                lts.add_state(name)
                markings[name] = nxt
                tree_parent[name] = state
                graph.parent[name] = (state, t)
                queue.append(name)
            graph.fired_transitions.add(t)
            arcs.append((state, net.label(t), name))
    for arc in arcs:
        lts.add_arc(*arc)
    return graph


# ---------------------------------------------------------------------------
# Boundedness and liveness.
# ---------------------------------------------------------------------------


def bounded(net: PetriNet, k: Optional[int] = None) -> Check:
    """Without k: bounded iff the coverability graph is omega-free.  With k:
    every reachable marking keeps every place at or below k.

    A negative answer carries (place, firing sequence); the sequence is
    shortest in BFS order and its final marking shows the excess.
    """
    cover = coverability_graph(net)
    omega_state = next(
        (s for s in cover.lts.states if cover.markings[s].has_omega()), None
    )
    if k is None:
        if omega_state is None:
            return Check(True)
        marking = cover.markings[omega_state]
        place = next(p for p, c in marking.items() if c is OMEGA)
        return Check(
            False,
            (place, cover.path_to(omega_state)),
            f"place {place} is unbounded",
        )
    if k < 0:
        raise AptError("k must be nonnegative")
    if omega_state is None:
        graph = reachability_graph(net)
    else:
        graph = None  # unbounded: search concrete markings breadth-first
    if graph is not None:
        for state in graph.lts.states:  # discovery order
            marking = graph.markings[state]
            for place, count in marking.items():
                if count > k:
                    return Check(
                        False,
                        (place, graph.path_to(state)),
                        f"place {place} reaches {count} > {k} tokens",
                    )
        return Check(True)
    # Unbounded net: some reachable marking must exceed k; plain BFS finds a
    # shortest witness without needing the full (infinite) state space.
    initial = net.initial_marking()
    seen = {initial}
    parent: Dict[Marking, Tuple[Marking, str]] = {}
    queue = deque([initial])
    while queue:
        marking = queue.popleft()
        for place, count in marking.items():
            if count > k:
                path: List[str] = []
                cursor = marking
                while cursor in parent:
                    cursor, t = parent[cursor]
                    path.append(t)
                path.reverse()
                return Check(
                    False, (place, path), f"place {place} reaches {count} > {k} tokens"
                )
        for t in net.transitions:
            if enabled(net, marking, t):
                nxt = fire(net, marking, t)
                if nxt not in seen:
                    seen.add(nxt)
                    parent[nxt] = (marking, t)
                    queue.append(nxt)
    raise AptError("unreachable: an unbounded net always exceeds k somewhere")


def weakly_live(net: PetriNet) -> Check:
    """No unfireable transitions.  A transition counts as fireable iff it
    labels an arc of the coverability graph, which is sound: every
    coverability arc is realised by a concrete firing sequence.
    """
    cover = coverability_graph(net)
    for t in net.transitions:
        if t not in cover.fired_transitions:
            return Check(False, t, f"transition {t} can never fire")
    return Check(True)


def persistent(net: PetriNet) -> Check:
    """Persistence of the reachability graph; requires a bounded net."""
    if not bounded(net):
        raise UnboundedNetError("persistence check requires a bounded net")
    return lts_is_persistent(reachability_graph(net).lts)


def reversible(net: PetriNet) -> Check:
    """Reversibility of the reachability graph; requires a bounded net."""
    if not bounded(net):
        raise UnboundedNetError("reversibility check requires a bounded net")
    return lts_is_reversible(reachability_graph(net).lts)


# ---------------------------------------------------------------------------
# Structural predicates.
# ---------------------------------------------------------------------------


def is_plain(net: PetriNet) -> Check:
    for (src, tgt), w in net.flows.items():
        if w > 1:
            return Check(False, (src, tgt), f"flow {src} -> {tgt} has weight {w}")
    return Check(True)


def side_conditions(net: PetriNet) -> List[Tuple[str, str]]:
    """All (place, transition) pairs connected in both directions."""
    out = []
    for p in net.places:
        for t in net.transitions:
            if net.flow(p, t) > 0 and net.flow(t, p) > 0:
                out.append((p, t))
    return out


def non_plain_side_conditions(net: PetriNet) -> List[Tuple[str, str]]:
    """Side conditions where at least one of the two arcs has weight > 1."""
    return [
        (p, t)
        for p, t in side_conditions(net)
        if net.flow(p, t) > 1 or net.flow(t, p) > 1
    ]


def is_pure(net: PetriNet) -> Check:
    conds = side_conditions(net)
    if conds:
        p, t = conds[0]
        return Check(False, (p, t), f"place {p} and transition {t} form a side condition")
    return Check(True)


def is_output_nonbranching(net: PetriNet) -> Check:
    for p in net.places:
        post = [t for t in net.transitions if net.flow(p, t) > 0]
        if len(post) > 1:
            return Check(False, p, f"place {p} feeds {len(post)} transitions")
    return Check(True)


def is_conflict_free(net: PetriNet) -> Check:
    plain = is_plain(net)
    if not plain:
        return Check(False, plain.witness, "not plain: " + plain.detail)
    for p in net.places:
        post = {t for t in net.transitions if net.flow(p, t) > 0}
        pre = {t for t in net.transitions if net.flow(t, p) > 0}
        if len(post) > 1 and not post <= pre:
            return Check(False, p, f"place {p} branches outside its preset")
    return Check(True)


def is_tnet(net: PetriNet) -> Check:
    plain = is_plain(net)
    if not plain:
        return Check(False, plain.witness, "not plain: " + plain.detail)
    for p in net.places:
        post = [t for t in net.transitions if net.flow(p, t) > 0]
        pre = [t for t in net.transitions if net.flow(t, p) > 0]
        if len(post) > 1 or len(pre) > 1:
            return Check(False, p, f"place {p} has |pre|={len(pre)}, |post|={len(post)}")
    return Check(True)


def is_marked_graph(net: PetriNet) -> Check:
    tnet = is_tnet(net)
    if not tnet:
        return tnet
    for p in net.places:
        post = [t for t in net.transitions if net.flow(p, t) > 0]
        pre = [t for t in net.transitions if net.flow(t, p) > 0]
        if len(post) != 1 or len(pre) != 1:
            return Check(False, p, f"place {p} has |pre|={len(pre)}, |post|={len(post)}")
    return Check(True)


def has_isolated_elements(net: PetriNet) -> Check:
    """True when some place or transition touches no flow arc."""
    touched = set()
    for src, tgt in net.flows:
        touched.add(src)
        touched.add(tgt)
    for node in (*net.places, *net.transitions):
        if node not in touched:
            return Check(True, node, f"{node} is isolated")
    return Check(False)


def _undirected_neighbours(net: PetriNet, node: str) -> Set[str]:
    out = set(net.postset(node))
    out.update(net.preset(node))
    return out


def is_weakly_connected(net: PetriNet) -> Check:
    nodes = [*net.places, *net.transitions]
    if not nodes:
        return Check(True)
    seen = {nodes[0]}
    queue = deque([nodes[0]])
    while queue:
        node = queue.popleft()
        for other in _undirected_neighbours(net, node):
            if other not in seen:
                seen.add(other)
                queue.append(other)
    for node in nodes:
        if node not in seen:
            return Check(False, node, f"{node} is in a different component")
    return Check(True)


def is_strongly_connected(net: PetriNet) -> Check:
    nodes = [*net.places, *net.transitions]
    if not nodes:
        return Check(True)

    def closure(start: str, forward: bool) -> Set[str]:
        seen = {start}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            step = net.postset(node) if forward else net.preset(node)
            for other in step:
                if other not in seen:
                    seen.add(other)
                    queue.append(other)
        return seen

    fwd = closure(nodes[0], True)
    bwd = closure(nodes[0], False)
    for node in nodes:
        if node not in fwd or node not in bwd:
            return Check(False, node, f"{node} breaks strong connectedness")
    return Check(True)


# ---------------------------------------------------------------------------
# Behavioural conflict freeness.
# ---------------------------------------------------------------------------


def _conflict_scan(net: PetriNet, state_limit: int, binary: bool) -> Check:
    plain = is_plain(net)
    if not plain:
        return Check(False, plain.witness, "not plain")
    if not bounded(net):
        raise UnboundedNetError("the check requires a bounded net")
    graph = reachability_graph(net, state_limit)
    for state in graph.lts.states:
        marking = graph.markings[state]
        live = [t for t in net.transitions if enabled(net, marking, t)]
        for i, t in enumerate(live):
            for u in live[i + 1 :]:
                if binary:
                    for p in net.places:
                        if marking.get(p) < net.flow(p, t) + net.flow(p, u):
                            return Check(
                                False,
                                (state, t, u, p),
                                f"{t} and {u} compete for {p} at {state}",
                            )
                else:
                    shared = set(net.preset(t)) & set(net.preset(u))
                    if shared:
                        p = sorted(shared)[0]
                        return Check(
                            False,
                            (state, t, u, p),
                            f"{t} and {u} share pre-place {p} at {state}",
                        )
    return Check(True)


def is_bcf(net: PetriNet, state_limit: int = DEFAULT_STATE_LIMIT) -> Check:
    """Behaviourally conflict-free: concurrently enabled transitions never
    share a pre-place.  Requires plain (else a negative answer) and bounded
    (else an error)."""
    return _conflict_scan(net, state_limit, binary=False)


def is_bicf(net: PetriNet, state_limit: int = DEFAULT_STATE_LIMIT) -> Check:
    """Binary conflict-free: markings cover the joint demand of every pair of
    concurrently enabled transitions."""
    return _conflict_scan(net, state_limit, binary=True)


# ---------------------------------------------------------------------------
# Language membership and separability.
# ---------------------------------------------------------------------------


def word_in_language(net: PetriNet, word: Sequence[str]) -> Check:
    """Whether some transition sequence labelled by `word` fires from the
    initial marking.  Search depth equals len(word), so this terminates on
    unbounded nets too.  The witness of a negative answer is the longest
    firable prefix.
    """
    alphabet = set(net.labels)
    for letter in word:
        if letter not in alphabet:
            raise AptError(f"unknown label {letter!r}")
    by_label: Dict[str, List[str]] = {}
    for t in net.transitions:
        by_label.setdefault(net.label(t), []).append(t)

    best_prefix = 0
    seen: Set[Tuple[int, Marking]] = set()
    stack: List[Tuple[Marking, int]] = [(net.initial_marking(), 0)]
    while stack:
        marking, position = stack.pop()
        best_prefix = max(best_prefix, position)
        if position == len(word):
            return Check(True)
        key = (position, marking)
        if key in seen:
            continue
        seen.add(key)
        for t in reversed(by_label[word[position]]):
            if enabled(net, marking, t):
                stack.append((fire(net, marking, t), position + 1))
    prefix = list(word[:best_prefix])
    return Check(False, prefix, f"maximal enabled prefix has length {best_prefix}")


@dataclass(frozen=True)
class SeparabilityVerdict:
    """Either "no" with a counterexample sequence or "inconclusive"; the
    property quantifies over all firing sequences, so a bounded search can
    never answer an unqualified yes."""

    verdict: str
    counterexample: Optional[Tuple[str, ...]] = None


def separable(
    net: PetriNet, k: int, length_bound: int, mode: str = "weak"
) -> SeparabilityVerdict:
    """Check (up to `length_bound`) whether behaviour from the initial marking
    k.M decomposes into k behaviours from M: Parikh-wise in weak mode, as a
    shuffle in strong mode.
    """
    if mode not in ("weak", "strong"):
        raise AptError("mode must be 'weak' or 'strong'")
    if k < 2:
        raise AptError("k must be at least 2")
    initial = net.initial_marking()
    if any(c % k != 0 for c in initial.counts):
        raise AptError(f"initial marking is not divisible by {k}")
    base = Marking(initial.places, tuple(c // k for c in initial.counts))

    labels = list(net.transitions)

    def parikh_key(counts: Dict[str, int]) -> Tuple[int, ...]:
        return tuple(counts.get(t, 0) for t in labels)

    # Parikh vectors of sequences firable from `base`, up to the bound.  The
    # marking after a sequence depends only on its Parikh vector, so vectors
    # are a faithful search state.
    base_vectors: Set[Tuple[int, ...]] = set()
    frontier: Dict[Tuple[int, ...], Marking] = {parikh_key({}): base}
    base_vectors.add(parikh_key({}))
    for _ in range(length_bound):
        nxt: Dict[Tuple[int, ...], Marking] = {}
        for vec, marking in frontier.items():
            for i, t in enumerate(labels):
                if enabled(net, marking, t):
                    new_vec = tuple(v + (1 if j == i else 0) for j, v in enumerate(vec))
                    if new_vec not in base_vectors:
                        base_vectors.add(new_vec)
                        nxt[new_vec] = fire(net, marking, t)
        frontier = nxt

    def weak_decomposes(target: Tuple[int, ...], parts: int) -> bool:
        if parts == 1:
            return target in base_vectors
        candidates = [
            v for v in base_vectors if all(a <= b for a, b in zip(v, target))
        ]
        for v in candidates:
            rest = tuple(b - a for a, b in zip(v, target))
            if weak_decomposes(rest, parts - 1):
                return True
        return False

    def strong_accepts(sequence: Tuple[str, ...]) -> bool:
        # States: multisets of k component markings, advanced letter by letter.
        states: Set[Tuple[Marking, ...]] = {tuple([base] * k)}
        for t in sequence:
            nxt_states: Set[Tuple[Marking, ...]] = set()
            for combo in states:
                for i in range(k):
                    if i > 0 and combo[i] == combo[i - 1]:
                        continue  # symmetric choice
                    if enabled(net, combo[i], t):
                        fired = fire(net, combo[i], t)
                        new_combo = tuple(
                            sorted(
                                combo[:i] + (fired,) + combo[i + 1 :],
                                key=lambda m: m.counts,
                            )
                        )
                        nxt_states.add(new_combo)
            if not nxt_states:
                return False
            states = nxt_states
        return True

    # Depth-first over firing sequences from k.M, shortest first per prefix.
    stack: List[Tuple[Marking, Tuple[str, ...]]] = [(initial, ())]
    while stack:
        marking, sequence = stack.pop()
        if sequence:
            if mode == "weak":
                counts: Dict[str, int] = {}
                for t in sequence:
                    counts[t] = counts.get(t, 0) + 1
                ok = weak_decomposes(parikh_key(counts), k)
            else:
                ok = strong_accepts(sequence)
            if not ok:
                return SeparabilityVerdict("no", sequence)
        if len(sequence) < length_bound:
            for t in reversed(labels):
                if enabled(net, marking, t):
                    stack.append((fire(net, marking, t), sequence + (t,)))
    return SeparabilityVerdict("inconclusive")


def gcd_initial_marking(net: PetriNet) -> int:
    """gcd of all initial token counts; 0 for an empty or all-zero marking."""
    return reduce(math.gcd, (c for c in net.initial_marking().counts), 0)
