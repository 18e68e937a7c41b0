"""Parameterized net families used for tests and benchmarking."""

from __future__ import annotations

from .common import AptError
from .petri import PetriNet


def bitnet(n: int) -> PetriNet:
    """n independent bits; bit i flips between off_i (marked) and on_i.

    The reachability graph has 2^n states.
    """
    if n < 1:
        raise AptError("bitnet needs n >= 1")
    net = PetriNet(name=f"bitnet-{n}", description=f"{n} independently flippable bits")
    for i in range(n):
        net.add_place(f"off{i}", tokens=1)
        net.add_place(f"on{i}")
        net.add_transition(f"set{i}")
        net.add_transition(f"unset{i}")
        net.add_flow(f"off{i}", f"set{i}")
        net.add_flow(f"set{i}", f"on{i}")
        net.add_flow(f"on{i}", f"unset{i}")
        net.add_flow(f"unset{i}", f"off{i}")
    return net


def philnet_bistate(n: int) -> PetriNet:
    """Dining philosophers who grab both forks in one step and release them
    in one step.  Safe, plain and pure by construction."""
    if n < 2:
        raise AptError("philnet_bistate needs n >= 2")
    net = PetriNet(
        name=f"philnet-{n}", description=f"{n} philosophers grabbing both forks at once"
    )
    for i in range(n):
        net.add_place(f"thinking{i}", tokens=1)
        net.add_place(f"eating{i}")
        net.add_place(f"fork{i}", tokens=1)
    for i in range(n):
        right = (i + 1) % n
        net.add_transition(f"take{i}")
        net.add_transition(f"put{i}")
        net.add_flow(f"thinking{i}", f"take{i}")
        net.add_flow(f"fork{i}", f"take{i}")
        net.add_flow(f"fork{right}", f"take{i}")
        net.add_flow(f"take{i}", f"eating{i}")
        net.add_flow(f"eating{i}", f"put{i}")
        net.add_flow(f"put{i}", f"thinking{i}")
        net.add_flow(f"put{i}", f"fork{i}")
        net.add_flow(f"put{i}", f"fork{right}")
    return net


def cyclenet(n: int, k: int) -> PetriNet:
    """Ring of n places and n transitions moving k tokens around; all tokens
    start on q0.  A marked graph; for n = 1 the single transition is a
    self-loop on q0."""
    if n < 1 or k < 1:
        raise AptError("cyclenet needs n >= 1 and k >= 1")
    net = PetriNet(name=f"cyclenet-{n}-{k}", description=f"{k} tokens rotating through {n} places")
    for i in range(n):
        net.add_place(f"q{i}", tokens=k if i == 0 else 0)
    for i in range(n):
        net.add_transition(f"t{i}")
        net.add_flow(f"q{i}", f"t{i}")
        net.add_flow(f"t{i}", f"q{(i + 1) % n}")
    return net
