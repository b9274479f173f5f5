"""Graph queries on the bus/line network and contingency-list construction."""
from __future__ import annotations

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

ALL_LINES = "all_lines"
NONE = "none"


def is_connected(bus_ids, lines, skip: int | None = None) -> bool:
    """True when every bus is reachable, ignoring the line whose id is ``skip``."""
    bus_ids = list(bus_ids)
    if not bus_ids:
        return True
    adj = defaultdict(list)
    for ln in lines:
        if ln.id == skip:
            continue
        adj[ln.from_bus].append(ln.to_bus)
        adj[ln.to_bus].append(ln.from_bus)
    seen = {bus_ids[0]}
    queue = deque(seen)
    while queue:
        for nxt in adj[queue.popleft()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen >= set(bus_ids)


def bridges(case) -> list[int]:
    """Ids of lines whose loss disconnects the network (parallel circuits are never bridges)."""
    bus_ids = [b.id for b in case.buses]
    return [ln.id for ln in case.lines if not is_connected(bus_ids, case.lines, skip=ln.id)]


@dataclass
class ContingencyList:
    lines: list[int]
    excluded_bridges: list[int] = field(default_factory=list)

    def __iter__(self):
        return iter(self.lines)

    def __len__(self):
        return len(self.lines)


def contingency_list(case, policy=None) -> ContingencyList:
    """Single-line outages to secure against, in ascending line-id order.

    ``policy`` is ``"all_lines"``, ``"none"`` or an explicit list of line ids;
    it defaults to the case's ``options.contingencies``.  Bridges and lines
    not flagged as outage candidates are dropped; dropped bridges are
    reported in ``excluded_bridges``.
    """
    policy = case.options.contingencies if policy is None else policy
    known = {ln.id for ln in case.lines}
    if policy == NONE or policy is None:
        return ContingencyList([])
    if policy == ALL_LINES:
        wanted = sorted(ln.id for ln in case.lines if ln.outage_candidate)
    elif isinstance(policy, (list, tuple)):
        unknown = [k for k in policy if k not in known]
        if unknown:
            raise ValueError(f"contingency list names unknown line(s) {unknown}")
        wanted = sorted(set(int(k) for k in policy))
    else:
        raise ValueError(f"unknown contingency policy {policy!r}")
    bridge_set = set(bridges(case))
    kept = [k for k in wanted if k not in bridge_set]
    dropped = [k for k in wanted if k in bridge_set]
    for k in dropped:
        log.info("line %d is a bridge; excluded from the contingency list", k)
    return ContingencyList(kept, dropped)
