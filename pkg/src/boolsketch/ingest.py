"""Message logs to windowed difference hypergraphs.

Log rows are six whitespace-separated columns::

    day  time  tx_id  zipcode  rx_id  in_contact

with ``day >= 1``, ``time`` in seconds since the start of that day and
``in_contact`` one of ``y``/``n``. Inside a time window and a zipcode set,
every transmitter becomes a hyperedge over the users it messaged. The vertex
set is the pool of receivers seen in the same zipcodes over ``context``
consecutive windows centred on the target one.

Windows tile the absolute timeline ``(day - 1) * 86400 + time`` in steps of
``dt``, so each record belongs to exactly one window.
"""

from __future__ import annotations

import io
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, TextIO, Union

import numpy as np

from .errors import MalformedLine
from .hypergraph import Hypergraph

__all__ = [
    "DAY_SECONDS",
    "MessageRecord",
    "WindowSpec",
    "WindowGraph",
    "SynthParams",
    "SynthLog",
    "parse_log",
    "iter_records",
    "window_of",
    "partition_windows",
    "build_window_hypergraph",
    "synth_log",
]

log = logging.getLogger(__name__)

DAY_SECONDS = 86400


@dataclass(frozen=True)
class MessageRecord:
    day: int
    time: float
    tx_id: str
    zipcode: str
    rx_id: str
    in_contact: bool

    def __post_init__(self):
        if self.day < 1:
            raise ValueError("day must be >= 1")
        if not 0 <= self.time < DAY_SECONDS:
            raise ValueError(f"time {self.time} is outside one day")
        if not (self.tx_id and self.zipcode and self.rx_id):
            raise ValueError("ids must be nonempty")

    @property
    def timestamp(self) -> float:
        """Seconds since the start of day 1."""
        return (self.day - 1) * DAY_SECONDS + self.time

    def to_line(self) -> str:
        t = int(self.time) if float(self.time).is_integer() else self.time
        flag = "y" if self.in_contact else "n"
        return f"{self.day} {t} {self.tx_id} {self.zipcode} {self.rx_id} {flag}"


def _parse_line(line: str, lineno: int) -> MessageRecord:
    cols = line.split()
    if len(cols) != 6:
        raise MalformedLine(lineno, f"expected 6 columns, found {len(cols)}")
    day_s, time_s, tx, zipcode, rx, flag = cols
    try:
        day = int(day_s)
    except ValueError:
        raise MalformedLine(lineno, f"day {day_s!r} is not an integer") from None
    try:
        t = float(time_s)
    except ValueError:
        raise MalformedLine(lineno, f"time {time_s!r} is not a number") from None
    if t.is_integer():
        t = int(t)
    if flag not in ("y", "n"):
        raise MalformedLine(lineno, f"contact flag must be y or n, got {flag!r}")
    try:
        return MessageRecord(day, t, tx, zipcode, rx, flag == "y")
    except ValueError as e:
        raise MalformedLine(lineno, str(e)) from None


def iter_records(stream: Union[str, TextIO, Iterable[str]]) -> Iterator[MessageRecord]:
    """Stream records one line at a time; blank lines are skipped.

    Stops with `MalformedLine` at the first bad row.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for lineno, line in enumerate(stream, start=1):
        if line.strip():
            yield _parse_line(line, lineno)


def parse_log(stream) -> list[MessageRecord]:
    return list(iter_records(stream))


@dataclass(frozen=True)
class WindowSpec:
    """Window ``index`` of length ``dt`` seconds restricted to ``zipcodes``.

    ``context`` is the number of consecutive windows (centred on ``index``)
    whose receivers make up the vertex pool.
    """

    dt: float
    index: int
    zipcodes: frozenset
    context: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        zips = frozenset(str(z) for z in self.zipcodes)
        if not zips:
            raise ValueError("zipcode set must be nonempty")
        if self.context < 1:
            raise ValueError("context must be >= 1")
        object.__setattr__(self, "zipcodes", zips)

    @property
    def span(self) -> tuple[float, float]:
        return self.index * self.dt, (self.index + 1) * self.dt

    @property
    def context_range(self) -> range:
        lo = self.index - (self.context - 1) // 2
        return range(lo, lo + self.context)

    def to_json(self) -> dict:
        return {
            "dt": self.dt,
            "index": self.index,
            "zipcodes": sorted(self.zipcodes),
            "context": self.context,
            "start": self.span[0],
            "end": self.span[1],
        }


def window_of(record: MessageRecord, dt: float) -> int:
    return int(record.timestamp // dt)


def partition_windows(records: Iterable[MessageRecord], dt: float) -> dict[int, list[MessageRecord]]:
    """Group records by window index; keys come out sorted."""
    out: dict[int, list[MessageRecord]] = defaultdict(list)
    for r in records:
        out[window_of(r, dt)].append(r)
    return dict(sorted(out.items()))


@dataclass
class WindowGraph:
    """Hypergraph of one window plus the vertex labels it is indexed by."""

    spec: WindowSpec
    graph: Hypergraph
    nodes: list
    transmitters: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def node_index(self) -> dict:
        return {u: i for i, u in enumerate(self.nodes)}

    def labeled_edges(self, graph: Optional[Hypergraph] = None) -> frozenset:
        """Edges as frozensets of receiver ids."""
        g = self.graph if graph is None else graph
        return frozenset(frozenset(self.nodes[v] for v in e) for e in g.edges)

    def to_json(self) -> dict:
        return {
            "window": self.spec.to_json(),
            "hypergraph": self.graph.to_json(),
            "nodes": list(self.nodes),
            "transmitters": {
                ",".join(str(v + 1) for v in sorted(e)): txs
                for e, txs in sorted(self.transmitters.items(), key=lambda kv: sorted(kv[0]))
            },
            "diagnostics": self.diagnostics,
        }


def build_window_hypergraph(records: Iterable[MessageRecord], w: WindowSpec) -> WindowGraph:
    """Difference hypergraph of window ``w``.

    Transmitters reaching a single receiver are dropped: such an edge is
    monochromatic under every assignment and only shifts the c-cut by a
    constant. Transmitters with identical receiver sets collapse into one
    edge; the number of merges is reported in the diagnostics.
    """
    ctx = set(w.context_range)
    pool: set = set()
    fanout: dict = defaultdict(set)
    in_window = 0
    for r in records:
        if r.zipcode not in w.zipcodes:
            continue
        k = window_of(r, w.dt)
        if k not in ctx:
            continue
        pool.add(r.rx_id)
        if k == w.index:
            in_window += 1
            fanout[r.tx_id].add(r.rx_id)

    nodes = sorted(pool)
    index = {u: i for i, u in enumerate(nodes)}
    by_edge: dict = defaultdict(list)
    singletons = 0
    for tx, rxs in fanout.items():
        if len(rxs) < 2:
            singletons += 1
            continue
        by_edge[frozenset(index[u] for u in rxs)].append(tx)
    for txs in by_edge.values():
        txs.sort()
    merged = sum(len(t) - 1 for t in by_edge.values())
    if merged:
        log.info("window %d: merged %d duplicate transmitter edges", w.index, merged)

    graph = Hypergraph(len(nodes), frozenset(by_edge))
    diag = {
        "records": in_window,
        "transmitters": len(fanout),
        "singletons_dropped": singletons,
        "duplicates_merged": merged,
        "n": graph.n,
        "s": graph.s,
        "d": graph.d,
    }
    return WindowGraph(w, graph, nodes, dict(by_edge), diag)


@dataclass(frozen=True)
class SynthParams:
    """Synthetic traffic model.

    Each window of ``dt`` seconds gets Poisson(``rate``) active transmitters,
    each with a home zipcode. A transmitter messages a single receiver with
    probability ``single_frac``, otherwise 2..``d_max`` distinct receivers.
    """

    users: int = 2000
    zipcodes: int = 8
    rate: float = 20.0
    duration: float = 6 * 3600
    dt: float = 600.0
    d_max: int = 4
    single_frac: float = 0.6
    contact_prob: float = 0.3

    def __post_init__(self):
        if self.users < 2 or self.zipcodes < 1:
            raise ValueError("need at least 2 users and 1 zipcode")
        if self.rate < 0 or self.duration < 0:
            raise ValueError("rate and duration must be non-negative")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 2 <= self.d_max <= self.users:
            raise ValueError("d_max must be in 2..users")
        if not 0 <= self.single_frac <= 1 or not 0 <= self.contact_prob <= 1:
            raise ValueError("probabilities must lie in [0, 1]")

    @property
    def zip_codes(self) -> list[str]:
        return [f"{78701 + i:05d}" for i in range(self.zipcodes)]

    @property
    def windows(self) -> int:
        return int(np.ceil(self.duration / self.dt))


@dataclass
class SynthLog:
    """Generated log text and, per window, the (tx, zipcode, receivers) bursts behind it."""

    params: SynthParams
    text: str
    bursts: dict

    def truth(self, w: WindowSpec) -> frozenset:
        """Ground-truth edges of ``w`` as frozensets of receiver ids (size >= 2, deduplicated)."""
        if w.dt != self.params.dt:
            raise ValueError("window length differs from the generator's dt")
        return frozenset(
            frozenset(rx) for tx, z, rx in self.bursts.get(w.index, []) if z in w.zipcodes and len(rx) >= 2
        )


def synth_log(params: SynthParams, seed=None) -> SynthLog:
    """Reproducible synthetic log; identical text for identical ``(params, seed)``."""
    rng = np.random.default_rng(seed)
    users = [f"u{i}" for i in range(params.users)]
    zips = params.zip_codes
    lines: list[tuple] = []
    bursts: dict = {}
    for k in range(params.windows):
        start = k * params.dt
        end = min(start + params.dt, params.duration)
        count = int(rng.poisson(params.rate)) if params.rate > 0 else 0
        count = min(count, params.users)
        if count == 0 or end <= start:
            continue
        txs = rng.choice(params.users, size=count, replace=False)
        here = []
        for t in txs:
            z = zips[int(rng.integers(len(zips)))]
            if rng.random() < params.single_frac:
                size = 1
            else:
                size = int(rng.integers(2, params.d_max + 1))
            others = np.delete(np.arange(params.users), t)
            rx = sorted(users[i] for i in rng.choice(others, size=size, replace=False))
            here.append((users[t], z, tuple(rx)))
            for u in rx:
                ts = int(rng.integers(int(np.ceil(start)), int(np.ceil(end))))
                contact = rng.random() < params.contact_prob
                lines.append((ts, users[t], z, u, contact))
        bursts[k] = here
    lines.sort(key=lambda r: (r[0], r[1], r[3]))
    out = []
    for ts, tx, z, rx, contact in lines:
        day, sec = divmod(ts, DAY_SECONDS)
        out.append(f"{day + 1} {sec} {tx} {z} {rx} {'y' if contact else 'n'}\n")
    return SynthLog(params, "".join(out), bursts)
