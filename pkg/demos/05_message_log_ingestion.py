"""
From a message log to window hypergraphs
========================================

Each log line is ``day time tx zipcode rx in_contact``. Messages sent by one
transmitter inside a time window and zipcode set form one hyperedge over
its receivers.
"""

from boolsketch import LearnFailed, SynthParams, WindowSpec, build_window_hypergraph, cut_oracle, learn_graph, parse_log, synth_log

params = SynthParams(users=500, rate=10, duration=3600)
log = synth_log(params, seed=4)
print(log.text.splitlines()[:3])
records = parse_log(log.text)

zips = frozenset(params.zip_codes[:3])
for k in range(params.windows):
    w = WindowSpec(params.dt, k, zips, context=9)
    wg = build_window_hypergraph(records, w)
    line = f"window {k}: n={wg.graph.n} s={wg.graph.s} d={wg.graph.d}"
    if wg.graph.s:
        try:
            res = learn_graph(cut_oracle(wg.graph, seed=k), wg.graph.s, 4)
            line += f" recovered={res.edges == wg.graph}"
        except LearnFailed as e:
            # busy windows (many edges) can need more queries than the budget
            line += f" not learned ({e.stage})"
        line += f" truth_ok={wg.labeled_edges() == log.truth(w)}"
    print(line)
