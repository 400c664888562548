"""Asking the traffic-fusion question against the triple view.

Run with ``python3 demos/02_traffic_query.py``.
"""

from tacio import evaluate, export_turtle, load_fixture, parse_query, run_competency, to_triples
from tacio.competency import competency_query

g = load_fixture("cq2a_traffic")

# The canned query is long: 32 triple patterns over sensors, copies,
# the controller and the fused dataset.
q = competency_query("CQ2a")
print(len(q.patterns), "patterns,", len(q.columns), "variables")

table = run_competency("CQ2a", g)
print(len(table), "row")
row = table.records()[0]
print(row["iba_5"], "carries", row["ice_3"], "which describes", row["traffic_event_1"])

# Smaller ad-hoc questions use the same engine.  Which copying acts changed
# both the carrier and the pattern on it?
triples = to_triples(g)
adhoc = parse_query("""
SELECT ?act ?from ?to WHERE {
    ?act a tacio:ActOfCarrierAndConcretizerTransition ;
         tacio:has_reference_carrier ?from ;
         cco:has_output ?to .
}""")
print(evaluate(adhoc, triples).render())

# The same view as Turtle (first few lines).  The bytes are stable run to run.
text = export_turtle(g)
print("\n".join(text.splitlines()[:12]))
print("...", len(text.splitlines()), "lines total")
