"""Ten recipients of one message, and what a single doubt does to them.

Run with ``python3 demos/03_fanout_canonicity.py``.
"""

import random

from tacio import Defeater, aggregate_of, canonical_members, is_canonical_member, load_fixture

g = load_fixture("cq3a_fanout")
root = "machine_0_mailbox"

agg = aggregate_of(g, root)
print(len(agg), "members,", agg.classification.value)

# Every delivery was done by a vetted process and nothing casts doubt on it,
# so every recipient counts as a canonical member.
members = canonical_members(g, root)
print(len(members), "canonical members")

# A bounce report on one delivery is a rebutting defeater for that act.
g.add_defeater(Defeater("bounce_1", "deliver_4", "rebutting", "delivery reported a bounce"))
print(len(canonical_members(g, root)), "canonical members after the bounce")
print(is_canonical_member(g, "machine_4_mailbox", root))

# More doubt never makes more members canonical.
rng = random.Random(0)
targets = sorted(g.acts) + sorted(g.carriers)
sizes = []
for i in range(20):
    g.add_defeater(Defeater(f"doubt_{i}", rng.choice(targets), "undercutting"))
    sizes.append(len(canonical_members(g, root)))
print(sizes)
assert sizes == sorted(sizes, reverse=True)
