"""Following one email from laptop to desktop.

Run with ``python3 demos/01_email_lineage.py``.
"""

from tacio import aggregate_of, ancestors, classify_copy_act, earliest_ancestor, load_fixture, successful
from tacio.lineage import atomic_copy_producer, atomic_path

# The shipped email log: a laptop mailbox, a relay spool and the recipient's mailbox.
g = load_fixture("cq1a_email")
print(sorted(g.carriers))

# Where did the recipient's copy come from?
print(sorted(ancestors(g, "pc_mailbox_1")))     # relay spool and laptop mailbox
print(earliest_ancestor(g, "pc_mailbox_1"))     # laptop_mailbox_1

# Walk the hops.  Each hop is an atomic copying act, classified by what changed.
path = atomic_path(g, "laptop_mailbox_1", "pc_mailbox_1")
for ref, out in zip(path, path[1:]):
    act = atomic_copy_producer(g, out)
    print(f"{ref:>18} -> {out:<14} {act:<16} {classify_copy_act(g, act).value:<18} ok={successful(g, act)}")

# All three mailboxes form one aggregate.  Because the carrier type changes
# along the way (laptop, relay server, desktop) it is not an aggregate of duplicates.
agg = aggregate_of(g, "relay_spool_1")
print(agg.root, len(agg), agg.classification.value)
