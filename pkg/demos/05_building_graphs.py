"""Building a graph in code, and the effect of the chain rule.

Run with ``python3 demos/05_building_graphs.py``.
"""

from tacio import (
    ActKind,
    Carrier,
    ContentItem,
    EncodingAct,
    Graph,
    dump_log,
    is_canonical_member,
    validate,
)

g = Graph()
g.add_agent("backup_daemon")
g.add_content(ContentItem("home_dir", "sha256:" + "3" * 64))
for name in ("laptop_disk", "nas_volume", "tape_1"):
    g.add_carrier(Carrier(name, "Disk" if name != "tape_1" else "Tape", "BinaryPattern", carries=["home_dir"]))

# Two vetted hops: laptop -> NAS -> tape.  There is no act straight from laptop to tape.
g.add_act(EncodingAct("nightly", ActKind.COPYING, "backup_daemon", output="nas_volume",
                      reference="laptop_disk", ppf=True))
g.add_act(EncodingAct("weekly", ActKind.COPYING, "backup_daemon", output="tape_1",
                      reference="nas_volume", ppf=True))
print(validate(g))

# With the chain rule the tape is canonical because each hop is; without it,
# canonicity needs a single vetted act from the root.
print(is_canonical_member(g, "tape_1", "laptop_disk"))
print(is_canonical_member(g, "tape_1", "laptop_disk", chain_rule=False))

# A composite act wrapping both hops restores the verdict without the chain rule.
g.add_act(EncodingAct("backup_policy", ActKind.COPYING, "backup_daemon", output="tape_1",
                      reference="laptop_disk", ppf=True, sub_acts=["nightly", "weekly"]))
print(is_canonical_member(g, "tape_1", "laptop_disk", chain_rule=False))

# The event log form, ready to save as .jsonl and feed to the tacio command.
print("\n".join(dump_log(g)))
