"""A clone we had every reason to trust, and a checksum that disagrees.

Run with ``python3 demos/04_fidelity_versus_trust.py``.
"""

from tacio import is_canonical_copy, load_log, register_mismatch_defeater, verify_fidelity
from tacio.competency import fixture_lines

# Take the repository log as it was before anyone compared checksums,
# i.e. without the recorded defeater.
lines = [l for l in fixture_lines("cq5b_repository") if '"kind":"defeater"' not in l]
g, diags = load_log(lines)
assert not diags

# The desktop clone came out of a vetted client and nothing doubts it yet.
print(is_canonical_copy(g, "desktop_clone", "origin_repository"))

# Canonicity says nothing about the bytes, though.
print(verify_fidelity(g, "clone_desktop").value)
print(verify_fidelity(g, "clone_laptop").value)

# Turning the mismatch into a defeater withdraws the verdict.
d = register_mismatch_defeater(g, "clone_desktop")
print(d.id, d.kind.value)
print(is_canonical_copy(g, "desktop_clone", "origin_repository"))
