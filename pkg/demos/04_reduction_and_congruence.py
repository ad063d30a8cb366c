# %% [markdown]
# # Running processes
#
# Both calculi have a small-step semantics. A step picks one redex among the
# parallel threads; a replicated server contributes a fresh copy of its body.
# Results are compared up to structural congruence, written ≡.

# %%
from pathlib import Path

from sessenc import (
    concurrent_rounds, encode, hook_equiv, load_program, parse_pi_process as P, run,
    struct_equiv,
)
from sessenc.semantics import format_trace

HERE = Path(__file__).resolve().parent if "__file__" in globals() else Path.cwd()
_, sys_process = load_program(HERE.parent / "programs" / "sys.spi")

trace = run(sys_process, 3)
print(format_trace(trace))
print("back to the start:", struct_equiv(trace[-1].process, sys_process))

# %% [markdown]
# The first two steps are independent: the two servers each receive an
# endpoint. Grouping independent steps into rounds shows the two-round cycle.

# %%
for i, r in enumerate(concurrent_rounds(trace), 1):
    print(i, " || ".join(f"{e.rule} at {e.location}" for e in r))

# %% [markdown]
# The encoded system needs one extra communication on the continuation
# channel and then a `case` step. Up to that administrative `case`, written ↪,
# it is back where it started after the same two rounds.

# %%
enc = encode(sys_process)
trace = run(enc, 4)
for i, r in enumerate(concurrent_rounds(trace[:4]), 1):
    print(i, " || ".join(f"{e.rule} at {e.location}" for e in r))
print("≡ after 3 steps:", struct_equiv(trace[3].process, enc))
print("↪ after 3 steps:", hook_equiv(trace[3].process, enc))
print("≡ after 4 steps:", struct_equiv(trace[4].process, enc))

# %% [markdown]
# Congruence ignores the order of parallel threads, unused restrictions, the
# names of bound channels and one unfolding of a replication. It also applies
# under prefixes.

# %%
pairs = [
    ("a!().0 | b!().0", "b!().0 | (new c:l#[])a!().0"),
    ("*a?(x).0", "a?(y).0 | *a?(x).0"),
    ("a?(x).(x!().0 | b!().0)", "a?(y).(b!().0 | y!().0)"),
]
for left, right in pairs:
    print(f"{left:26} ≡ {right:32} {struct_equiv(P(left), P(right))}")
