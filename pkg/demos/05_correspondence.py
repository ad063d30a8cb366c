# %% [markdown]
# # Checking the encoding on generated programs
#
# The generator reads the typing rules backwards, so every program it emits is
# well typed. For each one we ask two questions. First, do the session checker
# and the linear checker agree on the program and on mutants that break
# linearity? Second, does every step on one side have a matching run on the
# other, in both directions?

# %%
import collections

from sessenc import GenConfig, gen_typed_process, pretty
from sessenc.correspondence import mutants, run_corpus

ctx, p = gen_typed_process(GenConfig(seed=3))
print({k: pretty(t) for k, t in ctx.items()})
print(pretty(p))
for m in mutants(p):
    print("  mutant:", pretty(m))

# %%
reports = run_corpus(100, seed=1, depth=3)
tally = collections.Counter((r.check, r.ok) for r in reports)
for (check, ok), n in sorted(tally.items()):
    print(f"{check:18} {'pass' if ok else 'FAIL'} {n}")

# %% [markdown]
# A report that fails carries the seed, the offending program and both
# traces, so it can be replayed with `sessenc fuzz --seed`.

# %%
failing = [r for r in reports if not r.ok]
print(failing[0].line() if failing else "no counterexamples")
