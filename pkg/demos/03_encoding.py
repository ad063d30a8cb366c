# %% [markdown]
# # From sessions to linear channels
#
# The encoding replaces a session endpoint by a linear channel used exactly
# once. Each action also ships a fresh channel on which the conversation
# continues. Selection sends a variant and branching is a `case`.

# %%
from pathlib import Path

from sessenc import (
    check_pi_process, dual_pi, encode, encode_type, load_program, parse_session_type as S,
    pretty,
)

for text in ["!unit.?unit.end", "rec X.+{l:X}", "rec X.&{l:X}"]:
    print(f"{text:22} ~> {pretty(encode_type(S(text)))}")

# %% [markdown]
# Dual session types encode to dual linear types.

# %%
tau, upsilon = encode_type(S("rec X.+{l:X}")), encode_type(S("rec X.&{l:X}"))
print("dual:", dual_pi(upsilon, tau))

# %% [markdown]
# Encoding the whole system gives a linear pi process that its own checker
# accepts. Every restriction is annotated, so no inference is needed.

# %%
HERE = Path(__file__).resolve().parent if "__file__" in globals() else Path.cwd()
_, sys_process = load_program(HERE.parent / "programs" / "sys.spi")
encoded = encode(sys_process)
print(pretty(encoded))
print(check_pi_process({}, encoded).rules()[:8], "...")
