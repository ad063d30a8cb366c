# %% [markdown]
# # Session types, complements and duality
#
# A session type describes one endpoint of a conversation. Its partner must
# follow the *dual* protocol: every send meets a receive and every selection
# meets a branch. This notebook shows how the library builds and compares
# such types.

# %%
from sessenc import (
    alpha_eq, complement_session, dual_session, equiv, parse_session_type as S, pretty,
    subtype, unfold,
)

T = S("rec X.+{l:X}")   # keeps selecting l forever
U = S("rec X.&{l:X}")   # keeps offering l forever
print(pretty(T), "|", pretty(U))

# %% [markdown]
# Recursive types are compared through their unfoldings, so `T` and the
# one-step unfolding of `T` are the same protocol.

# %%
print(pretty(unfold(T)))
print("equivalent:", equiv(T, unfold(T)))

# %% [markdown]
# The complement flips every action. It commutes with unfolding, which is what
# makes it usable on recursive types.

# %%
print(pretty(complement_session(T)))
print("T dual to U:", dual_session(T, U))

# %% [markdown]
# A naive, purely structural dual goes wrong on a type such as
# `rec X.?unit.X`. Its partner `!unit.rec X.!unit.X` is dual under the
# coinductive relation. Yet it is not what you get by flipping the syntax.

# %%
t = S("rec X.?unit.X")
s = S("!unit.rec X.!unit.X")
print("dual:", dual_session(t, s))
print("syntactically the complement:", alpha_eq(complement_session(t), s))
print("but equivalent to it:", equiv(complement_session(t), s))

# %% [markdown]
# Subtyping follows the usual width rules: a selecting endpoint may pick among
# fewer labels than it is allowed to, and a branching endpoint may offer more.

# %%
for left, right in [("+{l:end, m:end}", "+{l:end}"), ("&{l:end}", "&{l:end, m:end}")]:
    print(f"{left} <= {right}:", subtype(S(left), S(right)))
