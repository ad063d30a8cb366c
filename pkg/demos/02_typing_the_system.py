# %% [markdown]
# # Type checking a small system
#
# `programs/sys.spi` holds two replicated servers. One selects `l` on every
# session it receives and hands the endpoint back; the other branches on `l`
# and does the same. Two outputs start the game by handing them the two ends
# of one session.

# %%
from pathlib import Path

from sessenc import check_process, load_program, pretty

HERE = Path(__file__).resolve().parent if "__file__" in globals() else Path.cwd()
SYS = HERE.parent / "programs" / "sys.spi"
print(SYS.read_text())

# %%
_, sys_process = load_program(SYS)
derivation = check_process({}, sys_process)
print(derivation.render())

# %% [markdown]
# The selecting server's derivation goes T-Rep, T-In, T-Select, T-Out and
# T-Nil. Its side conditions require the received endpoint type to be a
# subtype of `+{l:S}` and the continuation `S` to fit the type sent back.
# With both equal to `rec X.+{l:X}` the conditions hold.

# %%
print(derivation.rules())

# %% [markdown]
# Breaking linearity is caught. Here the same endpoint is used twice.

# %%
from sessenc import TypingError, parse_session_process

bad = parse_session_process("(new x y:!unit.end)(x!().0 | x!().0 | y?(z:unit).0)")
try:
    check_process({}, bad)
except TypingError as exc:
    print(exc.kind, "-", exc)
