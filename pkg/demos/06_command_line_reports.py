# %% [markdown]
# Report files from the command line
#
# Every command writes plain tables to stdout; with --out-dir it also writes
# CSV and JSON copies (and SVG charts for footprints) stamped with a run
# manifest. The same shell command is driven here through ``main``.

# %%
import tempfile
from pathlib import Path

from streamfootprint.cli import main

out = Path(tempfile.mkdtemp())
main(["footprint", "--average", "--by", "platform", "--out-dir", str(out)])
print(sorted(p.name for p in out.iterdir()))

# %%
print((out / "chart_platform.csv").read_text())

# %% [markdown]
# The manifest timestamp comes from SOURCE_DATE_EPOCH or input file times,
# never the clock, so rerunning gives identical bytes.

# %%
first = {p.name: p.read_bytes() for p in out.iterdir()}
main(["footprint", "--average", "--by", "platform", "--out-dir", str(out)])
print(first == {p.name: p.read_bytes() for p in out.iterdir()})

# %%
main(["scenario", "--average", "--scenario", "low_res_default"])
