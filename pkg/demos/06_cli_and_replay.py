# %% [markdown]
# # Command line runs and manifest replay
#
# Each CLI run writes CSV outputs plus `manifest.json` with sha256 checksums.
# `replay` re-executes the manifest and compares checksums.

# %%
import json
import tempfile
from pathlib import Path

from inls_lab.cli import main

tmp = Path(tempfile.mkdtemp())
main(["exponents", "--n", "1", "--alpha", "1", "--b", "0.1", "--p", "2.05", "--out", str(tmp / "rep.json")])
print("p_max from report:", json.loads((tmp / "rep.json").read_text())["p_max"])

# %%
code = main(["simulate", "--mu", "-1", "--T", "0.5", "--save-every", "50", "--out", str(tmp / "sim")])
print("exit", code)
print((tmp / "sim" / "ledger.csv").read_text())

# %%
print("replay exit", main(["replay", str(tmp / "sim" / "manifest.json"), "--out", str(tmp / "sim2")]))

# %% [markdown]
# A hypothesis violation exits with status 2 and leaves no partial outputs.

# %%
print("exit", main(["simulate", "--alpha", "5", "--out", str(tmp / "bad")]), "exists:", (tmp / "bad").exists())
