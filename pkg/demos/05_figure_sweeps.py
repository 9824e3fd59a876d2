"""Reproducing the reference figure configurations as CSV sweeps.

Every study configuration is packaged as a named preset; this demo runs
two of them at a reduced trial count and prints a quick view of the
emitted CSVs.  Full-protocol runs (a million trials per point) use the
command line, e.g.:

    ris-ssm --preset fig4a --output fig4a.csv
    ris-ssm --preset fig10 --trials 200000 --output fig10.csv

Run:  python3 demos/05_figure_sweeps.py
"""

import pathlib

from ris_ssm.cli import PRESETS, run_preset

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

print("available presets:", ", ".join(sorted(PRESETS)))

for name, trials in (("fig4a", 20_000), ("fig6", 20_000)):
    path = OUT / f"{name}.csv"
    run_preset(name, str(path), trials=trials, seed=0)
    lines = path.read_text().splitlines()
    print(f"\n=== {name} -> {path} ({len(lines)} lines) ===")
    for line in lines[:10]:
        print(" ", line)
    print("  ...")
