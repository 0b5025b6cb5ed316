"""The command-line interface, end to end.

Experiments are described by a key=value config file; the ``run``
subcommand executes it, ``gen`` materializes a synthetic stream as CSV,
and ``list-presets`` shows the bundled experiment definitions. This
script drives the installed ``driftnet`` entry point through a pipe so
the output below is exactly what a shell user would see.
"""

import subprocess
import sys
import tempfile
from pathlib import Path


def cli(*args, **kwargs):
    return subprocess.run([sys.executable, "-m", "driftnet", *args],
                          capture_output=True, text=True, **kwargs)


print("$ driftnet list-presets")
listing = cli("list-presets")
print(listing.stdout)

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    stream_csv = tmp / "stream.csv"
    print(f"$ driftnet gen --length 500 --dim 4 --seed 3 --out {stream_csv.name}")
    gen = cli("gen", "--length", "500", "--dim", "4", "--seed", "3",
              "--out", str(stream_csv))
    print(f"  wrote {len(stream_csv.read_text().splitlines()) - 1} instances; "
          f"header: {stream_csv.read_text().splitlines()[0]}")

    config = tmp / "small.cfg"
    config.write_text(
        "# small synthetic run\n"
        "algorithm = sfnr_adwin\n"
        "length = 4000\n"
        "dim = 4\n"
        "drift_times = 2000\n"
        "drift_widths = 1\n"
        "seeds = 1,2\n"
        "report_every = 1000\n"
        "window_size = 1000\n"
        "timing = false\n",
        encoding="utf-8")
    print(f"\n$ driftnet run {config.name}")
    run = cli("run", str(config))
    for line in run.stdout.splitlines()[:6]:
        print(f"  {line}")
    print("  ...")

    # Unknown keys fail fast with a pointer to the valid ones.
    bad = tmp / "bad.cfg"
    bad.write_text("algorithm = sfnr_adwin\nlerning_rate = 0.1\n", encoding="utf-8")
    print(f"\n$ driftnet run {bad.name}")
    oops = cli("run", str(bad))
    print(f"  exit {oops.returncode}: {oops.stderr.strip().splitlines()[0]}")
