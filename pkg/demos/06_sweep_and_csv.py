"""
The experiment harness
======================

Configs are INI text. A sweep runs every (problem, method) pair as an
independent process and writes one CSV (and one certification report) per
pair. The same thing is available as ``acceg sweep <config>``.
"""

import tempfile
from pathlib import Path

from acceg.harness import fit_log_slope, load_sweep, read_csv, run_sweep, sweep_status

CONFIG = """
[sweep]
problems = rotation-2, shifted-0.05-2, box-bilinear-3
methods = AEG, APEG, EAG, PEAG
iters = 2000
certify = true
record_every = 1
workers = 4
"""

out = Path(tempfile.mkdtemp(prefix="acceg-sweep-"))
sweep = load_sweep(CONFIG)
sweep.output_dir = str(out)
results = run_sweep(sweep)
print("overall exit status:", sweep_status(results))

for cfg, status, message in results:
    fit = fit_log_slope(read_csv(cfg.output_path))
    print(f"{cfg.problem:15s} {cfg.method:5s} status={status} slope={fit.slope:+.3f}  {message}")

print("\nfiles in", out)
for f in sorted(out.iterdir())[:4]:
    print(" ", f.name)
print("first lines of one trace:")
print("".join(Path(results[0][0].output_path).read_text().splitlines(True)[:3]))
