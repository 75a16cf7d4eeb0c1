"""Drive the command-line interface from Python on a shipped experiment config."""

import pathlib
import tempfile

from nlkorovkin.cli import main
from nlkorovkin.experiment import ReportFile

root = pathlib.Path(__file__).resolve().parents[1]
cfg = root / "experiments" / "truncated_bernstein_negative.json"

with tempfile.TemporaryDirectory() as tmp:
    out = pathlib.Path(tmp) / "report.json"
    code = main(["run", "--config", str(cfg), "--format", "json", "--out", str(out)])
    print("exit code", code)
    rep = ReportFile.from_json(out.read_text())
    for row in rep.rows:
        if row.n == 128:
            print(f"{row.function:12s} {row.sup_error:.3e}  {row.verdict}")

# exit code 2 on a malformed request
print("bad capacity ->", main(["integrate", "--capacity", "power:3"]))
