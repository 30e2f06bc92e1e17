#!/usr/bin/env python3
"""Export MIT-BIH arrhythmia records to the toolkit's CSV/ann format.

Needs the `wfdb` package and a local copy of the database (e.g. downloaded
from PhysioNet). Usage:

    python scripts/export_mitdb.py /path/to/mit-bih-arrhythmia-database-1.0.0 out_dir

Then point the acceptance suite at it:

    MEE_MITDB_DIR=out_dir pytest tests/test_acceptance.py -k table1 -s

Beat symbols map to the five-class alphabet (plus O for any other beat
symbol); non-beat annotations are dropped.
"""

import sys
from pathlib import Path

try:
    import wfdb
except ImportError:
    sys.exit("the wfdb package is required: pip install wfdb")

RECORDS = ["106", "119", "200", "201", "208", "210", "219", "221", "223", "233"]

CLASS_MAP = {
    "N": "N", "L": "N", "R": "N", "e": "N", "j": "N",
    "A": "S", "a": "S", "J": "S", "S": "S",
    "V": "V", "E": "V",
    "F": "F",
    "/": "Q", "f": "Q", "Q": "Q",
}
# Annotation symbols that are not beats at all.
NON_BEAT = set('+~|"s T*D=@[]!x()pt`\'^')


def export(db_dir: Path, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for rid in RECORDS:
        record = wfdb.rdrecord(str(db_dir / rid))
        ann = wfdb.rdann(str(db_dir / rid), "atr")
        # the database names lead II "MLII"; normalize for downstream --lead II
        names = ["II" if n == "MLII" else n for n in record.sig_name]
        csv_path = out_dir / f"{rid}.csv"
        with open(csv_path, "w") as fh:
            fh.write("index," + ",".join(names) + "\n")
            for i, row in enumerate(record.p_signal):
                fh.write(f"{i}," + ",".join(f"{v:.6f}" for v in row) + "\n")
        (out_dir / f"{rid}.meta").write_text(f"fs={record.fs}\n")
        lines = []
        for idx, symbol in zip(ann.sample, ann.symbol):
            if symbol in NON_BEAT:
                continue
            lines.append(f"{int(idx)},{CLASS_MAP.get(symbol, 'O')}\n")
        (out_dir / f"{rid}.ann").write_text("".join(lines))
        print(f"exported {rid}: {len(record.p_signal)} samples, {len(lines)} beats")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    export(Path(sys.argv[1]), Path(sys.argv[2]))
