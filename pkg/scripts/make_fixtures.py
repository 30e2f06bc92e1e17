#!/usr/bin/env python3
"""Regenerate the bundled synthetic records under data/synth/.

clean.csv      60 s at 360 Hz, 60 bpm, all-normal beats
separable.csv  same generator with 7 cycles sign-inverted and labeled V
"""

from pathlib import Path

from ecgmee.io import invert_cycles, save_record, synth_ecg

OUT = Path(__file__).resolve().parent.parent / "data" / "synth"

INVERTED_POSITIONS = [5, 13, 21, 29, 37, 45, 53]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    clean = synth_ecg(360, 60, 60, 42, jitter=0.05)
    save_record(clean, OUT / "clean.csv")

    separable = invert_cycles(clean, INVERTED_POSITIONS, label="V")
    save_record(separable, OUT / "separable.csv")
    print(f"wrote {OUT}/clean.csv and {OUT}/separable.csv")


if __name__ == "__main__":
    main()
