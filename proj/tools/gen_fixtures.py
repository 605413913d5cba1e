#!/usr/bin/env python3
"""Regenerates the section catalog fixtures under data/.

The published databases print only the first and last rows of each catalog
(31 beams, 65 columns, 26 shear walls). Printed rows are kept verbatim and
carry reconstructed=0. Interior rows are unrecoverable, so they are filled by
a fixed interpolation scheme and flagged reconstructed=1:

  * beams    -- cross-section sizes step 300x300 -> 550x400 in six blocks;
                each block carries a short ladder of symmetric bar layouts.
  * columns  -- square sides step 300 -> 750 mm in 50 mm increments; each
                size carries a ladder of bar layouts chosen so the
                reinforcement ratio stays inside [0.01, 0.08].
  * walls    -- web thickness steps 200 -> 350 mm; rows alternate between
                boundary-element and plain-web layouts while bar diameter
                and spacing ramp up.

Rerunning the script reproduces data/*.csv byte-identically.
"""

import csv
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "data")


def write(name, header, rows):
    path = os.path.join(OUT, name)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def beams():
    rows = []
    printed = {
        1: (300, 300, "3x16", "3x16"),
        2: (300, 300, "3x18", "3x18"),
        3: (300, 300, "4x20", "4x20"),
        29: (550, 400, "4x22", "4x22"),
        30: (550, 400, "6x22", "6x22"),
        31: (550, 400, "5x22", "5x22"),
    }
    ladder = ["3x16", "3x18", "3x20", "4x20", "4x22"]
    blocks = [(350, 300), (400, 300), (450, 350), (500, 350)]
    rid = 4
    for depth, width in blocks:
        for bars in ladder:
            rows.append((rid, depth, width, bars, bars, 1))
            rid += 1
    for bars in ["3x18", "3x20", "3x22", "4x20", "5x20"]:
        rows.append((rid, 550, 400, bars, bars, 1))
        rid += 1
    for i, (d, w, bot, top) in sorted(printed.items()):
        rows.append((i, d, w, bot, top, 0))
    rows.sort(key=lambda r: r[0])
    write("beam_sections.csv",
          ["id", "depth_mm", "width_mm", "bot_bars", "top_bars", "reconstructed"],
          rows)


def columns():
    printed = {1: (300, "8x16"), 2: (300, "8x18"),
               64: (750, "12x32"), 65: (750, "16x32")}
    ladders = {
        300: ["8x16", "8x18", "8x20", "12x18", "12x20", "12x22", "12x25"],
        350: ["8x16", "8x18", "8x20", "12x18", "12x20", "12x22", "16x22"],
        400: ["8x16", "8x18", "8x20", "12x18", "12x20", "12x22", "16x25"],
        450: ["8x18", "8x20", "12x18", "12x20", "12x22", "16x22", "16x25"],
        500: ["8x20", "8x22", "12x20", "12x22", "16x22", "16x25", "16x28"],
        550: ["8x22", "12x20", "12x22", "12x25", "16x25", "16x28", "16x32"],
        600: ["12x20", "12x22", "12x25", "16x25", "16x28", "16x32", "20x32"],
        650: ["12x22", "12x25", "16x25", "16x28", "16x32", "20x28", "20x32"],
        700: ["16x25", "20x25", "16x28", "20x28", "16x32", "20x32"],
        750: ["12x28", "12x32", "16x32"],
    }
    rows = []
    rid = 1
    for side in sorted(ladders):
        for bars in ladders[side]:
            rec = 0 if rid in printed else 1
            rows.append((rid, side, bars, rec))
            rid += 1
    assert rid - 1 == 65
    for i, (side, bars) in printed.items():
        assert rows[i - 1][1] == side and rows[i - 1][2] == bars, rows[i - 1]
    write("column_sections.csv",
          ["id", "side_mm", "bars", "reconstructed"],
          rows)


def walls():
    # (t_w, t_f, s_sh, b_f, dia); t_f = 0 means no boundary element.
    spec = [
        (200, 400, 150, 300, 16), (200, 0, 150, 0, 16),
        (200, 400, 200, 300, 18), (200, 0, 200, 0, 18),
        (200, 400, 250, 300, 20), (200, 0, 250, 0, 20),
        (250, 450, 150, 350, 16), (250, 0, 150, 0, 16),
        (250, 450, 200, 350, 18), (250, 0, 200, 0, 18),
        (250, 450, 250, 350, 20), (250, 0, 250, 0, 20),
        (250, 450, 300, 350, 22),
        (300, 500, 200, 400, 18), (300, 0, 200, 0, 18),
        (300, 500, 250, 400, 20), (300, 0, 250, 0, 20),
        (300, 500, 300, 400, 22), (300, 0, 300, 0, 22),
        (300, 500, 300, 400, 24),
        (350, 550, 200, 450, 20), (350, 0, 200, 0, 20),
        (350, 550, 250, 450, 22), (350, 0, 250, 0, 22),
        (350, 550, 300, 450, 22),   # printed (listed after row 26 in the source)
        (350, 550, 300, 450, 24),   # printed
    ]
    printed_ids = {1, 2, 25, 26}
    rows = []
    for i, (tw, tf, s, bf, dia) in enumerate(spec, start=1):
        rows.append((i, tw, tf, s, bf, dia, 0 if i in printed_ids else 1))
    write("wall_sections.csv",
          ["id", "t_w_mm", "t_f_mm", "s_sh_mm", "b_f_mm", "bar_diameter_mm",
           "reconstructed"],
          rows)


def allowables():
    rows = [
        ("drift", "", "", "", 0.005, 0.01, 0.02),
        ("column", 0.1, "C", 3, 0.005, 0.015, 0.02),
        ("column", 0.1, "C", 6, 0.005, 0.012, 0.016),
        ("column", 0.4, "C", 3, 0.003, 0.012, 0.015),
        ("column", 0.4, "C", 6, 0.003, 0.01, 0.012),
        ("beam", 0.0, "C", 3, 0.01, 0.02, 0.01),
        ("beam", 0.0, "C", 6, 0.005, 0.01, 0.02),
        ("beam", 0.5, "C", 3, 0.005, 0.01, 0.02),
        ("beam", 0.5, "C", 6, 0.005, 0.005, 0.015),
        ("wall", 0.1, "YES", 3, 0.005, 0.01, 0.015),
        ("wall", 0.1, "YES", 6, 0.004, 0.008, 0.01),
        ("wall", 0.25, "YES", 3, 0.003, 0.006, 0.009),
        ("wall", 0.25, "YES", 6, 0.0015, 0.003, 0.005),
        ("wall", 0.1, "NO", 3, 0.002, 0.004, 0.008),
        ("wall", 0.1, "NO", 6, 0.002, 0.004, 0.006),
        ("wall", 0.25, "NO", 3, 0.001, 0.002, 0.003),
        ("wall", 0.25, "NO", 6, 0.001, 0.001, 0.002),
    ]
    write("allowables.csv",
          ["table", "demand_band", "confinement", "shear_band", "io", "ls", "cp"],
          rows)


if __name__ == "__main__":
    beams()
    columns()
    walls()
    allowables()
