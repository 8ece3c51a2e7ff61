#!/usr/bin/env python3
"""Regenerate the shipped mod-4096 decreasing cover from its transcription.

The 28 rows below are the hand-made cover: residue class, step list,
stated asymptotic ratio c and stated worst-case ratio.  The offset d is
not an independent column, it is fixed by d = (worst - c) * n0, so the
file is pure transcription arithmetic.  Before writing, every row is
cross-checked against the symbolic engine and the witness replay; the
script refuses to emit a file that disagrees with the engine, which
makes any future transcription edit loud.

Usage: python scripts/make_cover_fixture.py [outfile]
Default outfile: src/wildsemi/data/cover_mod4096.cover
"""

from __future__ import annotations

import sys
from fractions import Fraction as F
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from wildsemi import residue

# (residue, j, steps, stated c, stated worst); steps as comma tokens.
TRANSCRIPTION = [
    (0, 1, "T", F(1, 2), F(1, 2)),
    (1, 2, "T,T", F(3, 4), F(4, 5)),
    (3, 4, "T,T,T,T", F(9, 16), F(2, 3)),
    (11, 5, "T,T,T,T,T", F(27, 32), F(10, 11)),
    (27, 7, "T,x13,T,T,T,T,T,T", F(117, 128), F(25, 27)),
    (91, 8, "x25,T,T,T,T,T,T,T,T", F(225, 256), F(80, 91)),
    (219, 8, "T,T,T,T,T,T,T,T", F(243, 256), F(209, 219)),
    (59, 7, "T,T,T,T,T,T,T", F(81, 128), F(38, 59)),
    (123, 8, "x7,T,T,T,T,T,T,T,T", F(189, 256), F(91, 123)),
    (251, 8, "x23,T,T,T,T,T,T,T,T", F(207, 256), F(203, 251)),
    (7, 6, "x5,T,T,T,T,T,T", F(45, 64), F(5, 7)),
    (39, 7, "x35,T,T,T,T,T,T,T", F(105, 128), F(32, 39)),
    (103, 9, "T,T,x13,T,T,T,T,T,T,T", F(351, 512), F(71, 103)),
    (359, 9, "x35,T,T,T,T,T,T,T,T,T", F(315, 512), F(221, 359)),
    (231, 8, "x5,T,T,T,T,T,T,T,T", F(135, 256), F(122, 231)),
    (23, 5, "T,T,T,T,T", F(27, 32), F(20, 23)),
    (15, 7, "T,T,T,T,T,T,T", F(81, 128), F(10, 15)),
    (79, 8, "T,T,T,T,T,T,T,T", F(243, 256), F(76, 79)),
    (207, 8, "x5,T,x5,T,T,T,T,T,T,T", F(225, 256), F(182, 207)),
    (47, 7, "x13,T,T,T,T,T,T,T", F(117, 128), F(43, 47)),
    (111, 7, "x11,T,T,T,T,T,T,T", F(99, 128), F(86, 111)),
    (31, 6, "x11,T,T,T,T,T,T", F(33, 64), F(16, 31)),
    (63, 7, "x11,T,T,T,T,T,T,T", F(99, 128), F(49, 63)),
    (127, 8, "x43,T,T,T,T,T,T,T,T", F(129, 256), F(64, 127)),
    (255, 9, "x43,T,T,T,T,T,T,T,T,T", F(387, 512), F(193, 255)),
    (511, 10, "T,x29,T,T,T,T,T,T,T,T,T", F(783, 1024), F(391, 511)),
    (1023, 11, "x11,T,T,T,T,T,x11,T,T,T,T,T,T", F(1089, 2048), F(544, 1023)),
    (2047, 12, "x11,T,T,T,T,T,x11,T,T,T,T,T,T,T", F(3267, 4096), F(1633, 2047)),
]


def build_lines() -> list[str]:
    lines = [
        "# hand-made decreasing cover of the residue classes mod 4096,",
        "# all classes covered except the all-ones class 4095;",
        "# fields: bits residue j c d worst steps",
    ]
    rows = []
    for residue_value, j, steps_s, c, worst in TRANSCRIPTION:
        cls = residue.ResidueClass(residue_value, j)
        n0 = cls.smallest_element
        d = (worst - c) * n0  # d is determined by the two stated ratios
        steps = tuple(steps_s.split(","))
        engine = residue.make_path_record(cls, steps)
        if engine.map.c != c or engine.map.d != d or engine.worst_ratio != worst:
            raise SystemExit(
                f"transcription row {residue_value} mod 2^{j} disagrees with the engine: "
                f"engine c={engine.map.c} d={engine.map.d} worst={engine.worst_ratio}"
            )
        rows.append(
            (
                residue.class_bits(cls),
                f"{residue.class_bits(cls)} {residue_value} {j} "
                f"{c.numerator}/{c.denominator} {d.numerator}/{d.denominator} "
                f"{worst.numerator}/{worst.denominator} {steps_s}",
            )
        )
    rows.sort()
    lines.extend(line for _, line in rows)
    return lines


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent / "src" / "wildsemi" / "data" / "cover_mod4096.cover"
    )
    lines = build_lines()
    table = residue.load_coverage("\n".join(lines) + "\n", modulus_exponent=12)
    verdict = residue.verify_coverage_table(table)
    if not verdict.ok:
        for issue in verdict.issues:
            print("ISSUE:", issue, file=sys.stderr)
        return 1
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(table.records)} records, worst ratio {table.worst})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
