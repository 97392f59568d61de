#!/usr/bin/env python3
"""Regenerate the curve fixture under data/.

Curve rows (a-invariants, rank, torsion) come from the Cremona "mini"
database shipped in the `sagemath-data-elliptic-curves` wheel
(sage_data_elliptic_curves/data/cremona/cremona_mini.db).  Modular degrees
of the first curve in each isogeny class are computed with PARI's
`ellmoddegree` through the `cypari` wheel.

usage: make_fixture.py CREMONA_MINI_DB MAX_CONDUCTOR OUTDIR [EXTRA_AINVS ...]
"""
import os
import re
import sqlite3
import sys

from cypari import pari


def split_label(curve):
    m = re.fullmatch(r"(\d+)([a-z]+)(\d+)", curve)
    return int(m.group(1)), m.group(2), int(m.group(3))


def main():
    db, max_n, outdir = sys.argv[1], int(sys.argv[2]), sys.argv[3]
    extra = sys.argv[4:]
    pari.allocatemem(2 * 10**9)
    con = sqlite3.connect(db)
    rows = []
    q = (
        "select t_curve.curve, t_class.rank, t_curve.tors, t_curve.eqn "
        "from t_curve join t_class on t_curve.class = t_class.class "
        "where t_class.conductor <= ?"
    )
    for curve, rank, tors, eqn in con.execute(q, (max_n,)):
        n, cls, num = split_label(curve)
        rows.append((n, len(cls), cls, num, eqn.replace(" ", ""), rank, tors))
    # Cremona order: conductor, then class code (a..z, ba, bb, ...), then number.
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    tag = f"{0:05d}-{max_n:05d}"
    with open(os.path.join(outdir, f"allcurves.{tag}"), "w") as ac, open(
        os.path.join(outdir, f"degphi.{tag}"), "w"
    ) as dp:
        ac.write("# conductor class number [a1,a2,a3,a4,a6] rank torsion\n")
        dp.write("# conductor class number [a1,a2,a3,a4,a6] degree (first curve of each class)\n")
        for n, _, cls, num, eqn, rank, tors in rows:
            ac.write(f"{n} {cls} {num} {eqn} {rank} {tors}\n")
            if num == 1:
                deg = pari(f"ellmoddegree(ellinit({eqn}))")
                dp.write(f"{n} {cls} {num} {eqn} {deg}\n")
    if extra:
        with open(os.path.join(outdir, "allcurves.extra"), "w") as ac, open(
            os.path.join(outdir, "degphi.extra"), "w"
        ) as dp:
            ac.write("# curves outside the main range, class code assigned locally\n")
            dp.write("# curves outside the main range, class code assigned locally\n")
            for eqn in extra:
                e = pari(f"ellinit({eqn})")
                n = int(pari.ellglobalred(e)[0])
                rank = int(pari.ellanalyticrank(e)[0])
                tors = int(pari.elltors(e)[0])
                deg = int(pari.ellmoddegree(e))
                ac.write(f"{n} a 1 {eqn} {rank} {tors}\n")
                dp.write(f"{n} a 1 {eqn} {deg}\n")


if __name__ == "__main__":
    main()
