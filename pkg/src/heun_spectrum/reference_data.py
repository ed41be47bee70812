"""Published convergence tables and converged spectra for l = 0 and l = 1.

Cells are stored exactly as printed so comparisons can round to the printed
number of decimals. Blank table cells are absent.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ReferenceTable:
    which: int
    l: int
    alpha: str  # exact token, see model.alpha_from_token
    rows: dict  # N -> tuple of printed W_0, W_1, ...


TABLES = {
    1: ReferenceTable(
        which=1,
        l=0,
        alpha="-sqrt2",
        rows={
            2: ("4.000000000", "10.49997602"),
            3: ("4.000000000", "7.751061995", "19.88102859"),
            4: ("4.000000000", "7.694010921", "11.97562584", "33.92039998"),
            5: ("4.000000000", "7.693979367", "11.51212379", "17.05520450"),
            6: ("4.000000000", "7.693978905", "11.50604696", "15.46896992"),
            7: ("4.000000000", "7.693978892", "11.50604243", "15.37652840"),
            8: ("4.000000000", "7.693978891", "11.50604238", "15.37592761"),
            9: ("4.000000000", "7.693978891", "11.50604238", "15.37592718"),
            10: ("4.000000000", "7.693978891", "11.50604238", "15.37592718"),
        },
    ),
    2: ReferenceTable(
        which=2,
        l=0,
        alpha="sqrt2",
        rows={
            2: ("-1.180391283", "4.000000000"),
            3: ("-1.401182256", "4.000000000", "9.284143096"),
            4: ("-1.449885589", "4.000000000", "8.345259771", "17.66452696"),
            5: ("-1.458156835", "4.000000000", "8.344361267", "12.69095166"),
            6: ("-1.459389344", "4.000000000", "8.344349784", "12.53313315"),
            7: ("-1.459560848", "4.000000000", "8.344349442", "12.53290257"),
            8: ("-1.459583736", "4.000000000", "8.344349427", "12.53290132"),
            9: ("-1.459586704", "4.000000000", "8.344349427", "12.53290130"),
            10: ("-1.459587081", "4.000000000", "8.344349427", "12.53290130"),
            11: ("-1.459587128", "4.000000000", "8.344349427", "12.53290130"),
            12: ("-1.459587134", "4.000000000", "8.344349427", "12.53290130"),
            13: ("-1.459587134", "4.000000000", "8.344349427", "12.53290130"),
        },
    ),
}

# Converged three lowest levels, keyed by (l, alpha token). Exact truncation
# values are written with ten significant digits.
CONVERGED_SPECTRA = {
    (0, "-sqrt2"): ("4.000000000", "7.693978891", "11.50604238"),
    (0, "sqrt2"): ("-1.459587134", "4.000000000", "8.344349427"),
    (0, "1"): ("-0.2085695649", "4.601041510", "8.834509671"),
    (1, "-sqrt6"): ("6.000000000", "9.805784090", "13.66928892"),
    (1, "sqrt6"): ("1.600357154", "6.000000000", "10.21072810"),
}
