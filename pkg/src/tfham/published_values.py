"""Published values, transcribed verbatim as strings.  Never recomputed here."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Table1Row:
    N: int
    slope: str
    err_pct: str
    slope_unit: str
    curv: str
    curv_unit: str


@dataclass(frozen=True)
class Table2Row:
    m: int
    slope: str
    err_pct: str
    slope_unit: str


TABLE1 = (
    Table1Row(10, "-1.54628", "2.63", "-1.50014", "25.4567", "13.0003"),
    Table1Row(20, "-1.56597", "1.39", "-1.54093", "46.8426", "23.0819"),
    Table1Row(30, "-1.57305", "0.94", "-1.55595", "68.1948", "33.1119"),
    Table1Row(40, "-1.57669", "0.71", "-1.56373", "89.5378", "43.1275"),
    Table1Row(50, "-1.57891", "0.57", "-1.56848", "110.877", "53.1370"),
    Table1Row(60, "-1.58040", "0.48", "-1.57168", "132.214", "63.1434"),
    Table1Row(70, "-1.58171", "0.40", "-1.57399", "151.216", "73.1480"),
    Table1Row(80, "-1.58303", "0.31", "-1.57572", "173.012", "83.1514"),
    Table1Row(90, "-1.58424", "0.24", "-1.57708", "196.871", "93.1542"),
    Table1Row(100, "-1.58515", "0.18", "-1.57816", "224.112", "103.1560"),
)

TABLE2 = (
    Table2Row(10, "-1.58030", "0.48933", "-1.51508"),
    Table2Row(20, "-1.58571", "0.14867", "-1.58281"),
    Table2Row(30, "-1.58694", "0.07122", "-1.58606"),
    Table2Row(40, "-1.58752", "0.03469", "-1.58668"),
    Table2Row(50, "-1.58801", "0.00384", "-1.58712"),
)

# run parameters of the published runs
TABLE_ALPHA = "3/4"
SLOPE_TABLE_H = "-3/4"
FIGURE1_H = "-4/5"
FIGURE1_ORDER = 40
HCURVE_ORDER = 20
UNIT_BASIS_H = "-1/2"
