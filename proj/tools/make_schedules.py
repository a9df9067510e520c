#!/usr/bin/env python3
"""Generates data/schedules/sara_schedules.json from the SARA statute tables.

Brackets follow the simplified section 1 shipped with the SARA corpus (not
indexed for inflation). Standard deduction follows section 63(c), including
the 2018-2025 substitution of $12,000/$18,000. The exemption amount follows
section 151(d): $2,000, or zero for 2018-2025.
"""
import json
import sys

BRACKETS = {
    "MarriedJoint": [("0", "0.15", "0"), ("36900", "0.28", "5535"),
                     ("89150", "0.31", "20165"), ("140000", "0.36", "35928.50"),
                     ("250000", "0.396", "75528.50")],
    "HeadOfHousehold": [("0", "0.15", "0"), ("29600", "0.28", "4440"),
                        ("76400", "0.31", "17544"), ("127500", "0.36", "33385"),
                        ("250000", "0.396", "77485")],
    "Single": [("0", "0.15", "0"), ("22100", "0.28", "3315"),
               ("53500", "0.31", "12107"), ("115000", "0.36", "31172"),
               ("250000", "0.396", "79772")],
    "MarriedSeparate": [("0", "0.15", "0"), ("18450", "0.28", "2767.50"),
                        ("44575", "0.31", "10082.50"), ("70000", "0.36", "17964.25"),
                        ("125000", "0.396", "37764.25")],
}
BRACKETS["SurvivingSpouse"] = BRACKETS["MarriedJoint"]


def tcja(year):
    return 2018 <= year <= 2025


def standard_deduction(year, status):
    other = 12000 if tcja(year) else 3000
    hoh = 18000 if tcja(year) else 4400
    return {"MarriedJoint": 2 * other, "SurvivingSpouse": 2 * other,
            "HeadOfHousehold": hoh, "Single": other, "MarriedSeparate": other}[status]


def money(v):
    s = str(v)
    if "." not in s:
        s += ".00"
    whole, frac = s.split(".")
    return whole + "." + (frac + "00")[:max(2, len(frac))]


def main():
    first, last = 2000, 2030
    out = {"brackets": {}, "standard_deduction": {}, "exemption": {}}
    for year in range(first, last + 1):
        y = str(year)
        out["brackets"][y] = {
            status: [{"lower": money(lo), "rate": rate, "base": money(base)}
                     for lo, rate, base in table]
            for status, table in BRACKETS.items()}
        out["standard_deduction"][y] = {
            status: money(standard_deduction(year, status)) for status in BRACKETS}
        out["exemption"][y] = money(0 if tcja(year) else 2000)
    json.dump(out, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
