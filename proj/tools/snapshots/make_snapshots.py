#!/usr/bin/env python3
"""Produce injection snapshots for the bundled PGLib cases.

DC snapshots come from a DC-OPF (quadratic generator costs, |f| <= rateA with
f = (theta_i - theta_j) / x, taps ignored) so they agree with the lossless
model used by `tpart`.  AC snapshots come from the PYPOWER AC-OPF.

The output is the per-unit snapshot JSON read by `tpart` (schema version 1).

    python3 tools/snapshots/make_snapshots.py --out data/snapshots
"""

import argparse
import json
import math
import pathlib
import re

import cvxpy as cp
import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[2]

CASES = {
    "ieee30": ("pglib_opf_case30_ieee.m", ("dc", "ac")),
    "epri39": ("pglib_opf_case39_epri.m", ("dc", "ac")),
    "ieee73": ("pglib_opf_case73_ieee_rts.m", ("dc", "ac")),
    "ieee118": ("pglib_opf_case118_ieee.m", ("dc", "ac")),
    "goc179": ("pglib_opf_case179_goc.m", ("dc",)),
    "activ200": ("pglib_opf_case200_activ.m", ("dc", "ac")),
    "ieee300": ("pglib_opf_case300_ieee.m", ("dc",)),
    "goc500": ("pglib_opf_case500_goc.m", ("dc",)),
}


def parse_case(text):
    base = float(re.search(r"mpc\.baseMVA\s*=\s*([0-9.eE+-]+)", text).group(1))
    tables = {}
    for name in ("bus", "gen", "branch", "gencost"):
        m = re.search(r"mpc\.%s\s*=\s*\[(.*?)\];" % name, text, re.S)
        rows = []
        for line in m.group(1).splitlines():
            line = line.split("%")[0].strip().rstrip(";").strip()
            if line:
                rows.append([float(v) for v in line.split()])
        tables[name] = np.array(rows)
    return base, tables


def bus_index(bus):
    return {int(b): k for k, b in enumerate(bus[:, 0])}


def dc_opf(base, t):
    bus, gen, branch, cost = t["bus"], t["gen"], t["branch"], t["gencost"]
    idx = bus_index(bus)
    n = len(bus)
    on_gen = gen[:, 7] > 0
    on_br = branch[:, 10] > 0
    g = np.flatnonzero(on_gen)
    br = branch[on_br]
    pg = cp.Variable(len(g))
    th = cp.Variable(n)
    fr = np.array([idx[int(b)] for b in br[:, 0]])
    to = np.array([idx[int(b)] for b in br[:, 1]])
    bsus = 1.0 / np.abs(br[:, 3])
    flow = cp.multiply(bsus, th[fr] - th[to])
    inc = np.zeros((n, len(br)))
    inc[fr, np.arange(len(br))] = 1.0
    inc[to, np.arange(len(br))] = -1.0
    gmap = np.zeros((n, len(g)))
    for col, k in enumerate(g):
        gmap[idx[int(gen[k, 0])], col] = 1.0
    pd = bus[:, 2] / base
    slack = [k for k in range(n) if int(bus[k, 1]) == 3][0]
    cons = [inc @ flow == gmap @ pg - pd, th[slack] == 0,
            pg >= gen[g, 9] / base, pg <= gen[g, 8] / base]
    rate = br[:, 5] / base
    lim = rate > 0
    cons.append(cp.abs(flow[np.flatnonzero(lim)]) <= rate[lim])
    # gencost model 2: c2 P^2 + c1 P + c0 with P in MW
    c2 = cost[g, 4] * base * base
    c1 = cost[g, 5] * base
    obj = cp.Minimize(cp.sum(cp.multiply(c2, cp.square(pg))) + c1 @ pg)
    prob = cp.Problem(obj, cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    if prob.status != "optimal":
        raise RuntimeError("DC-OPF status %s" % prob.status)
    p = gmap @ pg.value - pd
    p -= p.mean()  # remove solver residue so sum(p) == 0
    f = bsus * (th.value[fr] - th.value[to])
    gamma = np.max(np.abs(f[lim]) / rate[lim])
    return p, np.zeros(n), None, gamma


def ac_opf(base, t):
    from pypower.api import ppoption, runopf

    ppc = {
        "version": "2",
        "baseMVA": base,
        "bus": t["bus"].copy(),
        "gen": t["gen"].copy(),
        "branch": t["branch"].copy(),
        "gencost": t["gencost"].copy(),
    }
    r = runopf(ppc, ppoption(VERBOSE=0, OUT_ALL=0))
    if not r["success"]:
        raise RuntimeError("AC-OPF failed")
    bus, gen = r["bus"], r["gen"]
    idx = bus_index(bus)
    n = len(bus)
    p = -bus[:, 2] / base
    q = -bus[:, 3] / base
    for row in gen:
        if row[7] > 0:
            k = idx[int(row[0])]
            p[k] += row[1] / base
            q[k] += row[2] / base
    return p, q, (bus[:, 7], bus[:, 8] * math.pi / 180.0, gen), None


def snapshot(name, fname, engine):
    text = (ROOT / "data" / "pglib" / fname).read_text()
    base, t = parse_case(text)
    bus, gen, branch = t["bus"], t["gen"], t["branch"]
    idx = bus_index(bus)
    if engine == "dc":
        p, q, volt, gamma = dc_opf(base, t)
        vm = bus[:, 7].copy()
        va = np.zeros(len(bus))
        gen_used = gen
    else:
        p, q, volt, gamma = ac_opf(base, t)
        vm, va, gen_used = volt

    qmin = np.zeros(len(bus))
    qmax = np.zeros(len(bus))
    has_gen = np.zeros(len(bus), dtype=bool)
    for row in gen_used:
        if row[7] > 0:
            k = idx[int(row[0])]
            has_gen[k] = True
            qmin[k] += row[4] / base
            qmax[k] += row[3] / base
    qmin -= bus[:, 3] / base
    qmax -= bus[:, 3] / base

    buses = []
    for k, row in enumerate(bus):
        btype = int(row[1])
        if btype == 2 and not has_gen[k]:
            btype = 1
        entry = {
            "id": int(row[0]),
            "type": btype,
            "p": float(p[k]),
            "q": float(q[k]),
            "vm": float(vm[k]),
            "va": float(va[k]),
            "gs": float(row[4] / base),
            "bs": float(row[5] / base),
        }
        if has_gen[k]:
            entry["qmin"] = float(qmin[k])
            entry["qmax"] = float(qmax[k])
        buses.append(entry)

    lines = []
    for k, row in enumerate(branch):
        rate = row[5]
        tap = row[8] if row[8] != 0 else 1.0
        lines.append({
            "id": k + 1,
            "from": int(row[0]),
            "to": int(row[1]),
            "r": float(row[2]),
            "x": float(row[3]),
            "b": float(1.0 / abs(row[3])),
            "charging": float(row[4]),
            "tap": float(tap),
            "shift": float(row[9] * math.pi / 180.0),
            "c": float(rate / base) if rate > 0 else 0.0,
            "unlimited": bool(rate <= 0),
            "status": int(row[10]),
        })
    prov = "%s-OPF on %s (PGLib-OPF v23.07)" % (engine.upper(), fname)
    return {
        "schema_version": 1,
        "name": name,
        "base_mva": base,
        "provenance": prov,
        "buses": buses,
        "lines": lines,
    }, gamma


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(ROOT / "data" / "snapshots"))
    ap.add_argument("cases", nargs="*")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (fname, engines) in CASES.items():
        if args.cases and name not in args.cases:
            continue
        for engine in engines:
            snap, gamma = snapshot(name, fname, engine)
            path = out / ("%s_%s.json" % (name, engine))
            path.write_text(json.dumps(snap, indent=1) + "\n")
            extra = "" if gamma is None else "  gamma(DC)=%.9f" % gamma
            print("%s  n=%d m=%d%s" % (path.name, len(snap["buses"]), len(snap["lines"]), extra))


if __name__ == "__main__":
    main()
