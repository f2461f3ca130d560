#include "plot_scripts.hpp"

#include <stdexcept>

namespace tlsdd::cli {

namespace {

constexpr const char* kHeader = R"py(#!/usr/bin/env python3
# Generated by tlsdd. Reads the CSV next to this script and writes a PNG.
import csv
import os
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    with open(os.path.join(HERE, name), newline="") as f:
        rows = list(csv.DictReader(f))
    return [{k: float(v) for k, v in r.items()} for r in rows]


)py";

constexpr const char* kChevron = R"py(rows = load("swap_spectroscopy.csv")
xs = sorted({r["dphi_uPhi0"] for r in rows})
ys = sorted({r["tau1_ns"] for r in rows})
grid = [[0.0] * len(xs) for _ in ys]
for r in rows:
    grid[ys.index(r["tau1_ns"])][xs.index(r["dphi_uPhi0"])] = r["p_excited"]
fig, ax = plt.subplots(figsize=(6, 4))
mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="viridis")
fig.colorbar(mesh, ax=ax, label="P(qubit excited)")
ax.set_xlabel("flux detuning (uPhi0)")
ax.set_ylabel("tau1 (ns)")
fig.tight_layout()
fig.savefig(os.path.join(HERE, "swap_spectroscopy.png"), dpi=150)
)py";

constexpr const char* kEcho = R"py(rows = load("echo.csv")
traces = defaultdict(list)
for r in rows:
    traces[int(r["n_refocus"])].append((r["tau2_ns"], r["visibility"], r["stderr"]))
fig, ax = plt.subplots(figsize=(6, 4))
for n, pts in sorted(traces.items()):
    pts.sort()
    ax.errorbar([p[0] for p in pts], [p[1] for p in pts], yerr=[p[2] for p in pts],
                marker="o", ms=3, label=f"N = {n}")
ax.set_xlabel("tau2 (ns)")
ax.set_ylabel("visibility")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, "echo.png"), dpi=150)
)py";

constexpr const char* kCalibration = R"py(rows = load("calibrate_refocus.csv")
xs = sorted({r["tau_refocus_ns"] for r in rows})
ys = sorted({r["tau2_ns"] for r in rows})
grid = [[0.0] * len(xs) for _ in ys]
for r in rows:
    grid[ys.index(r["tau2_ns"])][xs.index(r["tau_refocus_ns"])] = r["visibility"]
fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
if len(ys) > 1:
    mesh = ax0.pcolormesh(xs, ys, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax0, label="visibility")
    ax0.set_ylabel("tau2 (ns)")
mean = [sum(grid[j][i] for j in range(len(ys))) / len(ys) for i in range(len(xs))]
ax1.plot(xs, mean, marker="o", ms=3)
ax1.set_xlabel("refocusing pulse length (ns)")
ax1.set_ylabel("mean visibility")
fig.tight_layout()
fig.savefig(os.path.join(HERE, "calibrate_refocus.png"), dpi=150)
)py";

constexpr const char* kCp = R"py(rows = load("cp_sequence.csv")
traces = defaultdict(list)
for r in rows:
    traces[(r["dphi_uPhi0"], int(r["N"]))].append((r["t_ns"], r["visibility"]))
fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(11, 4))
for (dphi, n), pts in sorted(traces.items()):
    pts.sort()
    ax0.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ms=2, label=f"{dphi:g} uPhi0, N = {n}")
ax0.set_xlabel("total time (ns)")
ax0.set_ylabel("visibility")
ax0.legend(fontsize=6)
fits = load("cp_sequence_fits.csv")
by_n = defaultdict(list)
for r in fits:
    by_n[int(r["N"])].append((r["dphi_uPhi0"], r["t_e_ns"]))
for n, pts in sorted(by_n.items()):
    pts.sort()
    ax1.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ls="", label=f"N = {n} fit")
pred_path = os.path.join(HERE, "predict.csv")
if os.path.exists(pred_path):
    pred = defaultdict(list)
    for r in load("predict.csv"):
        pred[int(r["N"])].append((r["dphi_uPhi0"], r["t_e_ns"]))
    for n, pts in sorted(pred.items()):
        pts.sort()
        ax1.plot([p[0] for p in pts], [p[1] for p in pts], ls="-", lw=1)
ax1.set_xlabel("flux detuning (uPhi0)")
ax1.set_ylabel("T_e (ns)")
ax1.set_yscale("log")
ax1.legend(fontsize=6)
fig.tight_layout()
fig.savefig(os.path.join(HERE, "cp_sequence.png"), dpi=150)
)py";

}  // namespace

std::string plot_script(const std::string& protocol) {
  std::string body;
  if (protocol == "swap_spectroscopy") {
    body = kChevron;
  } else if (protocol == "echo") {
    body = kEcho;
  } else if (protocol == "calibrate_refocus") {
    body = kCalibration;
  } else if (protocol == "cp_sequence") {
    body = kCp;
  } else {
    throw std::invalid_argument("plot_script: unknown protocol " + protocol);
  }
  return std::string(kHeader) + body + "\nif __name__ == \"__main__\" and \"--show\" in sys.argv:\n    plt.show()\n";
}

}  // namespace tlsdd::cli
