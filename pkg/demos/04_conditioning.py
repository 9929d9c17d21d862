"""How resolvent smoothing conditions the descent: track the relative
condition number for every gradient order along one minimization run.

Writes a CSV with both the norm-consistent (rooted) and the un-rooted
variants of the condition number, and a PNG plot if matplotlib is around.

Run:  python demos/04_conditioning.py
"""

from pathlib import Path

import numpy as np

import nsinpaint as ns

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

data = np.full((64, 64), 51 / 255)
data[29, :] = 140 / 255
data[34, :] = 140 / 255
data[30:34, :] = 1.0
mask = np.zeros((64, 64), dtype=bool)
mask[24:40, 24:40] = True
image = ns.GrayImage(np.where(mask, 128 / 255, data))

domain = ns.extract_domain(image, mask)
ops = ns.build_operators(domain)
fact = ns.factor_preconditioner(domain)
init = ns.harmonic_init(image, domain, ns.SolverConfig())

rooted, unrooted = [], []


def collect(n, u0, state, g_el):
    if state.energy <= 0.0:
        return
    rep_r = ns.condition_report(n, u0, g_el, fact, state.energy)
    rep_u = ns.condition_report(n, u0, g_el, fact, state.energy, unrooted=True)
    rooted.append([n] + [rep_r.kappa_rel[k] for k in (0, 1, 2, 3)])
    unrooted.append([n] + [rep_u.kappa_rel[k] for k in (0, 1, 2, 3)])


cfg = ns.SolverConfig(gradient_kind=ns.GradientKind.sobolev(1), iterate_callback=collect)
out, trace, stop = ns.minimize(init, domain, ops, fact, cfg)
print(f"h1 run: {trace.iterations} iterations, stop = {stop.value}")

r0 = rooted[0]
print("condition numbers at the first iterate (rooted):")
for k, v in zip(("el", "h1", "h2", "h3"), r0[1:]):
    print(f"  {k}: {v:9.3f}")
print(f"reduction el -> h3: {r0[1] / r0[4]:.1f}x")

csv_path = OUT / "conditioning.csv"
with open(csv_path, "w", newline="") as fh:
    fh.write("iter,k0,k1,k2,k3,k0_unrooted,k1_unrooted,k2_unrooted,k3_unrooted\n")
    for rr, ru in zip(rooted, unrooted):
        row = [rr[0]] + rr[1:] + ru[1:]
        fh.write(",".join(f"{v:.10g}" for v in row) + "\n")
print(f"wrote {csv_path}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    arr = np.array(unrooted)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for col, label in zip(range(1, 5), ("el", "h1", "h2", "h3")):
        ax.semilogy(arr[:, 0], arr[:, col], label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel("relative condition number (un-rooted)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(OUT / "conditioning.png", dpi=120)
    print(f"wrote {OUT / 'conditioning.png'}")
except ImportError:
    print("matplotlib not installed; skipped the plot")
