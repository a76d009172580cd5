"""Partial observation and sensor noise.

The environments expose four 1D sensing modes -- the full state, the
collocated boundary reading at the actuated end, and the anti-collocated
value or slope at the opposite end -- plus optional Gaussian sensor noise.
Noise perturbs observations only; the dynamics below are identical across
all runs here (same seed, same actions).

Run:  python demos/sensing_and_noise.py
"""

import numpy as np

from pdectl import BoundaryControlEnv, InitialCondition, config

BASE = {
    "grid": {"nx": 101},
    "episode": {"horizon": 0.5, "dt_control": 0.01, "dt_pde": 1e-4,
                "action_lo": -20.0, "action_hi": 20.0, "blowup_threshold": 1e4},
}

ramp = InitialCondition(kind="profile", profile=np.linspace(0.0, 2.0, 101))

print("mode                     | obs size | first observation")
print("-" * 64)
for mode in ("full-state", "collocated", "anti-collocated-value",
             "anti-collocated-gradient"):
    cfg = config.transport_benchmark(**BASE, sensing={"mode": mode})
    env = BoundaryControlEnv(cfg)
    obs = env.reset(0, initial=ramp)
    head = np.array2string(obs[:3], precision=3)
    print(f"{mode:<24} | {env.observation_size():>8} | {head}")

# Gaussian sensor noise is seeded by the reset seed: identical seeds give
# identical noisy observation streams, and sigma = 0 reproduces the clean one.
noisy_cfg = config.transport_benchmark(
    **BASE, sensing={"mode": "anti-collocated-value",
                     "noise": {"kind": "gaussian", "sigma": 0.05}})
env = BoundaryControlEnv(noisy_cfg)

print("\nnoisy anti-collocated readings under zero control (sigma = 0.05):")
for seed in (7, 7, 8):
    obs = env.reset(seed, initial=ramp)
    readings = [float(obs[0])]
    for _ in range(4):
        readings.append(float(env.step(0.0).observation[0]))
    print(f"seed {seed}: " + "  ".join(f"{r:+.4f}" for r in readings))
print("(the two seed-7 rows repeat exactly; seed 8 draws a fresh noise stream)")
