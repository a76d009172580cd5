"""Reaction-diffusion benchmark walkthrough.

u_t = u_xx + lam(x) u with lam(x) = 50 cos(8 arccos x) is open-loop unstable
(the reaction term out-runs diffusion); the boundary input at x = 1 is the
only actuator. The backstepping law U(t) = int k(1,y) u(y) dy needs the
kernel of a Goursat problem on the triangle, solved here by successive
approximations in characteristic coordinates.

Run:  python demos/reaction_diffusion_stabilization.py
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pdectl import BoundaryControlEnv, InitialCondition, config
from pdectl.runner import BacksteppingController

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cfg = config.reaction_diffusion_benchmark()
env = BoundaryControlEnv(cfg)
controller = BacksteppingController(env)
print(f"kernel solved in {controller.kernel.iterations} sweeps, "
      f"fixed-point residual {controller.kernel.residual:.1e}, "
      f"interior PDE defect {controller.kernel.pde_residual:.2e}")

histories = {}
for label, use_feedback in (("backstepping", True), ("open loop", False)):
    obs = env.reset(0, initial=InitialCondition(kind="constant", value=10.0))
    t, norms = [0.0], [env.state_norm()]
    for _ in range(env.n_steps):
        a = controller(env.time, obs) if use_feedback else 0.0
        out = env.step(a)
        obs = out.observation
        t.append(out.info["t"])
        norms.append(out.info["l2_norm"])
        if out.terminated or out.truncated:
            break
    histories[label] = (t, norms)
    print(f"{label}: summed L2 {sum(norms):.1f}, final L2 {norms[-1]:.3e}")

fig, ax = plt.subplots(figsize=(6, 3.6))
for label, (t, norms) in histories.items():
    ax.semilogy(t, norms, label=label)
ax.set(xlabel="t [s]", ylabel="state L2 norm (euclidean)",
       title="reaction-diffusion: closed vs open loop, u(x,0)=10")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "reaction_diffusion_stabilization.png", dpi=130)
print(f"figure saved to {OUT / 'reaction_diffusion_stabilization.png'}")
