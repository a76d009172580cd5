"""Cross-boundary parity: bindings episodes vs runner trajectory files.

The runner serializes every float with repr (exact round-trip), so a bindings
replay of the same (config, seed, action sequence) must reproduce the file's
observations and rewards byte-for-byte after identical serialization.
"""

from dataclasses import dataclass, field


@dataclass
class ParityReport:
    matches: bool
    first_divergence: int = -1
    details: list = field(default_factory=list)


def _serialize(values):
    return ",".join(repr(float(v)) for v in values)


def parity_check(env, trajectory_csv, seed):
    """Replay the trajectory file's actions through a bindings env.

    Works on 1D trajectories (full state per row). Returns a ParityReport;
    ``matches`` is True when every observation and reward reproduces the file
    bytes exactly.
    """
    with open(trajectory_csv) as fh:
        lines = fh.read().strip().split("\n")
    rows = [line.split(",") for line in lines[1:]]

    obs, _ = env.reset(seed=seed)
    report = ParityReport(matches=True)
    if _serialize(obs) != ",".join(rows[0][3:]):
        report.matches = False
        report.first_divergence = 0
        report.details.append("initial observation differs")
        return report

    for k, row in enumerate(rows[1:], start=1):
        action = float(row[1])
        obs, reward, terminated, truncated, _ = env.step([action])
        ok_obs = _serialize(obs) == ",".join(row[3:])
        ok_reward = repr(float(reward)) == row[2]
        if not (ok_obs and ok_reward):
            report.matches = False
            report.first_divergence = k
            if not ok_obs:
                report.details.append(f"step {k}: observation differs")
            if not ok_reward:
                report.details.append(
                    f"step {k}: reward {reward!r} vs file {row[2]}")
            return report
        if terminated or truncated:
            break
    return report
