import dataclasses
import time

import numpy as np
import pytest

from swift_sim import ExperimentConfig, run_experiment
from swift_sim.gamp import GampConfig


def small_config(**overrides) -> ExperimentConfig:
    """Down-scaled experiment used by the fast harness tests."""
    base = dict(
        mode="single_user",
        n_bs=8,
        n_ue=4,
        r_bs=2,
        r_ue=2,
        expected_paths=2.0,
        t_u=2,
        t_max=16,
        t_c=(40,),
        trials=3,
        master_seed=11,
        snr_grid_db=(0.0, 12.0),
        schemes=("swift-fpa", "fnrb-8"),
        gamp=GampConfig(max_iterations=10),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


@dataclasses.dataclass
class TimedResult:
    result: object
    seconds: float


def timed_run(cfg: ExperimentConfig) -> TimedResult:
    t0 = time.perf_counter()
    result = run_experiment(cfg)
    return TimedResult(result=result, seconds=time.perf_counter() - t0)


def rows_by(result, scheme: str, metric: str) -> dict:
    """{sweep_value: (mean, stderr)} for one scheme/metric."""
    return {
        r.sweep_value: (r.mean, r.stderr)
        for r in result.rows
        if r.scheme == scheme and r.metric == metric
    }


@pytest.fixture(scope="session")
def figure_sweep() -> TimedResult:
    """The shared single-user sweep behind the measurement-count and
    effective-rate acceptance trends: full-size system, paired trials,
    every scheme the two checks need."""
    cfg = ExperimentConfig(
        mode="single_user",
        trials=300,
        master_seed=7,
        snr_grid_db=(-20.0, -12.0, -4.0, 4.0, 12.0, 20.0),
        schemes=("swift-fpa", "swift-pepa", "es", "fnrb-20", "fnrb-40", "fnrb-60", "fnrb-128"),
    )
    return timed_run(cfg)


_acceptance_log: list = []


def summarize(name: str, checks) -> None:
    """One visible pass/fail line per acceptance criterion; fails the test
    if any sub-check failed.  Lines are replayed in the terminal summary so
    they survive pytest's output capturing."""
    failed = [msg for ok, msg in checks if not ok]
    status = "PASS" if not failed else "FAIL"
    lines = [f"[acceptance] {name}: {status}"]
    lines += [f"  {'ok ' if ok else 'BAD'} {msg}" for ok, msg in checks]
    _acceptance_log.extend(lines)
    print("\n" + "\n".join(lines))
    assert not failed, f"{name}: {len(failed)} failed check(s): " + "; ".join(failed)


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    if _acceptance_log:
        terminalreporter.section("acceptance summary")
        for line in _acceptance_log:
            terminalreporter.write_line(line)
