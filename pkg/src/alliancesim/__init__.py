"""Deterministic simulator of status-sharing alliance networks.

Individuals hold a conserved status and a fixed number of outgoing alliance
links; each timestep shares status across links with an inequality split
and then rewires least-valued links at random.  The package adds leadership
metrics (episodes, turnover, degree distributions, phase labels), a seeded
sweep harness, and a CLI that emits reproducible CSV artifacts.
"""

from .errors import (AllianceSimError, ConfigError, InsufficientDataError,
                     InvalidParamsError, MissingLinkError)
from .metrics import (DegreeHistogram, LeaderEpisode, MetricsConfig, PhaseLabel,
                      PowerLawFit, RunSummary, StepRecord, StepRecords,
                      classify_phase, count_above, degree_histogram,
                      detect_episodes, fit_power_law, leader_of,
                      new_leader_count, replacement_lag, summarize_run)
from .model import (ModelParams, NetworkState, RewireEvent, incident_degree,
                    incident_degrees, init_network, link_value, rewire_step,
                    simulate, status_update, step)
from .rng import RngStream, splitmix64
from .runner import RunResult, StatusSnapshots, TrajectoryRecorder, run_recorded
from .sweep import SweepConfig, SweepResult, SweepRow, expand_grid, run_sweep

__version__ = "0.1.0"
