"""Network simulation: scenario configs, the event engine, latency models and run metrics."""

from .config import (ConfigInvalid, MinerSpec, SelfishLead, SimConfig, StrategyKind, StrategySpec, format_config,
                     load_config, parse_config)
from .engine import Simulation, run_matrix, run_scenario, run_seeds
from .latency import HIGH, LOW, MEDIUM, LatencyFamily, LatencyModel
from .metrics import CSV_COLUMNS, RunMetrics, csv_text, write_csv
