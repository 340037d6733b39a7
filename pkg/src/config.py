import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

DEFAULT_SIZE_CAP = 1 << 20
DEFAULT_MAX_ENTRIES = 1 << 24
DEFAULT_MAX_WORKERS = 4
DEFAULT_SEED = 20240501
DEFAULT_SERIES_DEGREE = 25


@dataclass
class AppConfig:
    size_cap: int
    max_entries: int
    max_workers: int
    seed: int
    series_degree: int
    output_root: Path
    debug: bool


def load_config() -> AppConfig:
    load_dotenv()

    try:
        max_workers = int(os.getenv("HLRANK_MAX_WORKERS", str(DEFAULT_MAX_WORKERS)))
    except ValueError:
        max_workers = DEFAULT_MAX_WORKERS
    max_workers = max(1, min(max_workers, 16))

    try:
        size_cap = int(os.getenv("HLRANK_SIZE_CAP", str(DEFAULT_SIZE_CAP)))
    except ValueError:
        size_cap = DEFAULT_SIZE_CAP
    size_cap = max(1, size_cap)

    try:
        max_entries = int(os.getenv("HLRANK_MAX_ENTRIES", str(DEFAULT_MAX_ENTRIES)))
    except ValueError:
        max_entries = DEFAULT_MAX_ENTRIES
    max_entries = max(1, max_entries)

    return AppConfig(
        size_cap=size_cap,
        max_entries=max_entries,
        max_workers=max_workers,
        seed=int(os.getenv("HLRANK_SEED", str(DEFAULT_SEED))),
        series_degree=max(0, int(os.getenv("HLRANK_SERIES_DEGREE", str(DEFAULT_SERIES_DEGREE)))),
        output_root=Path(os.getenv("HLRANK_OUTPUT_ROOT", "outputs")),
        debug=os.getenv("DEBUG", "false").lower() == "true",
    )
