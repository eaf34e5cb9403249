"""Dynamic range majority/minority indexes over mutable sequences."""

from .bench import bench, bench_many, generate_text, space_report
from .bitvector import DynamicBitvector
from .document import Document
from .errors import MajMinError
from .majority import MajorityIndex
from .minority import MinorityIndex
from .oracle import brute_majorities, brute_minority, entropy
from .sequence import DynamicSequence
from .static import (
    StaticMajorityIndex,
    StaticMinorityIndex,
    load_snapshot,
    save_snapshot,
    snapshot_bytes,
    snapshot_from_bytes,
)
from .workload import run_workload_files

__version__ = "0.1.0"

__all__ = [
    "Document",
    "DynamicBitvector",
    "DynamicSequence",
    "MajMinError",
    "MajorityIndex",
    "MinorityIndex",
    "StaticMajorityIndex",
    "StaticMinorityIndex",
    "bench",
    "bench_many",
    "brute_majorities",
    "brute_minority",
    "entropy",
    "generate_text",
    "load_snapshot",
    "run_workload_files",
    "save_snapshot",
    "snapshot_bytes",
    "snapshot_from_bytes",
    "space_report",
    "__version__",
]
