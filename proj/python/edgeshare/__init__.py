"""Edge/cloud identity ledger, quasigroup secret splitting and simulation."""

from ._edgeshare import (
    BloomFilter,
    EdgeNode,
    EdgeshareError,
    Quasigroup,
    builtin_scenarios,
    combine_shares,
    decode_secret,
    detect_outliers,
    encode_secret,
    fit_distribution,
    is_latin_square,
    is_on_curve,
    run_scenario,
    sha256,
    split_secret,
    verify_snapshot,
)

__all__ = [
    "BloomFilter",
    "EdgeNode",
    "EdgeshareError",
    "Quasigroup",
    "builtin_scenarios",
    "combine_shares",
    "decode_secret",
    "detect_outliers",
    "encode_secret",
    "fit_distribution",
    "is_latin_square",
    "is_on_curve",
    "run_scenario",
    "sha256",
    "split_secret",
    "verify_snapshot",
]
