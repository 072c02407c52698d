# Copyright 2026 The nvtwin Authors
# SPDX-License-Identifier: Apache-2.0
"""Node-array simulator, toolchain and performance model."""

from ._nvtwin import (
    AddressSpaceExceeded,
    BootImageError,
    CapacityError,
    ConfigError,
    ContractError,
    Error,
    HostIoError,
    IncompleteSpec,
    NetlistError,
    ProtocolError,
    adjusted_power_mw,
    assemble,
    canonical_netlist,
    chip_current_ma,
    compare_report_csv,
    disassemble,
    efficiency_tops_per_w,
    golden_checks,
    peak_bandwidth_gb_s,
    peak_bandwidth_gib_s,
    plan_chips,
    simulate,
    utilization,
    validate,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
