"""Reduced two-dimensional channel solver with an elastic lid."""
from .core import (
    AuditReport,
    ChannelData,
    ContactEvent,
    ContactReport,
    SimConfig,
    SimState,
    Simulator,
    Status,
    TimeSeries,
    Unstable,
    certify_channel,
    contact_monitor,
    energy_audit,
    run,
    step,
)
from ._linalg import SolverFailure

__all__ = [
    "AuditReport",
    "ChannelData",
    "ContactEvent",
    "ContactReport",
    "SimConfig",
    "SimState",
    "Simulator",
    "SolverFailure",
    "Status",
    "TimeSeries",
    "Unstable",
    "certify_channel",
    "contact_monitor",
    "energy_audit",
    "run",
    "step",
]
