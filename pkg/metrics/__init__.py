"""Metrics, experiment drivers and reports for simulated users."""

from .log_parser import AuditLogParser
from .report import MetricsReport
from .runner import AblationRunner

__all__ = ['AuditLogParser', 'MetricsReport', 'AblationRunner']
