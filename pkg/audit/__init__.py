"""Audit trail for simulation runs."""

from audit.logger import AuditLog, configure, log_path
