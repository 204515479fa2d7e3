"""Certification, dimensional analysis and a reduced simulator for plate-covered channels."""

__version__ = "0.1.0"
