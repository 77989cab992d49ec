"""String-feature removal and NOP specialization of malware samples, with
before/after size and multi-engine detection measurement."""

__version__ = "0.1.0"
