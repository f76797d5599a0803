"""Root-LDPC codes for two-block fading channels: construction, decoding, DE and outage."""

__version__ = "0.1.0"
