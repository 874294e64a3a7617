"""Adapter-specific failure type."""


class AdapterError(RuntimeError):
    """Configuration or model problem the adapter cannot work around."""
