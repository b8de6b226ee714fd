"""ddaudit: audits clinical code assignments against discharge-summary text."""

__version__ = "0.1.0"
