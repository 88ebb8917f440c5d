"""Filter feature selection and random-forest evaluation for flow-based DDoS detection."""

__version__ = "0.1.0"
