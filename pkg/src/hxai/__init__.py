"""hxai: black-box model auditing with causal rating metrics, automatic
random/biased baselines, and post-hoc explainers, behind a CLI and an HTTP
workbench API."""

__version__ = "0.1.0"
