"""t2r: natural-language task instructions to executable dense-reward
programs, trained policies, and an interactive feedback loop."""

__version__ = "0.1.0"
