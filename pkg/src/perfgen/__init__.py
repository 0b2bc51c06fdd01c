"""perfgen: explore algorithms first, implement, verify synthetic tests
bidirectionally, and pick the candidate with the best checked pass rate."""

__version__ = "0.1.0"
