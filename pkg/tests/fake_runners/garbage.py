"""Stub child: violates the line protocol."""
import sys

sys.stdin.read()
print("this is not a protocol line")
