"""Stub child: never reports anything."""
import sys, time

sys.stdin.read()
time.sleep(3600)
