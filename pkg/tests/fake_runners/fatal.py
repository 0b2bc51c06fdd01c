"""Stub child: reports a fatal load failure."""
import json, sys

sys.stdin.read()
sys.stdout.write(json.dumps({"index": -1, "status": "error", "message": "boom at import", "times": []}) + "\n")
