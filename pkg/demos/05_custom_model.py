"""Load another atlas from YAML: the projective plane with its three charts."""
from pathlib import Path

from flagclean import criterion, evaluate_clean, load_model, verify_cocycles

model = load_model(Path(__file__).with_name("plane.yaml"))
print("criterion:", criterion(model).formatted())
print("cocycles ok:", verify_cocycles(model).ok)
print("clean at m1 = 1/3, m2 = 1/2:", evaluate_clean(model, {"m1": "1/3", "m2": "1/2"}).clean)
print("clean at m1 = 1/3, m2 = 2/3:", evaluate_clean(model, {"m1": "1/3", "m2": "2/3"}).clean)
