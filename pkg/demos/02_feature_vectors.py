"""From components to the 8-ratio feature vector, and how centering treats it.

Run:  python3 demos/02_feature_vectors.py
"""

import numpy as np

from sketchmatch import FEATURE_NAMES, Config, analyze, center
from sketchmatch.features import measure
from sketchmatch.synthetic import make_corpus

np.set_printoptions(precision=4, suppress=True)
pairs = make_corpus(5, seed=2)

# %% raw pixel measurements for one face
cs, _ = analyze(pairs[0].photo, "photo")
meas = measure(cs, "photo", Config())
for field, value in vars(meas).items():
    print(f"{field:<17} {value}")

# %% ratios: photo vs sketch of the same identity should nearly coincide
print(f"\n{'feature':<12} {'photo':>8} {'sketch':>8}")
_, vp = analyze(pairs[0].photo, "photo")
_, vs = analyze(pairs[0].sketch, "sketch")
for name, p, s in zip(FEATURE_NAMES, vp, vs):
    print(f"{name:<12} {p:8.4f} {s:8.4f}")

# %% ...and differ from another identity
_, other = analyze(pairs[1].photo, "photo")
print("\n|photo - sketch|, same id :", np.linalg.norm(vp - vs).round(4))
print("|photo - photo|, other id:", np.linalg.norm(vp - other).round(4))

# %% per-vector centering subtracts each vector from its own mean
phi = center(vp)
print("\ncentered:", phi, " mean", phi.mean().round(15))

# the sign convention is irrelevant for nearest-neighbour distances
print("same distance either sign:",
      np.isclose(np.linalg.norm(center(vp) - center(vs)), np.linalg.norm(-center(vp) + center(vs))))

# %% grand-mean centering uses one gallery mean for everything
gallery = np.array([analyze(p.photo, "photo")[1] for p in pairs])
psi = gallery.mean(axis=0)
print("gallery mean:", psi)
print("probe centered with the gallery mean:", center(vs, "grand-mean", psi))
