"""Walk one synthetic face through component extraction.

Run:  python3 demos/01_component_extraction.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np

from sketchmatch import Config, extract_all
from sketchmatch.geometry import find_face_rows
from sketchmatch.morphology import extract_face_region
from sketchmatch.raster import mask_to_gray, save_image
from sketchmatch.synthetic import make_corpus

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(parents=True, exist_ok=True)

# %% one photo/sketch pair from the procedural corpus
pair = make_corpus(1, seed=0)[0]
print("identity:", pair.face.identity)
save_image(out / "photo.pgm", pair.photo)
save_image(out / "sketch.pgm", pair.sketch)

# %% face region: Otsu binarization, close/open with a radius-2 disk,
# largest 4-connected blob, holes filled
fr = extract_face_region(pair.photo)
save_image(out / "face_mask.pgm", mask_to_gray(fr.mask))
print(f"face area {fr.area} px of {fr.mask.size}")

# %% the two anchor rows everything else hangs off
rows = find_face_rows(fr, Config().model)
print("eye-ball row", rows.eye_ball_row, " mid-lip row", rows.mid_lip_row)

# %% full extraction; compare every box with the generator's ground truth
for modality, img in (("photo", pair.photo), ("sketch", pair.sketch)):
    cs = extract_all(img, Config(), modality)
    print(f"\n{modality}")
    for name, truth in pair.truth.items():
        comp = cs.nose_actual if name == "nose" else getattr(cs, name)
        print(f"  {name:<11} predicted {str(comp.rect):<16} truth {str(truth):<16} IoU {comp.rect.iou(truth):.2f}")
        save_image(out / f"{modality}.{name}.pgm", comp.image)

# photo and sketch share geometry, so their boxes should agree
a = extract_all(pair.photo).components()
b = extract_all(pair.sketch).components()
same = sum(a[k].rect == b[k].rect for k in a)
print(f"\n{same} of {len(a)} boxes identical between photo and sketch")
print("nose rows kept after the nostril search:", a["nose_actual"].rect.rows, "of", a["nose_predicted"].rect.rows)
print("sub-images written to", out)
assert np.array_equal(fr.mask, extract_face_region(pair.photo).mask)
