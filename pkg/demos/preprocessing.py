"""
From fundus photograph to a 768-bin feature vector
==================================================

Crop the retina to a square around the image center, resize it, find the
black corners, tone-map the retina and count per-channel intensities.
A synthetic fundus image stands in for a real photograph.
"""

import numpy as np

from retina_et import features, imaging, synthetic

# a 120-pixel disc on a black background, with the top rows cut off
img = synthetic.fundus_image(size=160, radius=70, crop_rows=12, seed=1)
print("input", img.shape)

square, region = imaging.crop_retina(img)
print("crop region", region.bounds, "side", region.side)

# nearest keeps exact zeros, so the black-corner test still works
small = imaging.resize(square, 64)
mask = imaging.compute_retina_mask(small)
print(f"retina covers {mask.mean():.1%} of the square")

mapped = imaging.tone_map(small, mask)
hist = features.masked_histogram(mapped, mask)
for name, block in zip("RGB", hist.reshape(3, 256)):
    print(name, "pixels", block.sum(), "modal value", int(np.argmax(block)))

# the one-call version does the same thing
cfg = features.PipelineConfig(resize_side=64)
assert np.array_equal(features.extract_features(img, cfg), hist)

# rotating the square only moves pixels around, so the histogram is unchanged
for angle, rot in zip((90, 180, 270), imaging.rotate_augment(small)):
    same = np.array_equal(features.square_features(rot, cfg), hist)
    print(f"rotated {angle}: identical features {same}")
