import numpy as np

from scf420.pixelio import Image420


def few_color_420(rng, h, w, n_colors=3):
    """Random 4:2:0 image whose samples come from a handful of colours."""
    ys = rng.integers(0, 256, n_colors)
    cs = rng.integers(0, 256, (n_colors, 2))
    y = ys[rng.integers(0, n_colors, (h, w))].astype(np.uint8)
    idx = rng.integers(0, n_colors, (h // 2, w // 2))
    return Image420(y, cs[idx, 0].astype(np.uint8), cs[idx, 1].astype(np.uint8))


# filled by test_acceptance, printed in the terminal summary
ACCEPTANCE_LINES: list = []
