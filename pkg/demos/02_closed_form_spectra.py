"""Output spectra of the Werner-Holevo pair on Schmidt-form inputs.

The nine eigenvalues come from a closed form: six values from the Schmidt
coefficients directly, plus three roots of a cubic in trigonometric form.
Here we compare that formula against a dense eigendecomposition.
"""

import numpy as np

from addlab.channels import apply_pure, tensor, werner_holevo
from addlab.linalg import eig_hermitian
from addlab.wh_spectra import schmidt_state, wh3_pair_spectrum

pair = tensor(werner_holevo(3), werner_holevo(3))
for schmidt in [(1.0, 0.0, 0.0), (0.5, 0.5, 0.0), (0.6, 0.3, 0.1), (1 / 3, 1 / 3, 1 / 3)]:
    closed = wh3_pair_spectrum(schmidt).values
    dense = eig_hermitian(apply_pure(pair, schmidt_state(schmidt)))[0]
    print(f"schmidt {np.round(schmidt, 4)}")
    print(f"  closed form: {np.round(closed, 6)}")
    print(f"  max deviation from dense eigensolver: {np.abs(closed - dense).max():.1e}")
