"""Global numerics configuration shared by all modules."""
from dataclasses import dataclass


@dataclass
class Numerics:
    norm_tol: float = 1e-10        # state-norm / trace validation
    herm_tol: float = 1e-12        # Hermiticity validation
    psd_clip: float = 1e-10        # negative-eigenvalue clamp for density matrices
    entropy_floor: float = 1e-14   # eigenvalues below this contribute 0 to entropy
    grid_norm_tol: float = 1e-8    # discrete L2 norm tolerance for grid wavefunctions
    zero_overlap: float = 1e-24    # |<phi|psi>|^2 below this is a forbidden transition


NUMERICS = Numerics()
