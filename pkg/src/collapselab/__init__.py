"""collapselab: a desk-scale stochastic quantum-dynamics laboratory.

Alternating unitary evolution and Born-rule collapse, with the quantitative
sub-models built on that loop: time-dependent perturbation theory, gas
thermalization, photon-screen collapse, classical-limit diagnostics, a
finite information calculus, and black-hole thermodynamics.
"""

__version__ = "0.1.0"
