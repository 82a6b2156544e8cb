"""germlab: finite-dimensional Ito *-algebras, germ matrices of positive
definite stochastic processes, and their indefinite-metric dilations.

The package decides conditional positive definiteness of germ maps two
independent ways, constructs and verifies the dilation that factors a
valid germ through a block representation on a pseudo-Hilbert space, and
instantiates the classical (deterministic / diffusion / jump) cases with
Monte Carlo stochastic exponentials against closed-form means.
"""

__version__ = "0.1.0"

from .linalg import (
    Tolerance,
    DEFAULT_TOL,
    PsdReport,
    psd_check,
    kolmogorov_factor,
    nullspace_basis,
    solve_on_span,
)
from .ito_algebra import (
    ItoAlgebra,
    NoiseComponent,
    Quadruple,
    SemigroupElement,
    GnsData,
    canonical_algebra,
    quadruple_algebra,
    direct_sum,
    verify_axioms,
    ito_mul,
    star_product,
    gns_quadruple,
    quad_mul,
    quad_flat,
    random_algebra,
)
from .germ import (
    StarSemigroup,
    Representation,
    GermMap,
    PdVerdict,
    DissipatorGram,
    trivial_semigroup,
    cyclic_group,
    symmetric_group_s3,
    representation_germ,
    check_symmetry,
    conditional_pd,
    dissipator,
    dissipator_pd,
    sandwich,
    generate_germ,
    invalidate_germ,
    random_germ,
)
from .dilation import (
    Dilation,
    PseudoHilbert,
    dilate,
    verify_structure,
    assemble_pseudo_hilbert,
)
from .noise_sim import (
    NoisePath,
    KernelSample,
    sample_paths,
    ito_moment_check,
    stochastic_exponential_mc,
    kernel_gram,
    pd_kernel_check,
    semigroup_germ_check,
)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
