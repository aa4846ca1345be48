"""Numerical toolkit for electromagnetic information theory.

Discretizes continuous channel and noise operators, counts degrees of freedom,
and evaluates Fredholm-determinant mutual information and water-filling capacity.
"""

from .errors import (DegenerateSpectrumError, EITError, GeometryError, IllConditionedNoiseError,
                     InvalidArgumentError, NoChannelError, NumericalError, ResolutionError,
                     ResolutionWarning, SingularityError, SizeError, UnsupportedOperationError,
                     ValidationError)
from .geometry import Quadrature, Region, halfwavelength_count, uniform_grid
from .kernels import (KernelSpec, WaveParams, dyadic_green, noise_kernel, scalar_green,
                      sinc_kernel)
from .operators import (DiscretizedOperator, SpectralResult, discretize, eig_hermitian,
                        fredholm_logdet, project_operator, svd_operator)

__version__ = "0.1.0"
