"""Exact marginal likelihoods for Poisson and gamma models via prior-mgf derivatives.

Observed Poisson counts (or known gamma shapes) set the order of an
integer (or Riemann-Liouville fractional, lower limit -inf) derivative of
the prior moment-generating function; evaluating that derivative at the
right point yields the marginal likelihood exactly, including under linear
couplings of the latent rates.  Every computation carries an independent
verification route (conjugate closed forms, Chib's identity, quadrature,
seeded Monte Carlo).
"""

from .errors import (ConfigError, ConsistencyError, DivergenceError,
                     DomainError, MgfMargError, NegativeRateRiskError,
                     NonIntegerShapeWithCouplingError,
                     NonPositiveConstantTermError, QuadratureError,
                     SeriesSizeError, ShapeMismatchError, TableFormatError,
                     UnsupportedFractionalError)
from .signedlog import ONE, ZERO, SignedLogReal
from .special import (exp_integral_E, exp_integral_E_quad, log_gamma,
                      log_negbin_pmf, log_poisson_pmf, upper_incomplete_gamma)
from .quadrature import LogQuadResult, log_quad, log_quad_semiinf
from .mgf import (ExponentialPrior, FracOrder, GammaPrior, ParetoPrior,
                  PointMass, PriorMgf, deriv_frac_mellin,
                  mellin_fractional_integral)
from .series import TruncatedSeries, mixed_partial
from .marginalize import (GammaProblem, MarginalResult, Path, PoissonProblem,
                          gamma_hier, gamma_integer, gamma_single,
                          poisson_hier, poisson_scaled, poisson_single)
from .models import (PUMP, CakeData, Link, PumpData, RegressionSpec,
                     build_gamma_hglm, build_poisson_identity_glmm,
                     build_poisson_log_hglm, cake_blocks, cake_design,
                     cake_problem, load_table, make_cake_dataset,
                     pump_problem)
from .oracles import (McReport, QuadratureEstimate, binomial_central_interval,
                      chib_poisson_gamma, compound_gamma,
                      compound_gamma_groups, gamma_loglik, mc_overlap_check,
                      negbin_mixture, poisson_loglik, poisson_pareto_marginal,
                      quadrature_marginal)
from .fitting import FitResult, fit_cake_mmle, maximize_marginal
from .examples import ExampleReport, run_example

__version__ = "0.1.0"
