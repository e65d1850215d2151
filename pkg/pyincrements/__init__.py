"""
This package provides increment-based volatility diagnostics: model
simulators, ensemble estimators over increments, ARCH/GARCH fitting and
a falsification report that combines them. The package file itself
exports the names used most often.
"""

from .binspec import BinSpec  # NOQA
from .errors import (DataError, DomainError, FormatError, NumericalError,  # NOQA
                     OptimizationError, ParameterError, PyIncrementsError, ResourceError,
                     SingularityError, SizeError, UsageError)
from .falsify import (diagnostics_report, falsification_report,  # NOQA
                      garch_white_noise_check, white_noise_consistency)
from .generators import (ArchParams, FbmParams, GarchParams, NoiseSpec,  # NOQA
                         ScaledWienerParams, WienerParams, gen_arch1, gen_ensemble, gen_fbm,
                         gen_garch11, gen_scaled_wiener, gen_wiener)
from .model_fit import (FitResult, OptimizerConfig, fit_arch1, fit_garch11,  # NOQA
                        unconditional_msf_arch1, unconditional_msf_garch11)
from .series_core import (Ensemble, IncrementSeries, LevelSeries, PriceSeries,  # NOQA
                          detrend, ensemble_split, increments, log_returns)
from .status import DATA_ERROR, NUMERICAL_ERROR, SUCCESS, USAGE_ERROR, Status  # NOQA

version = "1.0.0"
"""Current version of pyincrements"""
