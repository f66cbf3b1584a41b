# Run configuration validation for sgfrwt

from .config import get_config_value
from .exceptions import ValidationError
from .fast import CG_METHODS, EXTENSIONS, PROPAGATOR_BACKENDS
from .graph import SPARSIFY_MODES
from .spectral import R_MAX_MODES

BACKENDS = ("exact", "fast")
AUGMENT_MODES = ("magnitude", "real")

# Commands whose orders may include theta = 0 (identity basis)
ZERO_ORDER_COMMANDS = ("transform", "atoms", "reconstruct", "bench")


class ValidationResult:
    """Container for validation results."""

    def __init__(self):
        self.errors = []
        self.warnings = []

    @property
    def is_valid(self):
        """No errors, or no issues at all in strict mode."""
        strict_mode = get_config_value("validation.strict", False)
        return len(self.errors) == 0 and (not strict_mode or len(self.warnings) == 0)

    @property
    def has_issues(self):
        return len(self.errors) > 0 or len(self.warnings) > 0


def _check_choice(result, name, value, choices):
    if value not in choices:
        result.errors.append(f"{name}={value!r} must be one of {', '.join(choices)}")


def validate_run_config(cfg):
    """
    Check a RunConfig against the rules of its command.

    Returns:
        ValidationResult
    """
    result = ValidationResult()

    # Filter bank
    if cfg.J < 1:
        result.errors.append(f"J={cfg.J} must be at least 1")
    if not cfg.K > 1:
        result.errors.append(f"K={cfg.K} must exceed 1")
    for name in ("alpha", "beta"):
        if getattr(cfg, name) < 1:
            result.errors.append(f"{name}={getattr(cfg, name)} must be at least 1")
    if not 0 < cfg.x1 < cfg.x2:
        result.errors.append(f"need 0 < x1 < x2, got x1={cfg.x1}, x2={cfg.x2}")
    if cfg.alpha == 1:
        result.warnings.append("alpha=1 makes the wavelet kernel non-admissible")
    if cfg.scales:
        if any(t <= 0 for t in cfg.scales):
            result.errors.append("scales must be positive")
        if any(a <= b for a, b in zip(cfg.scales, cfg.scales[1:])):
            result.errors.append("scales must be strictly decreasing")
        if len(cfg.scales) != cfg.J:
            result.warnings.append(f"{len(cfg.scales)} explicit scales override J={cfg.J}")

    # Orders
    if not cfg.thetas:
        result.errors.append("at least one theta is required")
    low_ok = cfg.command in ZERO_ORDER_COMMANDS
    for theta in cfg.thetas:
        if theta > 1 or theta < 0 or (theta == 0 and not low_ok):
            interval = "[0, 1]" if low_ok else "(0, 1]"
            result.errors.append(f"theta={theta} must lie in {interval}")

    # Graph construction
    if not cfg.sigma > 0:
        result.errors.append(f"sigma={cfg.sigma} must be positive")
    if not cfg.theta_w > 0:
        result.errors.append(f"theta_w={cfg.theta_w} must be positive")
    if not cfg.k >= 1:
        result.errors.append(f"k={cfg.k} must be at least 1 (no lattice neighbors otherwise)")
    if cfg.knn < 1:
        result.errors.append(f"knn={cfg.knn} must be at least 1")
    if not cfg.epsilon >= 0:
        result.errors.append(f"epsilon={cfg.epsilon} must be nonnegative")
    _check_choice(result, "sparsify", cfg.sparsify, SPARSIFY_MODES)

    # Fast path and reconstruction
    _check_choice(result, "backend", cfg.backend, BACKENDS)
    _check_choice(result, "extension", cfg.extension, EXTENSIONS)
    _check_choice(result, "propagator", cfg.propagator, PROPAGATOR_BACKENDS)
    _check_choice(result, "cg_method", cfg.cg_method, CG_METHODS)
    _check_choice(result, "r_max_mode", cfg.r_max_mode, R_MAX_MODES)
    if cfg.M < 1:
        result.errors.append(f"M={cfg.M} must be at least 1")
    elif cfg.M < 10 and (cfg.backend == "fast" or cfg.command == "reconstruct"):
        result.warnings.append(f"M={cfg.M} gives a coarse kernel approximation")
    if cfg.extension == "even" and not cfg.period_factor >= 2:
        result.errors.append(f"period_factor={cfg.period_factor} must be at least 2")
    if not cfg.tol > 0:
        result.errors.append(f"tol={cfg.tol} must be positive")
    elif cfg.tol < 1e-14:
        result.warnings.append(f"tol={cfg.tol} is below double precision round-off")
    if cfg.max_iter < 0:
        result.errors.append(f"max_iter={cfg.max_iter} must be nonnegative")

    # Runtime
    if cfg.threads < 1:
        result.errors.append(f"threads={cfg.threads} must be at least 1")
    if cfg.command == "augment":
        _check_choice(result, "mode", cfg.mode, AUGMENT_MODES)

    return result


def ensure_valid(cfg):
    """
    Validate and raise on errors.

    Returns:
        ValidationResult (warnings only)

    Raises:
        ValidationError: One message listing every error
    """
    result = validate_run_config(cfg)
    if not result.is_valid:
        issues = result.errors or result.warnings
        raise ValidationError(f"Invalid {cfg.command} configuration: " + "; ".join(issues))
    return result
