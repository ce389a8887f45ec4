"""Model constants, validation, and config-file IO.

All quantities are SI: densities in 1/m^2, powers in W, distances in m,
bandwidth in Hz.  Loss factors (eta_l, eta_n) and the SINR threshold
(gamma_thr) are stored in linear scale; the config file accepts a `_db`
suffix on those keys and converts at load time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields


class ParamError(ValueError):
    """A parameter record violates one of its invariants."""


class ConfigError(ValueError):
    """A config file could not be parsed."""


@dataclass(frozen=True)
class SystemParams:
    """Every scalar of the network model in one validated record.

    Defaults are the simulation values used throughout the numerical
    studies (figure conventions fill in the few quantities the main
    table leaves unstated: lambda_c, lambda_user, d_nm, bandwidth and
    the high/low user densities).
    """

    lambda_c: float = 1e-5        # charging-pad density, pads/m^2
    lambda_t: float = 1e-6        # TBS density, TBSs/m^2
    lambda_user: float = 1e-5     # cluster-pair density, pairs/m^2
    d_nm: float = 300.0           # intra-pair cluster-center separation, m
    r_c: float = 120.0            # user-cluster disk radius, m
    h: float = 60.0               # UAV / charging-pad altitude, m
    a_env: float = 25.27          # LoS environment constant
    b_env: float = 0.2            # LoS environment constant
    alpha_l: float = 2.1          # LoS path-loss exponent
    alpha_n: float = 4.0          # NLoS path-loss exponent
    alpha_t: float = 4.0          # terrestrial path-loss exponent
    eta_l: float = 1.0            # mean additional LoS loss, linear (0 dB)
    eta_n: float = 0.01           # mean additional NLoS loss, linear (-20 dB)
    m_l: int = 3                  # LoS Nakagami fading order
    m_n: int = 1                  # NLoS Nakagami fading order
    rho_u: float = 0.4            # UAV transmit power, W
    rho_t: float = 10.0           # TBS transmit power, W
    sigma2: float = 1e-9          # noise power, W
    gamma_thr: float = 1.0        # SINR threshold, linear (0 dB)
    b_w: float = 1e7              # bandwidth, Hz
    lambda_mh: float = 1e-3       # user density of x_m in its high state, users/m^2
    lambda_ml: float = 2.5e-4     # user density of x_m in its low state
    lambda_nh: float = 1e-3       # user density of x_n in its high state
    lambda_nl: float = 2.5e-4     # user density of x_n in its low state
    n_t: float = 200.0            # density-switching frequency, switches/day
    alpha_time: float = 0.5       # fraction of the day the scenario-1 UAV spends at C_m
    v: float = 18.46              # travel velocity, m/s
    p_m: float = 161.8            # travel-related UAV power, W
    p_s: float = 10.0             # service-related UAV power, W
    p_tbs: float = 318.0          # total TBS power, W


@dataclass(frozen=True)
class RotorParams:
    """Rotary-wing constants for the propulsion-power formula.

    No defaults: these are airframe-specific and only needed when the
    travel power is derived from first principles instead of using the
    constant p_m.
    """

    p_0: float       # blade profile power, W
    p_i: float       # induced power, W
    u_tip: float     # rotor tip speed, m/s
    v_0: float       # mean rotor induced velocity in hover, m/s
    d_0: float       # fuselage drag ratio
    rho_air: float   # air density, kg/m^3
    s_rotor: float   # rotor solidity
    a_1: float       # rotor disc area, m^2


@dataclass(frozen=True)
class NumericsConfig:
    """Numerical knobs shared by the quadrature and simulation code.

    The truncation radius replaces infinity in the interference
    integrals and defaults to the simulation window: with a LoS
    path-loss exponent barely above 2 the aggregate far-field decays so
    slowly that analysis and simulation only agree when they see the
    same interference horizon.
    """

    quad_rel_tol: float = 1e-6
    quad_abs_tol: float = 1e-12
    integral_truncation_radius: float = 1e4   # m, interference horizon
    mc_window_radius: float = 1e4             # m, simulation window radius
    fd_step: float = 1e-4                     # relative finite-difference step
    master_seed: int = 20240818


_POSITIVE_SYSTEM_FIELDS = (
    "lambda_c", "lambda_t", "lambda_user", "d_nm", "r_c", "h",
    "a_env", "b_env", "alpha_l", "alpha_n", "alpha_t", "eta_l", "eta_n",
    "rho_u", "rho_t", "gamma_thr", "b_w",
    "lambda_mh", "lambda_ml", "lambda_nh", "lambda_nl",
    "v", "p_m", "p_s", "p_tbs",
)


def _check_finite(name, value):
    if not math.isfinite(value):
        raise ParamError(f"{name} must be finite, got {value!r}")


def validate(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged iff every invariant holds.

    Raises ParamError naming the first violated field.  Idempotent; the
    returned (frozen) record is what the rest of the library expects.
    """
    for name in _POSITIVE_SYSTEM_FIELDS:
        value = getattr(params, name)
        _check_finite(name, value)
        if value <= 0:
            raise ParamError(f"{name} must be strictly positive, got {value!r}")
    _check_finite("sigma2", params.sigma2)
    if params.sigma2 < 0:
        raise ParamError(f"sigma2 must be nonnegative, got {params.sigma2!r}")
    for name in ("m_l", "m_n"):
        value = getattr(params, name)
        if isinstance(value, bool) or float(value) != int(value):
            raise ParamError(f"{name} must be an integer fading order, got {value!r}")
        if value < 1:
            raise ParamError(f"{name} must be >= 1, got {value!r}")
    if not params.lambda_mh > params.lambda_nl:
        raise ParamError(
            f"lambda_mh must exceed lambda_nl (high/low ordering), "
            f"got {params.lambda_mh!r} <= {params.lambda_nl!r}")
    if not params.lambda_nh > params.lambda_ml:
        raise ParamError(
            f"lambda_nh must exceed lambda_ml (high/low ordering), "
            f"got {params.lambda_nh!r} <= {params.lambda_ml!r}")
    if params.n_t < 0 or not math.isfinite(params.n_t):
        raise ParamError(f"n_t must be nonnegative, got {params.n_t!r}")
    if not 0.0 <= params.alpha_time <= 1.0:
        raise ParamError(f"alpha_time must lie in [0, 1], got {params.alpha_time!r}")
    return params


def validate_rotor(rotor: RotorParams) -> RotorParams:
    for f in fields(RotorParams):
        value = getattr(rotor, f.name)
        _check_finite(f.name, value)
        if value <= 0:
            raise ParamError(f"{f.name} must be strictly positive, got {value!r}")
    return rotor


def validate_numerics(numerics: NumericsConfig,
                      params: SystemParams | None = None) -> NumericsConfig:
    """Check the numerics record, optionally against a parameter set.

    The truncation-radius constraint depends on the pad/TBS densities,
    so it is only enforced when ``params`` is supplied.
    """
    for name in ("quad_rel_tol", "quad_abs_tol"):
        value = getattr(numerics, name)
        if not 0.0 < value < 1.0:
            raise ParamError(f"{name} must lie in (0, 1), got {value!r}")
    if not 0.0 < numerics.fd_step < 0.1:
        raise ParamError(f"fd_step must lie in (0, 0.1), got {numerics.fd_step!r}")
    if numerics.mc_window_radius <= 0:
        raise ParamError("mc_window_radius must be strictly positive, "
                         f"got {numerics.mc_window_radius!r}")
    if numerics.integral_truncation_radius <= 0:
        raise ParamError("integral_truncation_radius must be strictly positive, "
                         f"got {numerics.integral_truncation_radius!r}")
    if int(numerics.master_seed) != numerics.master_seed:
        raise ParamError(f"master_seed must be an integer, got {numerics.master_seed!r}")
    if params is not None:
        floor = 10.0 * max(1.0 / math.sqrt(math.pi * params.lambda_c),
                           1.0 / math.sqrt(math.pi * params.lambda_t))
        if numerics.integral_truncation_radius <= floor:
            raise ParamError(
                "integral_truncation_radius must exceed "
                f"{floor:.1f} m for these densities, "
                f"got {numerics.integral_truncation_radius!r}")
    return numerics


# Config files are flat `key = value` lines.  Keys are the dataclass field
# names; eta_l/eta_n/gamma_thr also accept a `_db` variant.
_DB_KEYS = {"eta_l_db": "eta_l", "eta_n_db": "eta_n", "gamma_thr_db": "gamma_thr"}
_SYSTEM_KEYS = {f.name: f for f in fields(SystemParams)}
_ROTOR_KEYS = {f.name: f for f in fields(RotorParams)}
_NUMERICS_KEYS = {f.name: f for f in fields(NumericsConfig)}


def _parse_value(key, text, ftype, lineno):
    try:
        if ftype is int:
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse value for {key!r}: {text!r}")


def load_config(path) -> tuple[SystemParams, RotorParams | None, NumericsConfig]:
    """Load a config file; missing keys take their defaults.

    Rotor constants have no defaults: either all eight are present (a
    RotorParams is returned) or none are (None is returned).
    """
    raw: dict[str, object] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, _, value = stripped.partition("=")
            key = key.strip()
            value = value.strip()
            target = _DB_KEYS.get(key, key)
            if target not in _SYSTEM_KEYS and target not in _ROTOR_KEYS \
                    and target not in _NUMERICS_KEYS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if target in raw:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            if target in _SYSTEM_KEYS:
                ftype = _SYSTEM_KEYS[target].type
            elif target in _ROTOR_KEYS:
                ftype = _ROTOR_KEYS[target].type
            else:
                ftype = _NUMERICS_KEYS[target].type
            ftype = int if ftype in ("int", int) else float
            parsed = _parse_value(key, value, ftype, lineno)
            if key in _DB_KEYS:
                parsed = 10.0 ** (parsed / 10.0)
            raw[target] = parsed

    system_kwargs = {k: v for k, v in raw.items() if k in _SYSTEM_KEYS}
    rotor_kwargs = {k: v for k, v in raw.items() if k in _ROTOR_KEYS}
    numerics_kwargs = {k: v for k, v in raw.items() if k in _NUMERICS_KEYS}

    params = validate(SystemParams(**system_kwargs))
    if rotor_kwargs:
        missing = sorted(set(_ROTOR_KEYS) - set(rotor_kwargs))
        if missing:
            raise ConfigError(
                "rotor constants have no defaults; missing keys: " + ", ".join(missing))
        rotor = validate_rotor(RotorParams(**rotor_kwargs))
    else:
        rotor = None
    numerics = validate_numerics(NumericsConfig(**numerics_kwargs), params)
    return params, rotor, numerics


def save_config(path, params: SystemParams,
                rotor: RotorParams | None = None,
                numerics: NumericsConfig | None = None) -> None:
    """Write a config file that load_config reproduces bit-exactly.

    Keys are emitted in alphabetical order; floats use repr so the
    round trip is exact.
    """
    entries: dict[str, object] = {}
    for f in fields(SystemParams):
        entries[f.name] = getattr(params, f.name)
    if rotor is not None:
        for f in fields(RotorParams):
            entries[f.name] = getattr(rotor, f.name)
    if numerics is not None:
        for f in fields(NumericsConfig):
            entries[f.name] = getattr(numerics, f.name)
    lines = [f"{key} = {entries[key]!r}" for key in sorted(entries)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
