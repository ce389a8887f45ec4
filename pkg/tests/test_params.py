import math

import pytest

from padnet.params import (ConfigError, NumericsConfig, ParamError,
                           RotorParams, SystemParams, load_config,
                           save_config, validate, validate_numerics,
                           validate_rotor)


def test_defaults_accepted():
    p = validate(SystemParams())
    assert p.lambda_t == 1e-6
    assert p.p_m == 161.8
    assert p.p_s == 10.0
    assert p.h == 60.0
    assert p.v == 18.46
    assert p.r_c == 120.0
    assert (p.a_env, p.b_env) == (25.27, 0.2)
    assert (p.rho_u, p.rho_t) == (0.4, 10.0)
    assert p.p_tbs == 318.0
    assert p.gamma_thr == 1.0
    assert p.sigma2 == 1e-9
    assert (p.alpha_n, p.alpha_l, p.alpha_t) == (4.0, 2.1, 4.0)
    assert (p.m_n, p.m_l) == (1, 3)
    assert (p.eta_n, p.eta_l) == (0.01, 1.0)


def test_validate_idempotent():
    p = SystemParams()
    assert validate(validate(p)) == validate(p)


@pytest.mark.parametrize("field,value", [
    ("lambda_c", 0.0),
    ("lambda_t", -1e-6),
    ("rho_u", 0.0),
    ("d_nm", -5.0),
    ("sigma2", -1e-12),
])
def test_validate_rejects_nonpositive(field, value):
    with pytest.raises(ParamError, match=field):
        validate(SystemParams(**{field: value}))


def test_validate_rejects_noninteger_fading_order():
    with pytest.raises(ParamError, match="m_l"):
        validate(SystemParams(m_l=2.5))
    with pytest.raises(ParamError, match="m_n"):
        validate(SystemParams(m_n=0))


def test_validate_enforces_density_ordering():
    with pytest.raises(ParamError, match="lambda_mh"):
        validate(SystemParams(lambda_mh=1e-4, lambda_nl=2e-4))
    with pytest.raises(ParamError, match="lambda_nh"):
        validate(SystemParams(lambda_nh=1e-4, lambda_ml=2e-4))


def test_validate_alpha_time_range():
    with pytest.raises(ParamError, match="alpha_time"):
        validate(SystemParams(alpha_time=1.2))


def test_rotor_requires_positive():
    rotor = RotorParams(p_0=79.86, p_i=88.63, u_tip=120.0, v_0=4.03,
                        d_0=0.6, rho_air=1.225, s_rotor=0.05, a_1=0.503)
    assert validate_rotor(rotor) == rotor
    with pytest.raises(ParamError, match="u_tip"):
        validate_rotor(RotorParams(p_0=1, p_i=1, u_tip=0.0, v_0=1,
                                   d_0=1, rho_air=1, s_rotor=1, a_1=1))


def test_numerics_validation():
    num = validate_numerics(NumericsConfig(), SystemParams())
    assert 0 < num.quad_rel_tol < 1
    with pytest.raises(ParamError, match="fd_step"):
        validate_numerics(NumericsConfig(fd_step=0.5))
    # truncation floor depends on the sparser of the two fields
    with pytest.raises(ParamError, match="truncation"):
        validate_numerics(NumericsConfig(integral_truncation_radius=1000.0),
                          SystemParams(lambda_t=1e-8))


def test_empty_config_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("# nothing here\n\n")
    params, rotor, numerics = load_config(path)
    assert params == SystemParams()
    assert rotor is None
    assert numerics == NumericsConfig()


def test_config_single_override(tmp_path):
    path = tmp_path / "one.cfg"
    path.write_text("d_nm = 600  # wider pair\n")
    params, _, _ = load_config(path)
    assert params.d_nm == 600.0
    assert params.r_c == SystemParams().r_c


def test_config_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("lambda_q = 3\n")
    with pytest.raises(ConfigError, match="lambda_q"):
        load_config(path)


def test_config_db_conversion(tmp_path):
    path = tmp_path / "db.cfg"
    path.write_text("eta_n_db = -20\ngamma_thr_db = 3\n")
    params, _, _ = load_config(path)
    assert params.eta_n == pytest.approx(0.01)
    assert params.gamma_thr == pytest.approx(10 ** 0.3)


def test_config_duplicate_key_rejected(tmp_path):
    path = tmp_path / "dup.cfg"
    path.write_text("d_nm = 300\nd_nm = 400\n")
    with pytest.raises(ConfigError, match="duplicate"):
        load_config(path)


def test_config_partial_rotor_rejected(tmp_path):
    path = tmp_path / "rotor.cfg"
    path.write_text("p_0 = 80\n")
    with pytest.raises(ConfigError, match="rotor"):
        load_config(path)


def test_round_trip_bit_exact(tmp_path):
    params = SystemParams(lambda_c=math.pi * 1e-5, d_nm=299.997,
                          gamma_thr=1.2589254117941673)
    rotor = RotorParams(p_0=79.86, p_i=88.63, u_tip=120.0, v_0=4.03,
                        d_0=0.6, rho_air=1.225, s_rotor=0.05, a_1=0.503)
    numerics = NumericsConfig(master_seed=987654321)
    path = tmp_path / "round.cfg"
    save_config(path, params, rotor, numerics)
    p2, r2, n2 = load_config(path)
    assert p2 == params
    assert r2 == rotor
    assert n2 == numerics
    # keys are emitted alphabetically
    keys = [line.split("=")[0].strip() for line in path.read_text().splitlines()]
    assert keys == sorted(keys)
