from config.settings import Settings, load_settings


def test_defaults_come_from_ini(monkeypatch):
    monkeypatch.delenv("APM_BETA0", raising=False)
    s = load_settings()
    assert isinstance(s, Settings)
    assert s.beta0 == 100.0
    assert (s.sc_inner_divisor, s.nsc_inner_divisor) == (3.0, 5.0)
    assert s.apm_eta_scale == 5000.0
    assert s.apm_beta0_scale == 0.01
    assert s.apm_ls_beta0 == 0.02
    assert s.reference_iters == 1_000_000


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("APM_BETA0", "7.5")
    monkeypatch.setenv("APM_METRIC_EVERY", "10")
    monkeypatch.setenv("PROMETHEUS_PUSH_URL", " localhost:9091 ")
    s = load_settings()
    assert s.beta0 == 7.5
    assert s.metric_every == 10
    assert s.prometheus_push_url == "localhost:9091"


def test_invalid_override_is_ignored(monkeypatch):
    monkeypatch.setenv("APM_METRIC_EVERY", "often")
    assert load_settings().metric_every == 1


def test_missing_ini_uses_builtin_defaults(tmp_path):
    s = load_settings(str(tmp_path / "none.ini"))
    assert s.out_dir == "traces"


def test_custom_ini(tmp_path, monkeypatch):
    monkeypatch.delenv("APM_OUT_DIR", raising=False)
    ini = tmp_path / "app.ini"
    ini.write_text("[experiment]\nout_dir = runs\nbeta0 = 3\n")
    monkeypatch.delenv("APM_BETA0", raising=False)
    s = load_settings(str(ini))
    assert s.out_dir == "runs"
    assert s.beta0 == 3.0
