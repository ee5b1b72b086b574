import dataclasses
import json
import math
import os

import pytest

from eisensup import harness as H
from eisensup.cli import main
from eisensup.errors import ConfigError
from eisensup.geometry import cusps_of_level

TINY = H.SweepSpec(levels=(1,), weights=(0,), types=(1.0,), points=H.PointSpec(count=10))


def write_toml(tmp_path, text):
    p = tmp_path / "cfg.toml"
    p.write_text(text)
    return str(p)


class TestConfig:
    def test_defaults_hash_stable(self):
        assert H.HarnessConfig().config_hash() == H.HarnessConfig().config_hash()
        assert H.HarnessConfig().config_hash() != H.HarnessConfig(sweep=TINY).config_hash()

    def test_toml_round(self, tmp_path):
        cfg = H.load_config(write_toml(tmp_path, """
[sweep]
levels = [1, 6]
weights = [0, 4]
[sweep.points]
count = 5
seed = 3
[ratios]
levels = [1]
"""))
        assert cfg.sweep.levels == (1, 6) and cfg.sweep.points.count == 5 and cfg.ratios.levels == (1,)

    @pytest.mark.parametrize("text", [
        "[sweep]\nlevels = [4]\n",
        "[sweep]\nweights = [3]\n",
        "[sweep]\nepsilon = 0.7\n",
        "[sweep]\nbogus = 1\n",
        "[other]\n",
        "[sweep.points]\ncount = 0\n",
        "[sweep\n",
    ])
    def test_rejects(self, tmp_path, text):
        with pytest.raises(ConfigError):
            H.load_config(write_toml(tmp_path, text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            H.load_config(str(tmp_path / "nope.toml"))


class TestSweep:
    def test_tiny_sweep(self, tmp_path):
        s = H.run_supnorm_sweep(TINY, str(tmp_path))
        recs = H.read_records(str(tmp_path / "supnorm.csv"))
        assert len(recs) == 10 and s.rows == 10 and s.failed_rows == 0
        assert all(math.isfinite(r.ratio) and r.status == "ok" for r in recs)

    def test_ratio_recomputable(self, tmp_path):
        H.run_supnorm_sweep(TINY, str(tmp_path))
        for r in H.read_records(str(tmp_path / "supnorm.csv")):
            den = H.bound_denominator(r.n, r.t, r.y, TINY.epsilon)
            assert abs(den - r.bound_denominator) <= 1e-12 * den
            assert abs(abs(complex(r.value_re, r.value_im)) / den - r.ratio) <= 1e-12 * max(r.ratio, 1e-300)

    def test_deterministic_across_runs_and_workers(self, tmp_path):
        spec = dataclasses.replace(TINY, levels=(1, 2), weights=(0, 2))
        outs = []
        for i, w in enumerate((1, 1, 2)):
            d = tmp_path / str(i)
            H.run_supnorm_sweep(spec, str(d), workers=w)
            outs.append((d / "supnorm.csv").read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_points_in_domain(self):
        x, y, _ = H.sample_points(H.PointSpec(count=200))
        assert all(abs(x) <= 0.5) and all(x * x + y * y >= 1 - 1e-12) and all(y <= 40 + 1e-9)

    def test_summary_flags(self):
        r = H.ResultRecord(1, 1, 0, 1.0, 0, 2, 0, 1, 0, 0, 1, 1.0)
        bad = dataclasses.replace(r, ratio=math.nan, status="accuracy")
        assert H.summarize([r]).passed and not H.summarize([r, bad]).passed
        big = dataclasses.replace(r, n=40, ratio=5.0)
        assert not H.summarize([r, big]).passed

    def test_dyadic_block(self):
        assert H.dyadic_block(0, 0) == 0 and H.dyadic_block(2, 1.0) == 2 and H.dyadic_block(0, 7.0) == 3


class TestYScaling:
    @pytest.mark.parametrize("q,n,t", [(1, 0, 1.0), (2, 4, 3.0), (6, -2, 0.5)])
    def test_cusp_scaling(self, q, n, t):
        a = cusps_of_level(q)[-1]
        measured, predicted, ok = H.y_scaling_check(q, a, n, t, 0.1, 3 * q, 0.4)
        assert ok and abs(measured / predicted - 1) < 1e-3


class TestPlotData:
    def test_empty(self, tmp_path):
        paths = H.emit_plot_data([], str(tmp_path))
        assert [os.path.basename(p) for p in paths] == list(H.PLOT_FILES)
        for p in paths:
            assert len(open(p).read().splitlines()) == 1

    def test_from_sweep(self, tmp_path):
        recs = H.sweep_records(TINY)
        paths = H.emit_plot_data(recs, str(tmp_path))
        assert len(open(paths[2]).read().splitlines()) == 11


class TestInvariants:
    def test_default_passes(self, tmp_path):
        rep = H.run_invariant_suite(H.InvariantConfig(), str(tmp_path))
        assert rep.passed, [r.name for r in rep.results if not r.passed]
        assert json.loads((tmp_path / "invariants.json").read_text())

    def test_fault_injection(self):
        rep = H.run_invariant_suite(H.InvariantConfig(psi_perturbation=1e-3))
        assert [r.name for r in rep.results if not r.passed] == ["scattering_unitarity"]

    def test_central_point_documented(self):
        rep = H.run_invariant_suite(H.InvariantConfig())
        assert any(H.CENTRAL_POINT_NOTE in r.detail for r in rep.results)


class TestCli:
    def test_invariants_ok(self, tmp_path, capsys):
        assert main(["invariants", "--out", str(tmp_path)]) == H.EXIT_OK
        m = json.loads((tmp_path / "manifest.json").read_text())
        assert m["suites"] == {"invariants": True} and m["config_hash"]

    def test_fault_exit(self, tmp_path):
        assert main(["invariants", "--out", str(tmp_path), "--fault-psi", "1e-3"]) == H.EXIT_INVARIANT

    def test_bad_config_exit(self, tmp_path):
        cfg = write_toml(tmp_path, "[sweep]\nlevels = [4]\n")
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == H.EXIT_CONFIG
        assert main(["sweep", "--workers", "0", "--out", str(tmp_path)]) == H.EXIT_CONFIG

    def test_sweep_then_plotdata(self, tmp_path):
        cfg = write_toml(tmp_path, "[sweep]\nlevels = [1]\nweights = [0]\ntypes = [1.0]\n"
                                   "[sweep.points]\ncount = 6\n")
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path), "--seed", "11"]) == H.EXIT_OK
        assert main(["plotdata", "--out", str(tmp_path)]) == H.EXIT_OK
        assert all((tmp_path / f).exists() for f in H.PLOT_FILES)

    def test_plotdata_missing_records(self, tmp_path):
        assert main(["plotdata", "--out", str(tmp_path), "--records", str(tmp_path / "x.csv")]) == H.EXIT_CONFIG


class TestRatioSuite:
    SMALL = H.RatioConfig(levels=(1, 2), max_weight=8, max_type=5, type_count=11, norm_levels=(1, 2),
                          norm_max_weight=200, lattice_X=(1.0, 100.0), lattice_points=4)

    def test_outputs_and_known_failure(self, tmp_path):
        rep = H.run_ratio_suite(self.SMALL, str(tmp_path))
        assert {"ratio_summary.json", "lower_bound.csv", "constant_term_ratio.csv"} <= set(os.listdir(tmp_path))
        assert rep.passed["constant_term_ratio"] and rep.passed["quadratic_slope"]
        assert rep.passed["lattice_count_bound"] and rep.passed["norm_bound_no_divergence"]
        # every failure sits in the small-t regime, where the surrogate is of order t^2
        lb = H.lower_bound_grid(self.SMALL)
        assert {r[5] for r in lb if not r[7]} == {"small_t"}
        assert rep.ratio_degenerate == sum(1 for r in H.constant_term_ratio_grid(self.SMALL) if r[3] == 0)

    def test_cli_ratios(self, tmp_path):
        cfg = write_toml(tmp_path, "[ratios]\nlevels = [1]\nmax_weight = 4\ntype_count = 5\n"
                                   "norm_levels = [1]\nnorm_max_weight = 100\nlattice_X = [1.0, 10.0]\n"
                                   "lattice_points = 3\n")
        assert main(["ratios", "--config", cfg, "--out", str(tmp_path)]) == H.EXIT_INVARIANT
