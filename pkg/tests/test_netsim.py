"""Transaction cost model, medium profiles and feasibility."""

import numpy as np
import pytest

from deltasim.netsim import (
    APP_CLASSES,
    AppClass,
    MediumProfile,
    MessageSizes,
    default_profiles,
    load_profiles,
    pattern_latency,
    recommend,
    transaction_energy,
    transaction_report,
    transaction_time,
)

TOY = MediumProfile(
    name="toy", first_hop_rtt_ms=3.0, setup_ms=2.0, throughput_kbps=8.0,
    energy_setup_mj=0.5, energy_per_byte_mj=0.25, core_rtt_ms=5.0,
)


class TestTransactionModel:
    def test_time_formula(self):
        # 16 bytes at 8 kbps = 128 bits / 8 bits-per-ms = 16 ms serialization
        assert transaction_time(TOY, 16) == 2.0 + 16.0 + 3.0 + 5.0

    def test_energy_formula(self):
        assert transaction_energy(TOY, 16) == 0.5 + 16 * 0.25

    def test_zero_payload(self):
        assert transaction_time(TOY, 0) == 10.0
        assert transaction_energy(TOY, 0) == 0.5

    def test_negative_payload_rejected(self):
        with pytest.raises(ValueError):
            transaction_time(TOY, -1)
        with pytest.raises(ValueError):
            transaction_energy(TOY, -1)

    def test_report_bundles_both(self):
        report = transaction_report(TOY, 16)
        assert report.medium == "toy"
        assert report.time_ms == transaction_time(TOY, 16)
        assert report.energy_mj == transaction_energy(TOY, 16)

    def test_monotone_in_payload(self):
        times = [transaction_time(TOY, p) for p in range(0, 2000, 37)]
        energies = [transaction_energy(TOY, p) for p in range(0, 2000, 37)]
        assert all(a < b for a, b in zip(times, times[1:]))
        assert all(a < b for a, b in zip(energies, energies[1:]))


class TestProfileValidation:
    def test_rejects_nonpositive_throughput(self):
        with pytest.raises(ValueError):
            MediumProfile("x", 1, 1, 0.0, 1, 1, 1)

    def test_rejects_negative_costs(self):
        with pytest.raises(ValueError):
            MediumProfile("x", -1, 1, 10, 1, 1, 1)

    def test_rejects_empty_name(self):
        with pytest.raises(ValueError):
            MediumProfile("", 1, 1, 10, 1, 1, 1)


class TestDefaultProfiles:
    def test_bundled_media_present(self):
        profiles = default_profiles()
        assert set(profiles) == {"ethernet", "wifi", "3g", "2g", "instant"}

    def test_componentwise_ordering(self):
        p = default_profiles()
        order = [p["ethernet"], p["wifi"], p["3g"], p["2g"]]
        for a, b in zip(order, order[1:]):
            assert a.first_hop_rtt_ms < b.first_hop_rtt_ms
            assert a.setup_ms < b.setup_ms
            assert a.throughput_kbps > b.throughput_kbps
            assert a.energy_setup_mj < b.energy_setup_mj
            assert a.energy_per_byte_mj < b.energy_per_byte_mj
        for payload in (64, 1024, 65536):
            times = [transaction_time(m, payload) for m in order]
            assert all(x < y for x, y in zip(times, times[1:]))

    def test_instant_is_free(self):
        instant = default_profiles()["instant"]
        assert transaction_time(instant, 10_000_000) < 1e-3
        assert transaction_energy(instant, 10_000_000) == 0.0


class TestPatternLatency:
    SIZES = MessageSizes(s_bytes=21, d_bytes=5, m_bytes=330)

    def test_local_patterns_skip_the_network(self):
        for pattern in ("P0", "P1"):
            for medium in default_profiles().values():
                assert pattern_latency(pattern, medium, self.SIZES, edge_ms=1.5) == 1.5

    def test_p2_is_two_transactions_plus_cloud(self):
        expected = (
            transaction_time(TOY, 21) + 2.0 + transaction_time(TOY, 5)
        )
        assert pattern_latency("P2", TOY, self.SIZES, cloud_ms=2.0) == expected

    def test_unknown_pattern(self):
        with pytest.raises(ValueError):
            pattern_latency("P9", TOY, self.SIZES)


class TestRecommend:
    def test_row_grid_and_feasibility(self):
        profiles = default_profiles()
        media = tuple(profiles[m] for m in ("ethernet", "wifi", "3g", "2g"))
        rows = recommend(APP_CLASSES, ("P0", "P1", "P2"), media,
                         MessageSizes(21, 5, 330))
        assert len(rows) == len(APP_CLASSES) * 3 * 4
        by_key = {(r.app_class, r.pattern, r.medium): r for r in rows}
        # local prediction always fits both budgets
        for app in APP_CLASSES:
            for medium in ("ethernet", "wifi", "3g", "2g"):
                assert by_key[(app.name, "P0", medium)].feasible
                assert by_key[(app.name, "P1", medium)].feasible
        # two core round trips never fit a 10 ms budget
        for medium in ("ethernet", "wifi", "3g", "2g"):
            assert not by_key[("motion_control", "P2", medium)].feasible
        # relaxed budget keeps the fast media usable for P2 only
        assert by_key[("process_automation", "P2", "ethernet")].feasible
        assert by_key[("process_automation", "P2", "wifi")].feasible
        assert not by_key[("process_automation", "P2", "3g")].feasible
        assert not by_key[("process_automation", "P2", "2g")].feasible

    def test_budget_boundary_is_feasible(self):
        app = AppClass("exact", max_latency_ms=1.0)
        rows = recommend((app,), ("P1",), (TOY,), self_sizes(), edge_ms=1.0)
        assert rows[0].feasible

    def test_app_class_validation(self):
        with pytest.raises(ValueError):
            AppClass("bad", max_latency_ms=0.0)


def self_sizes():
    return MessageSizes(s_bytes=1, d_bytes=1, m_bytes=1)


class TestProfileFiles:
    def test_load_round_trip(self, tmp_path):
        path = tmp_path / "media.ini"
        path.write_text(
            "[lab]\n"
            "first_hop_rtt_ms = 1.5\n"
            "setup_ms = 0.25\n"
            "throughput_kbps = 1000\n"
            "energy_setup_mj = 2\n"
            "energy_per_byte_mj = 0.001\n"
            "core_rtt_ms = 10\n"
        )
        profiles = load_profiles(str(path))
        assert set(profiles) == {"lab"}
        lab = profiles["lab"]
        assert lab.first_hop_rtt_ms == 1.5
        assert lab.throughput_kbps == 1000.0

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text(
            "[lab]\nfirst_hop_rtt_ms = 1\nsetup_ms = 1\nthroughput_kbps = 10\n"
            "energy_setup_mj = 1\nenergy_per_byte_mj = 1\ncore_rtt_ms = 1\n"
            "latency = 3\n"
        )
        with pytest.raises(ValueError, match="unknown keys"):
            load_profiles(str(path))

    def test_missing_key_rejected(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[lab]\nfirst_hop_rtt_ms = 1\n")
        with pytest.raises(ValueError, match="missing keys"):
            load_profiles(str(path))

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text(
            "[lab]\nfirst_hop_rtt_ms = fast\nsetup_ms = 1\nthroughput_kbps = 10\n"
            "energy_setup_mj = 1\nenergy_per_byte_mj = 1\ncore_rtt_ms = 1\n"
        )
        with pytest.raises(ValueError, match="non-numeric"):
            load_profiles(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_profiles(str(tmp_path / "nope.ini"))


def test_dominated_profile_never_flips_feasible_to_infeasible():
    # random sweep: scaling every cost component down cannot break feasibility
    rng = np.random.default_rng(123)
    sizes = MessageSizes(s_bytes=21, d_bytes=5, m_bytes=330)
    for _ in range(300):
        base = MediumProfile(
            name="base",
            first_hop_rtt_ms=float(rng.uniform(0.1, 500)),
            setup_ms=float(rng.uniform(0.1, 1000)),
            throughput_kbps=float(rng.uniform(10, 100_000)),
            energy_setup_mj=float(rng.uniform(0, 100)),
            energy_per_byte_mj=float(rng.uniform(0, 0.1)),
            core_rtt_ms=float(rng.uniform(1, 300)),
        )
        scale = float(rng.uniform(0.1, 1.0))
        better = MediumProfile(
            name="better",
            first_hop_rtt_ms=base.first_hop_rtt_ms * scale,
            setup_ms=base.setup_ms * scale,
            throughput_kbps=base.throughput_kbps / scale,
            energy_setup_mj=base.energy_setup_mj,
            energy_per_byte_mj=base.energy_per_byte_mj,
            core_rtt_ms=base.core_rtt_ms * scale,
        )
        app = AppClass("sweep", max_latency_ms=float(rng.uniform(1, 2000)))
        for pattern in ("P0", "P1", "P2"):
            rows = recommend((app,), (pattern,), (base, better), sizes)
            slow, fast = rows
            assert fast.latency_ms <= slow.latency_ms
            if slow.feasible:
                assert fast.feasible
