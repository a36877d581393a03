import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from damlink.channel import ArrayGeometry, ChannelConfig
from damlink.errors import DegenerateSignal, LengthError
from damlink.link_ofdm import OfdmConfig, ofdm_modulate
from damlink.metrics import (
    BerResult,
    LinkChain,
    ber_run,
    ccdf,
    papr,
    papr_db,
    qam,
    qam_demap,
    qam_map,
    write_result_rows,
)
from damlink.precoder_digital import OfdmDigitalPrecoder
from oracles import qfunc

ORDERS = [4, 8, 16, 32, 64, 128, 256]


def cross_grid(n_side: int, notch: int) -> set[tuple[int, int]]:
    """Odd-integer square of side ``n_side`` with ``notch x notch`` corners removed."""
    half = n_side - 1
    edge = half - 2 * notch
    pts = set()
    for i in range(-half, half + 1, 2):
        for q in range(-half, half + 1, 2):
            if abs(i) > edge and abs(q) > edge:
                continue
            pts.add((i, q))
    return pts


def unit_grid(const):
    p = const.points
    d = np.abs(p[:, None] - p[None, :])
    scale = 2.0 / d[d > 0].min()
    return {(int(round(z.real * scale)), int(round(z.imag * scale))) for z in p}


class TestQam:
    @pytest.mark.parametrize("order", ORDERS)
    def test_distinct_unit_power(self, order):
        c = qam(order)
        assert c.points.size == order
        assert len(set(np.round(c.points, 9))) == order
        assert abs(np.mean(np.abs(c.points) ** 2) - 1.0) < 1e-12
        assert c.bit_map.shape == (order, c.bits_per_symbol)
        assert len({tuple(r) for r in c.bit_map}) == order

    def test_cross_shapes(self):
        assert unit_grid(qam(128)) == cross_grid(12, 2)
        assert unit_grid(qam(32)) == cross_grid(6, 1)

    @pytest.mark.parametrize("order", [4, 16, 64, 256])
    def test_square_gray(self, order):
        c = qam(order)
        p = c.points
        d = np.abs(p[:, None] - p[None, :])
        dmin = d[d > 0].min()
        for a, b in np.argwhere(np.abs(d - dmin) < 1e-9):
            assert np.sum(c.bit_map[a] != c.bit_map[b]) == 1

    def test_qpsk_round_trip(self):
        bits = np.random.default_rng(0).integers(0, 2, 2000)
        np.testing.assert_array_equal(qam_demap(qam_map(bits, qam(4)), qam(4)), bits)

    @settings(max_examples=40, deadline=None)
    @given(order=st.sampled_from(ORDERS), seed=st.integers(0, 2**32), n=st.integers(1, 300))
    def test_round_trip(self, order, seed, n):
        c = qam(order)
        bits = np.random.default_rng(seed).integers(0, 2, n * c.bits_per_symbol)
        np.testing.assert_array_equal(qam_demap(qam_map(bits, c), c), bits)

    def test_demap_is_nearest_point(self):
        c = qam(16)
        rng = np.random.default_rng(1)
        y = rng.standard_normal(500) + 1j * rng.standard_normal(500)
        bits = qam_demap(y, c, chunk=37).reshape(-1, 4)
        labels = bits @ (1 << np.arange(3, -1, -1))
        best = np.argmin(np.abs(y[:, None] - c.points[None, :]), axis=1)
        np.testing.assert_array_equal(labels, best)

    def test_high_snr_awgn(self):
        c = qam(128)
        rng = np.random.default_rng(2)
        bits = rng.integers(0, 2, 100_000 * 7)
        s = qam_map(bits, c)
        noise = np.sqrt(1e-4 / 2) * (rng.standard_normal(s.size) + 1j * rng.standard_normal(s.size))
        assert np.count_nonzero(qam_demap(s + noise, c) != bits) == 0

    def test_length_error(self):
        with pytest.raises(LengthError):
            qam_map(np.ones(8), qam(128))

    @pytest.mark.parametrize("order", [2, 512, 100])
    def test_unsupported(self, order):
        with pytest.raises(ValueError):
            qam(order)


class TestPapr:
    def test_constant_modulus(self):
        rng = np.random.default_rng(3)
        x = 2.0 * np.exp(2j * np.pi * rng.random((4, 64)))
        assert papr(x) == pytest.approx(1.0, abs=1e-12)

    def test_impulse(self):
        x = np.zeros((2, 50), complex)
        x[0, 7] = 3.0
        x[1] = 1.0
        assert papr(x) == pytest.approx(50.0)

    def test_one_tone_ofdm(self):
        K = 64
        u = np.zeros((3, K), complex)
        u[:, 9] = [1.0, 2j, -1.0]
        pre = OfdmDigitalPrecoder(u, np.eye(K)[9] * 6.0, 6.0, 0.0)
        x = ofdm_modulate(pre, np.ones((1, K)), OfdmConfig(K, 0))[0]
        assert papr(x) == pytest.approx(1.0, abs=1e-9)

    def test_degenerate(self):
        with pytest.raises(DegenerateSignal):
            papr(np.zeros((2, 8)))

    def test_oversampling_only_raises_peaks_of_band_limited_signal(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((2, 128)) + 1j * rng.standard_normal((2, 128))
        assert papr(x, oversample=4) >= papr(x) - 1e-9
        assert papr_db(x) == pytest.approx(10 * np.log10(papr(x)))

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32), m=st.integers(1, 4), s=st.integers(1, 64))
    def test_at_least_one(self, seed, m, s):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((m, s)) + 1j * rng.standard_normal((m, s))
        assert papr(x) >= 1.0 - 1e-12


class TestCcdf:
    def test_step(self):
        np.testing.assert_array_equal(ccdf([3.0] * 10, [2.9, 3.0, 3.1]), [1.0, 0.0, 0.0])

    def test_empty_thresholds(self):
        assert ccdf([1.0, 2.0], []).size == 0

    def test_no_samples(self):
        with pytest.raises(ValueError):
            ccdf([], [1.0])

    def test_uniform(self):
        n = 20_000
        x = np.random.default_rng(5).uniform(0, 10, n)
        t = np.linspace(0, 10, 21)
        p = 1 - t / 10
        band = 3 * np.sqrt(p * (1 - p) / n) + 1e-12
        assert np.all(np.abs(ccdf(x, t) - p) <= band)

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=100))
    def test_monotone(self, samples):
        p = ccdf(samples, np.linspace(-60, 60, 50))
        assert np.all(np.diff(p) <= 0)
        assert p[0] == 1.0 and p[-1] == 0.0


def awgn_chain(scheme="dam", beamforming="digital", symbols=4096):
    # one broadside path with unit gain: h = [1], an AWGN link
    cfg = ChannelConfig(
        num_paths=1, max_delay_taps=0, max_subpaths=1, geometry=ArrayGeometry(1),
        aod_range_deg=(0.0, 0.0), fixed_gain=1.0,
    )
    return LinkChain(scheme, beamforming, cfg, num_rf=1, symbols_per_block=symbols, ofdm=OfdmConfig(16, 0, 64))


def table_chain(beamforming, M=32):
    cfg = ChannelConfig(num_paths=5, max_delay_taps=40, max_subpaths=3, geometry=ArrayGeometry(M))
    return LinkChain("dam", beamforming, cfg, num_rf=5, symbols_per_block=1024)


class TestBerRun:
    def test_noiseless(self):
        for chain in (awgn_chain(), table_chain("digital"), awgn_chain("ofdm")):
            res = ber_run(chain, 1.0, 1e-12, qam(16), 3, seed=1)
            assert res.bit_errors == 0 and res.bits_sent > 0

    def test_qpsk_awgn_oracle(self):
        # Gray QPSK: BER = Q(sqrt(SNR)); SNR = 9.55 puts it near 1e-3
        snr = 9.55
        res = ber_run(awgn_chain(), snr, 1.0, qam(4), 200, seed=2)
        ref = qfunc(np.sqrt(snr))
        assert abs(res.ber - ref) <= 0.1 * ref

    def test_ofdm_awgn_oracle(self):
        # flat OFDM: per-sample power P spreads over K subcarriers, one-tap SNR stays P/sigma^2
        snr = 9.55
        res = ber_run(awgn_chain("ofdm"), snr, 1.0, qam(4), 100, seed=3)
        ref = qfunc(np.sqrt(snr))
        assert abs(res.ber - ref) <= 0.15 * ref

    def test_worker_count_invariance(self):
        chain = table_chain("hybrid")
        a = ber_run(chain, 1.0, 3.0, qam(16), 8, seed=4, workers=1)
        b = ber_run(chain, 1.0, 3.0, qam(16), 8, seed=4, workers=4)
        assert a == b
        assert a.bit_errors > 0

    def test_hybrid_not_better(self):
        dig = ber_run(table_chain("digital"), 1.0, 0.5, qam(16), 100, seed=5)
        hyb = ber_run(table_chain("hybrid"), 1.0, 0.5, qam(16), 100, seed=5)
        assert hyb.ber >= dig.ber

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            ber_run(awgn_chain(), 1.0, 1.0, qam(4), 0, seed=0)
        with pytest.raises(ValueError):
            LinkChain("fdma", "digital", awgn_chain().channel)

    def test_result_arithmetic(self):
        assert (BerResult(1, 10) + BerResult(2, 30)).ber == pytest.approx(3 / 40)


def test_result_csv_header():
    text = write_result_rows(
        [{"scheme": "dam", "beamforming": "digital", "P_dbm": "30", "threshold_db": "4", "value": "0.5", "n_samples": 10}],
        "threshold_db",
    )
    assert next(csv.reader(io.StringIO(text))) == [
        "scheme", "beamforming", "P_dbm", "threshold_db", "value", "n_samples",
    ]
