import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semlink.core import (
    BitBlock,
    InputError,
    LengthError,
    ParameterError,
    SymbolFrame,
)
from semlink.modem import LLR_CLIP, QAM16, demap_llr, map_symbols


def _symbols_for(bit_lists):
    return map_symbols(BitBlock(np.concatenate(bit_lists))).symbols


class TestConstellation:
    def test_unit_average_energy(self):
        assert abs(np.mean(np.abs(QAM16.points) ** 2) - 1.0) < 1e-12

    def test_sixteen_distinct_points(self):
        assert len(set(np.round(QAM16.points, 12).tolist())) == 16

    def test_gray_neighbours_differ_one_bit(self):
        # Any two points at the minimum geometric distance must have labels
        # differing in exactly one bit.
        pts = QAM16.points
        dmin = np.min([abs(a - b) for i, a in enumerate(pts)
                       for b in pts[i + 1:]])
        for i in range(16):
            for j in range(i + 1, 16):
                if abs(pts[i] - pts[j]) < dmin * 1.001:
                    assert bin(i ^ j).count("1") == 1, (i, j)

    def test_golden_corner_points(self):
        s = 1 / np.sqrt(10)
        got = _symbols_for([[0, 0, 0, 0], [1, 1, 1, 1], [0, 1, 1, 0], [1, 0, 0, 1]])
        assert got[0] == pytest.approx(s * (1 + 1j))
        assert got[1] == pytest.approx(s * (-3 - 3j))
        assert got[2] == pytest.approx(s * (3 - 1j))
        assert got[3] == pytest.approx(s * (-1 + 3j))

    def test_first_bit_sets_real_sign(self):
        got = _symbols_for([[0, 0, 0, 0], [1, 0, 0, 0]])
        assert got[0].real > 0 > got[1].real
        assert got[0].imag == got[1].imag


class TestMapping:
    def test_length_must_be_multiple_of_four(self):
        with pytest.raises(LengthError):
            map_symbols(BitBlock([1, 0, 1]))

    def test_empty_maps_to_empty(self):
        assert len(map_symbols(BitBlock([]))) == 0

    @given(st.lists(st.integers(0, 1), min_size=4, max_size=64).filter(
        lambda b: len(b) % 4 == 0))
    def test_symbol_count(self, bits):
        assert len(map_symbols(BitBlock(bits))) == len(bits) // 4


class TestDemapping:
    def test_hard_decisions_recover_bits_at_high_snr(self):
        rng = np.random.default_rng(10)
        bits = BitBlock(rng.integers(0, 2, 4000).astype(np.uint8))
        frame = map_symbols(bits)
        llr = demap_llr(frame, None, 1e-3)
        hard = (llr.llrs < 0).astype(np.uint8)
        assert np.array_equal(hard, bits.bits)

    def test_positive_llr_means_zero(self):
        # A symbol exactly on the all-zeros label must favour 0 on every bit.
        frame = map_symbols(BitBlock([0, 0, 0, 0]))
        llr = demap_llr(frame, None, 0.1)
        assert np.all(llr.llrs > 0)

    @pytest.mark.parametrize("method", ["exact", "maxlog"])
    def test_clipping(self, method):
        frame = map_symbols(BitBlock([1, 1, 1, 1]))
        llr = demap_llr(frame, None, 1e-9, method=method)
        assert np.all(np.abs(llr.llrs) <= LLR_CLIP)

    def test_methods_agree_in_sign_on_noisy_data(self):
        rng = np.random.default_rng(11)
        bits = BitBlock(rng.integers(0, 2, 2000).astype(np.uint8))
        y = map_symbols(bits).symbols + 0.12 * (
            rng.normal(size=500) + 1j * rng.normal(size=500))
        exact = demap_llr(SymbolFrame(y), None, 0.0288).llrs
        maxlog = demap_llr(SymbolFrame(y), None, 0.0288, method="maxlog").llrs
        both_confident = np.minimum(np.abs(exact), np.abs(maxlog)) > 1e-6
        assert np.all(np.sign(exact[both_confident]) == np.sign(maxlog[both_confident]))

    def test_equalization_equivalence(self):
        # demap(h*x + n, csi=h, N0) must match demap(x + n/h, csi=1,
        # N0/|h|^2) in sign: same hypothesis distances, different rounding.
        rng = np.random.default_rng(12)
        bits = BitBlock(rng.integers(0, 2, 400).astype(np.uint8))
        x = map_symbols(bits).symbols
        h = (rng.normal(size=100) + 1j * rng.normal(size=100)) / np.sqrt(2)
        n = 0.1 * (rng.normal(size=100) + 1j * rng.normal(size=100))
        n0 = 0.02
        faded = demap_llr(SymbolFrame(h * x + n), h, n0).llrs
        equalized = np.concatenate([
            demap_llr(SymbolFrame((x[i] + n[i] / h[i])[None]), None,
                      n0 / abs(h[i]) ** 2).llrs
            for i in range(100)])
        confident = np.minimum(np.abs(faded), np.abs(equalized)) > 1e-9
        assert np.all(np.sign(faded[confident]) == np.sign(equalized[confident]))

    def test_noise_var_scale_keeps_maxlog_signs(self):
        # Max-log LLRs compare nearest-point distances, so any positive
        # rescaling of N0 only rescales magnitudes; signs are invariant.
        rng = np.random.default_rng(13)
        bits = BitBlock(rng.integers(0, 2, 2000).astype(np.uint8))
        y = map_symbols(bits).symbols + 0.3 * (
            rng.normal(size=500) + 1j * rng.normal(size=500))
        base = demap_llr(SymbolFrame(y), None, 0.05, method="maxlog").llrs
        for scale in (0.01, 0.5, 2.0, 100.0):
            scaled = demap_llr(SymbolFrame(y), None, 0.05 * scale,
                               method="maxlog").llrs
            confident = np.minimum(np.abs(base), np.abs(scaled)) > 1e-9
            assert np.all(np.sign(base[confident]) == np.sign(scaled[confident])), scale

    def test_noise_var_scale_keeps_exact_llr_signs_at_operating_noise(self):
        # only for modest N0 mismatch: past ~2x the shared-centroid
        # crossover (see the counterexample below) flips marginal
        # amplitude bits even at operating noise
        rng = np.random.default_rng(13)
        bits = BitBlock(rng.integers(0, 2, 2000).astype(np.uint8))
        y = map_symbols(bits).symbols + 0.2 * (
            rng.normal(size=500) + 1j * rng.normal(size=500))
        base = demap_llr(SymbolFrame(y), None, 0.05).llrs
        for scale in (0.5, 2.0):
            scaled = demap_llr(SymbolFrame(y), None, 0.05 * scale).llrs
            confident = np.minimum(np.abs(base), np.abs(scaled)) > 1e-9
            assert np.all(np.sign(base[confident]) == np.sign(scaled[confident])), scale

    @pytest.mark.xfail(
        strict=True,
        reason="exact log-sum-exp LLR signs are provably not invariant under "
               "N0 scaling: both amplitude-bit hypothesis sets share a "
               "centroid, so at large N0 the lower-energy set always wins "
               "and outer-point receptions flip sign (maxlog has no such "
               "crossover)")
    def test_exact_llr_scale_invariance_counterexample(self):
        y = QAM16.points[15]  # outer corner, all-ones label
        low = demap_llr(SymbolFrame([y]), None, 1.0).llrs
        high = demap_llr(SymbolFrame([y]), None, 2.0).llrs
        assert np.all(np.sign(low) == np.sign(high))

    def test_bad_noise_var(self):
        frame = map_symbols(BitBlock([0, 0, 0, 0]))
        with pytest.raises(ParameterError):
            demap_llr(frame, None, 0.0)
        with pytest.raises(ParameterError):
            demap_llr(frame, None, -1.0)

    def test_non_finite_symbols_rejected(self):
        with pytest.raises(InputError):
            demap_llr(SymbolFrame([np.nan + 0j]), None, 0.1)

    def test_csi_length_mismatch(self):
        frame = map_symbols(BitBlock([0, 0, 0, 0, 1, 1, 1, 1]))
        with pytest.raises(LengthError):
            demap_llr(frame, np.ones(3, dtype=complex), 0.1)

    def test_unknown_method(self):
        frame = map_symbols(BitBlock([0, 0, 0, 0]))
        with pytest.raises(ParameterError):
            demap_llr(frame, None, 0.1, method="approx")

    # noise_var stays below ~1: past that the exact LLR of an outer point
    # legitimately drifts toward the inner-set prior (see the strict-xfail
    # counterexample above).
    @given(st.integers(0, 15), st.floats(0.01, 0.75))
    @settings(max_examples=60)
    def test_clean_symbol_decodes_to_own_label(self, label, noise_var):
        bits = [(label >> 3) & 1, (label >> 2) & 1, (label >> 1) & 1, label & 1]
        frame = map_symbols(BitBlock(bits))
        llr = demap_llr(frame, None, noise_var)
        hard = (llr.llrs < 0).astype(np.uint8)
        assert hard.tolist() == bits
