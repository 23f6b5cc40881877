import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semlink.bridge import (
    ATANH_CLAMP_EPS,
    FMT_FIXED16,
    FMT_FP32,
    HEADER_BITS,
    bits_to_tensor,
    squash,
    tensor_to_bits,
    unsquash,
)
from semlink.core import (
    BitBlock,
    FrameError,
    HiddenTensor,
    InputError,
    ParameterError,
)


def _flatten(blocks):
    return np.concatenate([b.bits for b in blocks])


def _flip(blocks, index):
    flat = _flatten(blocks).copy()
    flat[index] ^= 1
    width = blocks[0].bits.size
    return [BitBlock(flat[i:i + width]) for i in range(0, flat.size, width)]


class TestGoldenVectors:
    def test_fp32_layout(self, golden):
        case = golden["bridge"]["fp32_1x3_cap128"]
        tensor = HiddenTensor(np.array([case["values"]], dtype=np.float32))
        blocks, header = tensor_to_bits(tensor, case["capacity_bits"], fmt=case["fmt"])
        assert header.block_count == len(case["blocks_hex"]) == len(blocks)
        assert header.fmt == FMT_FP32
        for block, expected_hex in zip(blocks, case["blocks_hex"]):
            assert np.packbits(block.bits).tobytes().hex() == expected_hex

    def test_fixed16_layout(self, golden):
        case = golden["bridge"]["fixed16_1x2_cap96"]
        tensor = HiddenTensor(np.array([case["values"]], dtype=np.float32))
        blocks, header = tensor_to_bits(tensor, case["capacity_bits"], fmt=case["fmt"])
        assert header.fmt == FMT_FIXED16
        for block, expected_hex in zip(blocks, case["blocks_hex"]):
            assert np.packbits(block.bits).tobytes().hex() == expected_hex


class TestRoundTrip:
    def test_fp32_bit_exact(self):
        rng = np.random.default_rng(11)
        values = rng.uniform(-1, 1, size=(3, 7)).astype(np.float32)
        tensor = HiddenTensor(values)
        blocks, _ = tensor_to_bits(tensor, 512, fmt="fp32")
        out = bits_to_tensor(blocks)
        assert out.rows == 3 and out.cols == 7
        assert np.array_equal(out.values, values)

    def test_fixed16_quantization_error(self):
        rng = np.random.default_rng(12)
        values = rng.uniform(-1, 1, size=(2, 50)).astype(np.float32)
        blocks, _ = tensor_to_bits(HiddenTensor(values), 512, fmt="fixed16")
        out = bits_to_tensor(blocks)
        # at most half a step of the 16-bit grid over [-1, 1]
        assert np.max(np.abs(out.values - values)) <= 1.0 / 65535 + 1e-7

    def test_fixed16_endpoints_exact(self):
        values = np.array([[-1.0, 1.0]], dtype=np.float32)
        blocks, _ = tensor_to_bits(HiddenTensor(values), 256, fmt="fixed16")
        out = bits_to_tensor(blocks)
        assert np.array_equal(out.values, values)

    def test_padding_is_invisible(self):
        values = np.array([[0.25]], dtype=np.float32)
        small, _ = tensor_to_bits(HiddenTensor(values), 256)
        large, _ = tensor_to_bits(HiddenTensor(values), 1024)
        assert bits_to_tensor(small) == bits_to_tensor(large)

    def test_header_spanning_multiple_blocks(self):
        # capacity far below the header size still reassembles cleanly
        values = np.array([[0.5, -0.25]], dtype=np.float32)
        blocks, header = tensor_to_bits(HiddenTensor(values), 32)
        assert header.block_count == (HEADER_BITS + 64) // 32
        assert bits_to_tensor(blocks) == HiddenTensor(values)

    @settings(max_examples=60, deadline=None)
    @given(
        rows=st.integers(1, 4),
        cols=st.integers(1, 16),
        seed=st.integers(0, 2**31),
    )
    def test_fp32_roundtrip_property(self, rows, cols, seed):
        rng = np.random.default_rng(seed)
        values = rng.uniform(-1, 1, size=(rows, cols)).astype(np.float32)
        blocks, _ = tensor_to_bits(HiddenTensor(values), 1024, fmt="fp32")
        assert np.array_equal(bits_to_tensor(blocks).values, values)


class TestValidation:
    def test_out_of_range_rejected(self):
        with pytest.raises(InputError):
            tensor_to_bits(HiddenTensor([[1.5]]), 256)

    def test_non_finite_rejected(self):
        with pytest.raises(InputError):
            tensor_to_bits(HiddenTensor([[np.nan]]), 256)

    def test_zero_capacity_rejected(self):
        with pytest.raises(ParameterError):
            tensor_to_bits(HiddenTensor([[0.0]]), 0)

    def test_unknown_format(self):
        with pytest.raises(ParameterError):
            tensor_to_bits(HiddenTensor([[0.0]]), 256, fmt="fp64")

    def test_empty_block_list(self):
        with pytest.raises(FrameError):
            bits_to_tensor([])

    def test_header_declares_more_than_stream(self):
        # three 96-bit blocks; dropping the tail leaves too few payload bits
        blocks, header = tensor_to_bits(HiddenTensor([[0.5, -0.5]]), 96)
        assert header.block_count == 3
        with pytest.raises(FrameError):
            bits_to_tensor(blocks[:-1])

    def test_zero_dims_rejected(self):
        blocks, _ = tensor_to_bits(HiddenTensor([[0.5]]), 256)
        flat = _flatten(blocks).copy()
        flat[:64] = 0  # rows = cols = 0
        bad = [BitBlock(flat)]
        with pytest.raises(FrameError):
            bits_to_tensor(bad)

    def test_unknown_format_id_rejected(self):
        blocks, _ = tensor_to_bits(HiddenTensor([[0.5]]), 256)
        flat = _flatten(blocks).copy()
        flat[128:160] = 1  # format id becomes garbage
        with pytest.raises(FrameError):
            bits_to_tensor([BitBlock(flat)])

    def test_shape_payload_mismatch_rejected(self):
        blocks, _ = tensor_to_bits(HiddenTensor([[0.5]]), 256)
        flat = _flatten(blocks).copy()
        # bump cols (little-endian uint32 at bits 32..64) without touching
        # payload_bits
        flat[32] ^= 1
        with pytest.raises(FrameError):
            bits_to_tensor([BitBlock(flat)])


# Little-endian fp32 in an MSB-first bit stream: the value's byte 3 (fp
# bits 31..24) is streamed last, so the sign bit sits 24 bits into the
# value and the top exponent bit right after it.
_SIGN_BIT = HEADER_BITS + 24
_EXP_TOP_BIT = HEADER_BITS + 25


class TestCorruption:
    def test_sign_bit_flip_in_raw_mode_survives(self):
        blocks, _ = tensor_to_bits(HiddenTensor([[0.5]]), 256)
        bad = _flip(blocks, _SIGN_BIT)
        out = bits_to_tensor(bad, sanitize="raw")
        assert out.values[0, 0] == np.float32(-0.5)

    def test_exponent_flip_of_one_overflows_raw(self):
        # 1.0 = 0x3f800000; flipping bit 30 gives 0x7f800000 = +inf
        blocks, _ = tensor_to_bits(HiddenTensor([[1.0]]), 256)
        bad = _flip(blocks, _EXP_TOP_BIT)
        out = bits_to_tensor(bad, sanitize="raw")
        assert np.isinf(out.values[0, 0]) and out.values[0, 0] > 0

    def test_exponent_flip_of_one_is_clamped(self):
        blocks, _ = tensor_to_bits(HiddenTensor([[1.0]]), 256)
        bad = _flip(blocks, _EXP_TOP_BIT)
        out = bits_to_tensor(bad, sanitize="clamp")
        assert out.values[0, 0] == np.float32(1.0)

    def test_clamp_fuzz_never_produces_nonfinite(self):
        rng = np.random.default_rng(13)
        values = rng.uniform(-1, 1, size=(2, 8)).astype(np.float32)
        blocks, _ = tensor_to_bits(HiddenTensor(values), 512)
        total = sum(b.bits.size for b in blocks)
        for _ in range(500):
            bad = _flip(blocks, int(rng.integers(HEADER_BITS, total)))
            out = bits_to_tensor(bad, sanitize="clamp")
            assert np.all(np.isfinite(out.values))
            assert np.all(np.abs(out.values) <= 1.0)

    def test_fixed16_payload_damage_stays_in_range(self):
        values = np.zeros((1, 16), dtype=np.float32)
        blocks, _ = tensor_to_bits(HiddenTensor(values), 512, fmt="fixed16")
        total = sum(b.bits.size for b in blocks)
        rng = np.random.default_rng(14)
        for _ in range(200):
            bad = _flip(blocks, int(rng.integers(HEADER_BITS, total)))
            out = bits_to_tensor(bad, sanitize="raw")
            assert np.all(np.abs(out.values) <= 1.0)

    def test_unknown_sanitize_policy(self):
        blocks, _ = tensor_to_bits(HiddenTensor([[0.0]]), 256)
        with pytest.raises(ParameterError):
            bits_to_tensor(blocks, sanitize="ignore")


class TestSquash:
    def test_inverse_on_interior(self):
        x = HiddenTensor(np.linspace(-4, 4, 101, dtype=np.float32)[None, :])
        back = unsquash(squash(x))
        assert np.allclose(back.values, x.values, atol=1e-3)

    def test_output_in_closed_interval(self):
        x = HiddenTensor(np.array([[-1e6, 1e6]], dtype=np.float32))
        y = squash(x)
        assert np.all(np.abs(y.values) <= 1.0)

    def test_squash_rejects_non_finite(self):
        with pytest.raises(InputError):
            squash(HiddenTensor([[np.inf]]))

    def test_unsquash_clamps_saturated_input(self):
        y = HiddenTensor(np.array([[1.0, -1.0]], dtype=np.float32))
        x = unsquash(y)
        assert np.all(np.isfinite(x.values))
        expected = np.arctanh(1.0 - ATANH_CLAMP_EPS)
        assert x.values[0, 0] == pytest.approx(expected, rel=1e-5)
        assert x.values[0, 1] == pytest.approx(-expected, rel=1e-5)

    def test_unsquash_bad_eps(self):
        with pytest.raises(ParameterError):
            unsquash(HiddenTensor([[0.0]]), clamp_eps=0.0)
