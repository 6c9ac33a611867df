"""Encode/decode paths against the literal vertex-domain filter bank,
storage accounting, and the model file format."""

import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gfred.codec import (
    Domain,
    ModelFile,
    ReducedData,
    StorageBudget,
    compression_bound,
    convert_domain,
    kron_reconstruct,
    kron_reduce,
    load_model,
    reconstruct,
    reconstruction_mse,
    reduce,
    reducing_taps,
    save_model,
)
from gfred.errors import (
    CorruptFile,
    DimensionMismatch,
    FingerprintMismatch,
    VersionMismatch,
)
from gfred.optimizer import FilterModel, fit, init_filters, objective
from gfred.spectral import build_cache, gft, igft

from oracles import random_filters, random_instance


def make_model(inst, taps, coeffs) -> FilterModel:
    return FilterModel(
        order=taps.shape[0] - 1,
        k=taps.shape[2],
        recon_taps=taps,
        coeffs=coeffs,
        mean=inst.ds.mean.copy(),
        spectrum_fingerprint=inst.spectrum.fingerprint(),
    )


class TestAgainstKroneckerBank:

    def test_reduce_matches_literal_bank(self):
        rng = np.random.default_rng(90)
        for _ in range(8):
            n = int(rng.integers(3, 8))
            dim = int(rng.integers(2, 6))
            order = int(rng.integers(0, 4))
            k = int(rng.integers(1, dim + 1))
            inst = random_instance(rng, n=n, dim=dim, order=order)
            taps, coeffs = random_filters(rng, inst.cache, k)
            model = make_model(inst, taps, coeffs)
            fast = reduce(model, inst.ds, inst.spectrum, cache=inst.cache)
            assert fast.domain is Domain.VERTEX
            literal = kron_reduce(
                inst.spectrum.adjacency,
                reducing_taps(model, inst.cache),
                inst.ds.centered,
            )
            scale = max(1.0, np.abs(literal).max())
            assert np.abs(fast.values - literal).max() <= 1e-10 * scale

    def test_reconstruct_matches_literal_bank(self):
        rng = np.random.default_rng(91)
        for _ in range(8):
            n = int(rng.integers(3, 8))
            dim = int(rng.integers(2, 6))
            order = int(rng.integers(0, 4))
            k = int(rng.integers(1, dim + 1))
            inst = random_instance(rng, n=n, dim=dim, order=order)
            taps, coeffs = random_filters(rng, inst.cache, k)
            model = make_model(inst, taps, coeffs)
            reduced = ReducedData(values=rng.normal(size=(k, n)), domain=Domain.VERTEX)
            fast = reconstruct(model, reduced, inst.spectrum) - model.mean[:, None]
            literal = kron_reconstruct(inst.spectrum.adjacency, taps, reduced.values)
            scale = max(1.0, np.abs(literal).max())
            assert np.abs(fast - literal).max() <= 1e-10 * scale

    def test_reduce_gives_baseline_scores_at_order_zero(self):
        # at order 0 the seeded reducing filter reproduces the projection
        # onto the top principal directions, node by node
        rng = np.random.default_rng(92)
        inst = random_instance(rng, n=10, dim=4, order=0)
        taps, coeffs = init_filters(inst.ds, inst.cache, 2)
        model = make_model(inst, taps, coeffs)
        reduced = reduce(model, inst.ds, inst.spectrum)
        scores = taps[0].T @ inst.ds.centered
        assert np.allclose(reduced.values, scores, rtol=1e-6, atol=1e-9)


class TestRoundTrips:

    def test_full_rank_model_reconstructs_exactly(self):
        rng = np.random.default_rng(93)
        inst = random_instance(rng, n=12, dim=3, order=0)
        taps = np.eye(3)[None, :, :]
        solved, *_ = np.linalg.lstsq(inst.cache.kernel, inst.cache.gft_data.T, rcond=None)
        model = make_model(inst, taps, solved.T)
        recon = reconstruct(model, reduce(model, inst.ds, inst.spectrum), inst.spectrum)
        X = inst.ds.centered + inst.ds.mean[:, None]
        assert np.abs(recon - X).max() <= 1e-9 * max(1.0, np.abs(X).max())

    def test_zero_reduced_decodes_to_the_mean(self):
        rng = np.random.default_rng(94)
        inst = random_instance(rng, n=6, dim=4, order=2)
        taps, coeffs = random_filters(rng, inst.cache, 2)
        model = make_model(inst, taps, coeffs)
        reduced = ReducedData(values=np.zeros((2, 6)), domain=Domain.VERTEX)
        recon = reconstruct(model, reduced, inst.spectrum)
        assert np.allclose(recon, model.mean[:, None], atol=1e-12)

    def test_mse_agrees_with_training_objective(self):
        # the transform is an isometry, so vertex-domain error equals the
        # spectral-domain cost the trainer minimizes
        rng = np.random.default_rng(95)
        inst = random_instance(rng, n=9, dim=5, order=1)
        result = fit(inst.ds, inst.spectrum, k=2, order=1, max_iters=15)
        mse = reconstruction_mse(result.model, inst.ds, inst.spectrum, cache=inst.cache)
        direct = objective(inst.cache, result.model.recon_taps, result.model.coeffs)
        assert mse == pytest.approx(direct, rel=1e-9)

    def test_domain_conversion_round_trip(self):
        rng = np.random.default_rng(96)
        inst = random_instance(rng, n=7, dim=3, order=0)
        values = rng.normal(size=(2, 7))
        vertex = ReducedData(values=values, domain=Domain.VERTEX)
        spect = convert_domain(vertex, Domain.SPECTRAL, inst.spectrum)
        assert spect.domain is Domain.SPECTRAL
        # orthonormal change of coordinates preserves energy
        assert np.isclose(np.linalg.norm(spect.values), np.linalg.norm(values), rtol=1e-12)
        back = convert_domain(spect, Domain.VERTEX, inst.spectrum)
        assert np.allclose(back.values, values, atol=1e-12)
        assert convert_domain(vertex, Domain.VERTEX, inst.spectrum) is vertex

    def test_reconstruct_accepts_either_domain(self):
        rng = np.random.default_rng(97)
        inst = random_instance(rng, n=8, dim=4, order=1)
        taps, coeffs = random_filters(rng, inst.cache, 2)
        model = make_model(inst, taps, coeffs)
        vertex = reduce(model, inst.ds, inst.spectrum)
        spect = convert_domain(vertex, Domain.SPECTRAL, inst.spectrum)
        a = reconstruct(model, vertex, inst.spectrum)
        b = reconstruct(model, spect, inst.spectrum)
        assert np.allclose(a, b, rtol=1e-10, atol=1e-12)


class TestGuards:

    def test_wrong_spectrum_is_rejected(self):
        rng = np.random.default_rng(98)
        inst = random_instance(rng, n=6, dim=3, order=1)
        other = random_instance(np.random.default_rng(4242), n=6, dim=3, order=1)
        taps, coeffs = random_filters(rng, inst.cache, 2)
        model = make_model(inst, taps, coeffs)
        with pytest.raises(FingerprintMismatch):
            reduce(model, other.ds, other.spectrum)
        reduced = ReducedData(values=np.zeros((2, 6)), domain=Domain.VERTEX)
        with pytest.raises(FingerprintMismatch):
            reconstruct(model, reduced, other.spectrum)

    def test_mismatched_cache_is_rejected(self):
        rng = np.random.default_rng(99)
        inst = random_instance(rng, n=6, dim=3, order=1)
        taps, coeffs = random_filters(rng, inst.cache, 2)
        model = make_model(inst, taps, coeffs)
        stale = build_cache(inst.ds.centered, inst.spectrum, order=2)
        with pytest.raises(DimensionMismatch):
            reduce(model, inst.ds, inst.spectrum, cache=stale)
        reduced = ReducedData(values=np.zeros((2, 6)), domain=Domain.VERTEX)
        with pytest.raises(DimensionMismatch):
            reconstruct(model, reduced, inst.spectrum, cache=stale)

    def test_reduced_shape_is_checked(self):
        rng = np.random.default_rng(100)
        inst = random_instance(rng, n=6, dim=3, order=0)
        taps, coeffs = random_filters(rng, inst.cache, 2)
        model = make_model(inst, taps, coeffs)
        bad = ReducedData(values=np.zeros((3, 6)), domain=Domain.VERTEX)
        with pytest.raises(DimensionMismatch):
            reconstruct(model, bad, inst.spectrum)


class TestStorageAccounting:

    def test_reference_configuration(self):
        assert compression_bound(140, 784, 1) == 54

    def test_wide_image_configuration(self):
        bound = compression_bound(100, 10**6, 1)
        assert bound == 49
        assert abs(bound - 50) <= 1

    def test_tiny_configurations(self):
        assert compression_bound(1, 2, 0) == 0
        # stored(k=1) equals raw exactly here, strict inequality drops it
        assert compression_bound(2, 7, 0) == 0
        budget = StorageBudget.from_dims(2, 7, 1, 0)
        assert budget.stored_scalars == budget.raw_scalars == 14

    def test_exhaustive_against_linear_search(self):
        for n in range(1, 13):
            for dim in range(1, 16):
                for order in range(3):
                    best, k = 0, 1
                    while True:
                        stored = StorageBudget.from_dims(n, dim, k, order).stored_scalars
                        if stored < n * dim:
                            best, k = k, k + 1
                        else:
                            break
                    assert compression_bound(n, dim, order) == best, (n, dim, order)

    @given(
        n=st.integers(min_value=1, max_value=400),
        dim=st.integers(min_value=1, max_value=400),
        order=st.integers(min_value=0, max_value=6),
    )
    @settings(max_examples=300, deadline=None)
    def test_bound_is_the_strict_crossover(self, n, dim, order):
        bound = compression_bound(n, dim, order)
        raw = n * dim
        if bound >= 1:
            assert StorageBudget.from_dims(n, dim, bound, order).stored_scalars < raw
        assert StorageBudget.from_dims(n, dim, bound + 1, order).stored_scalars >= raw

    @given(
        n=st.integers(min_value=1, max_value=300),
        dim=st.integers(min_value=1, max_value=300),
        k=st.integers(min_value=1, max_value=50),
        order=st.integers(min_value=0, max_value=6),
    )
    @settings(max_examples=200, deadline=None)
    def test_budget_formulas(self, n, dim, k, order):
        b = StorageBudget.from_dims(n, dim, k, order)
        assert b.stored_scalars == k * (order + 1) * dim + 2 * k * n + n * (n + 1) // 2
        assert b.raw_scalars == n * dim
        assert b.pca_scalars == k * (dim + n)

    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            StorageBudget.from_dims(0, 3, 1, 0)
        with pytest.raises(ValueError):
            StorageBudget.from_dims(3, 3, 1, -1)
        with pytest.raises(ValueError):
            compression_bound(0, 3, 0)


def saved_fixture(tmp_path, domain=Domain.VERTEX, seed=101):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n=7, dim=4, order=1)
    result = fit(inst.ds, inst.spectrum, k=2, order=1, max_iters=8)
    reduced = reduce(result.model, inst.ds, inst.spectrum, cache=inst.cache)
    reduced = convert_domain(reduced, domain, inst.spectrum)
    path = tmp_path / "model.gfm"
    save_model(result.model, inst.spectrum, reduced, path)
    return inst, result.model, reduced, path


class TestModelFile:

    def test_round_trip_is_bit_exact(self, tmp_path):
        inst, model, reduced, path = saved_fixture(tmp_path)
        loaded = load_model(path)
        assert isinstance(loaded, ModelFile)
        assert np.array_equal(loaded.model.recon_taps, model.recon_taps)
        assert np.array_equal(loaded.model.coeffs, model.coeffs)
        assert np.array_equal(loaded.model.mean, model.mean)
        assert np.array_equal(loaded.spectrum.eigvals, inst.spectrum.eigvals)
        assert np.array_equal(loaded.spectrum.eigvecs, inst.spectrum.eigvecs)
        assert np.array_equal(loaded.reduced.values, reduced.values)
        assert loaded.reduced.domain is Domain.VERTEX
        assert loaded.model.order == model.order and loaded.model.k == model.k
        # the fingerprint binds the reloaded model to the reloaded spectrum
        assert loaded.model.spectrum_fingerprint == loaded.spectrum.fingerprint()

    def test_spectral_domain_survives(self, tmp_path):
        _, _, reduced, path = saved_fixture(tmp_path, domain=Domain.SPECTRAL)
        loaded = load_model(path)
        assert loaded.reduced.domain is Domain.SPECTRAL
        assert np.array_equal(loaded.reduced.values, reduced.values)

    def test_reloaded_model_decodes_identically(self, tmp_path):
        inst, model, reduced, path = saved_fixture(tmp_path)
        loaded = load_model(path)
        a = reconstruct(model, reduced, inst.spectrum)
        b = reconstruct(loaded.model, loaded.reduced, loaded.spectrum)
        assert np.array_equal(a, b)

    def test_writing_twice_gives_identical_bytes(self, tmp_path):
        inst, model, reduced, path = saved_fixture(tmp_path)
        other = tmp_path / "again.gfm"
        save_model(model, inst.spectrum, reduced, other)
        assert path.read_bytes() == other.read_bytes()

    def test_header_is_json_with_accounting(self, tmp_path):
        _, model, _, path = saved_fixture(tmp_path)
        blob = path.read_bytes()
        assert blob[:4] == b"GFM1"
        (hlen,) = struct.unpack("<I", blob[4:8])
        header = json.loads(blob[8 : 8 + hlen])
        budget = StorageBudget.from_dims(7, 4, 2, 1)
        assert header["version"] == 1
        assert header["n"] == 7 and header["D"] == 4
        assert header["k"] == 2 and header["L"] == 1
        assert header["stored_scalars"] == budget.stored_scalars
        assert header["raw_scalars"] == budget.raw_scalars
        assert header["pca_scalars"] == budget.pca_scalars

    def test_save_rejects_mismatched_pieces(self, tmp_path):
        inst, model, reduced, _ = saved_fixture(tmp_path)
        other = random_instance(np.random.default_rng(555), n=7, dim=4, order=1)
        with pytest.raises(FingerprintMismatch):
            save_model(model, other.spectrum, reduced, tmp_path / "x.gfm")
        bad = ReducedData(values=np.zeros((3, 7)), domain=Domain.VERTEX)
        with pytest.raises(DimensionMismatch):
            save_model(model, inst.spectrum, bad, tmp_path / "y.gfm")


class TestCorruption:

    def test_bad_magic(self, tmp_path):
        _, _, _, path = saved_fixture(tmp_path)
        blob = path.read_bytes()
        (tmp_path / "bad.gfm").write_bytes(b"XXXX" + blob[4:])
        with pytest.raises(CorruptFile):
            load_model(tmp_path / "bad.gfm")

    def test_short_file(self, tmp_path):
        (tmp_path / "tiny.gfm").write_bytes(b"GF")
        with pytest.raises(CorruptFile):
            load_model(tmp_path / "tiny.gfm")

    def test_truncated_payload(self, tmp_path):
        _, _, _, path = saved_fixture(tmp_path)
        blob = path.read_bytes()
        (tmp_path / "cut.gfm").write_bytes(blob[:-8])
        with pytest.raises(CorruptFile):
            load_model(tmp_path / "cut.gfm")

    def test_flipped_payload_byte_fails_checksum(self, tmp_path):
        _, _, _, path = saved_fixture(tmp_path)
        blob = bytearray(path.read_bytes())
        blob[-1] ^= 0x01
        (tmp_path / "flip.gfm").write_bytes(bytes(blob))
        with pytest.raises(CorruptFile):
            load_model(tmp_path / "flip.gfm")

    def test_unreadable_header(self, tmp_path):
        _, _, _, path = saved_fixture(tmp_path)
        blob = path.read_bytes()
        (hlen,) = struct.unpack("<I", blob[4:8])
        garbage = blob[:8] + b"{" * hlen + blob[8 + hlen :]
        (tmp_path / "garble.gfm").write_bytes(garbage)
        with pytest.raises(CorruptFile):
            load_model(tmp_path / "garble.gfm")

    def rewrite_header(self, path, out, **changes):
        blob = path.read_bytes()
        (hlen,) = struct.unpack("<I", blob[4:8])
        header = json.loads(blob[8 : 8 + hlen])
        header.update(changes)
        hb = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
        out.write_bytes(blob[:4] + struct.pack("<I", len(hb)) + hb + blob[8 + hlen :])

    def test_unsupported_version(self, tmp_path):
        _, _, _, path = saved_fixture(tmp_path)
        self.rewrite_header(path, tmp_path / "v2.gfm", version=2)
        with pytest.raises(VersionMismatch):
            load_model(tmp_path / "v2.gfm")

    def test_wrong_accounting(self, tmp_path):
        _, _, _, path = saved_fixture(tmp_path)
        self.rewrite_header(path, tmp_path / "acct.gfm", stored_scalars=12345)
        with pytest.raises(CorruptFile):
            load_model(tmp_path / "acct.gfm")

    def test_unknown_domain(self, tmp_path):
        _, _, _, path = saved_fixture(tmp_path)
        self.rewrite_header(path, tmp_path / "dom.gfm", domain="nowhere")
        with pytest.raises(CorruptFile):
            load_model(tmp_path / "dom.gfm")
