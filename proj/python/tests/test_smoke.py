import numpy as np
import pytest

import locrho

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
IDENTITY = [np.eye(2, dtype=complex)]


def test_mh_identity_channel_gives_half_swap():
    op = locrho.local_density_operator("mh", np.eye(2) / 2, IDENTITY)
    assert op.dtype == np.complex128
    assert np.abs(op - SWAP / 2).max() < 1e-15


def test_measure_matches_operator():
    rho = locrho.random_density(3, seed=1)
    kraus = locrho.random_channel(3, 2, 2, seed=2)
    op = locrho.local_density_operator("kd", rho, kraus)
    p = np.diag([1, 0, 0]).astype(complex)
    q = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    assert abs(locrho.measure_eval("kd", rho, kraus, p, q) - np.trace(op @ np.kron(p, q))) < 1e-12


def test_reconstruct_round_trip():
    rho = locrho.random_density(2, seed=3)
    op = locrho.local_density_operator("ls", rho, locrho.random_channel(2, 3, 2, seed=4))
    r = locrho.reconstruct(op, (2, 3))
    assert np.abs(r["operator"] - op).max() < 1e-10
    assert r["violations"] == []


def test_lvn_pure_state_is_not_additive():
    report = locrho.verify_measure("lvn", np.diag([1, 0]).astype(complex), IDENTITY, trials=5)
    assert not report["consistent"]
    assert report["violated"] == ["local additivity"]
    with pytest.raises(locrho.DomainError):
        locrho.local_density_operator("lvn", np.diag([1, 0]).astype(complex), IDENTITY)


def test_counterexample_family_classification():
    op = locrho.counterexample_family(0.0)
    c = locrho.classify(op, (2, 2))
    assert c["local_density"] and not c["psd"]
    assert np.linalg.eigvalsh(op).min() < -1e-3
    t = locrho.canonical_form_test(op, (2, 2))
    assert t["verdict"] is False and t["kraus"] is None
    assert locrho.canonical_form_test(locrho.counterexample_family(1.0), (2, 2))["kraus"] is not None


def test_bayes_and_reflection():
    op = np.kron(np.diag([0.6, 0.4]), np.diag([0.3, 0.7])).astype(complex)
    z = [np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex)]
    table = locrho.joint_table(op, (2, 2), z, z)
    assert table["joint"][0][1] == pytest.approx([0.42, 0.0])
    assert np.abs(locrho.reflect(op, (2, 2)) - np.kron(np.diag([0.3, 0.7]), np.diag([0.6, 0.4]))).max() < 1e-15


def test_correlation_modes_agree():
    rho = locrho.random_density(2, seed=5)
    kraus = locrho.random_channel(2, 2, 2, seed=6)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1, -1]).astype(complex)
    assert abs(locrho.correlation("mh", rho, kraus, x, z) - locrho.correlation("mh", rho, kraus, x, z, "trace")) < 1e-12


def test_input_errors():
    with pytest.raises(locrho.InputError):
        locrho.local_density_operator("xx", np.eye(2) / 2, IDENTITY)
    with pytest.raises(locrho.DomainError):
        locrho.local_density_operator("mh", np.eye(2) / 2, [0.9 * np.eye(2)])
    assert locrho.schema_version == 1
