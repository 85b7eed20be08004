import numpy as np
import pytest

from fptrace import (
    BinaryCode,
    NoiseSpec,
    SyndromeExtractor,
    average_signature,
    embed,
    extract_syndrome,
    forge,
    make_carriers,
    make_host,
    random_code,
)
from fptrace.attack import Syndrome, noise_coefficients


@pytest.fixture
def setup():
    code = random_code(6, 5, 11)
    carriers = make_carriers(6, 15, 3)
    host = make_host(15, 6, 4)
    return code, carriers, host


def test_carriers_orthonormal():
    F = make_carriers(4, 4, 7)
    assert np.abs(F.gram() - np.eye(4)).max() < 1e-10
    assert make_carriers(40, 60, 1).is_orthonormal()


def test_single_carrier_unit_vector():
    F = make_carriers(1, 3, 5)
    assert np.linalg.norm(F.vectors[0]) == pytest.approx(1.0, abs=1e-12)


def test_carrier_dimension_error():
    with pytest.raises(ValueError):
        make_carriers(3, 2, 0)


def test_carriers_deterministic():
    a, b = make_carriers(5, 9, 42), make_carriers(5, 9, 42)
    assert np.array_equal(a.vectors, b.vectors)


def test_host_norm():
    x = make_host(50, 16, 0)
    assert np.linalg.norm(x) == pytest.approx(400.0)


def test_embed_zero_column_is_host(setup):
    _, carriers, host = setup
    code = BinaryCode(np.zeros((6, 2), dtype=int))
    assert np.array_equal(embed(host, carriers, code, 1), host)


def test_embed_pick_out_basis_vector():
    carriers = make_carriers(3, 5, 1)
    code = BinaryCode(np.array([[0], [1], [0]]))
    y = embed(np.zeros(5), carriers, code, 1)
    assert np.allclose(y, carriers.vectors[1], atol=1e-15)


def test_embed_projection_identity(setup):
    code, carriers, host = setup
    for user in range(1, code.M + 1):
        s = extract_syndrome(embed(host, carriers, code, user), host, carriers).s
        assert np.abs(s - code.column(user)).max() < 1e-9


def test_embed_errors(setup):
    code, carriers, host = setup
    with pytest.raises(IndexError):
        embed(host, carriers, code, 6)
    with pytest.raises(ValueError):
        embed(host[:-1], carriers, code, 1)
    with pytest.raises(ValueError):
        embed(host, make_carriers(5, 15, 0), code, 1)


def test_forge_singleton_equals_embed(setup):
    code, carriers, host = setup
    assert np.allclose(forge(code, [3], host, carriers), embed(host, carriers, code, 3), atol=1e-12)


def test_forge_noiseless_syndrome_is_signature(setup):
    code, carriers, host = setup
    for coalition in ([1, 2], [2, 4, 5], [1, 2, 3, 4, 5]):
        s = extract_syndrome(forge(code, coalition, host, carriers), host, carriers).s
        sigma = average_signature(code, coalition).to_float()
        assert np.abs(s - sigma).max() < 1e-9


@pytest.mark.parametrize("seed", range(30))
def test_ball_noise_within_radius(setup, seed):
    code, carriers, host = setup
    noise = NoiseSpec("ball", delta=0.3, seed=seed)
    s = extract_syndrome(forge(code, [1, 3], host, carriers, noise), host, carriers).s
    sigma = average_signature(code, [1, 3]).to_float()
    assert np.linalg.norm(s - sigma) <= 0.3 + 1e-9


@pytest.mark.parametrize("seed", range(30))
def test_sparse_noise_support(setup, seed):
    code, carriers, host = setup
    noise = NoiseSpec("sparse", T=2, magnitude=5.0, seed=seed)
    s = extract_syndrome(forge(code, [2, 5], host, carriers, noise), host, carriers).s
    sigma = average_signature(code, [2, 5]).to_float()
    assert np.count_nonzero(np.abs(s - sigma) > 1e-9) <= 2
    assert np.abs(s - sigma).max() <= 5.0 + 1e-9


def test_sparse_noise_clamped_with_warning():
    with pytest.warns(UserWarning):
        e = noise_coefficients(NoiseSpec("sparse", T=9, seed=1), 4)
    assert np.count_nonzero(e) <= 4


def test_sparse_indices_distinct_and_uniformish():
    counts = np.zeros(5)
    for seed in range(2000):
        e = noise_coefficients(NoiseSpec("sparse", T=2, seed=seed), 5)
        assert np.count_nonzero(e) == 2
        counts += e != 0
    # each index picked with probability 2/5
    assert np.all(np.abs(counts / 2000 - 0.4) < 0.05)


def test_noise_spec_parse():
    assert NoiseSpec.parse("none").kind == "none"
    ball = NoiseSpec.parse("ball:delta=0.25", seed=3)
    assert (ball.kind, ball.delta, ball.seed) == ("ball", 0.25, 3)
    sparse = NoiseSpec.parse("sparse:T=2")
    assert (sparse.T, sparse.magnitude) == (2, 1.0)
    assert NoiseSpec.parse("sparse:T=3,mag=2.5").magnitude == 2.5
    assert NoiseSpec.parse(str(NoiseSpec.parse("sparse:T=3,mag=2.5"))).magnitude == 2.5
    for bad in ("ball", "ball:delta=-1", "sparse:T=-1", "gauss:sigma=1", "sparse:T=1,mag=0"):
        with pytest.raises(ValueError):
            NoiseSpec.parse(bad)


def test_syndrome_linearity(setup):
    _, carriers, host = setup
    rng = np.random.default_rng(0)
    u, v = rng.normal(size=(2, carriers.N))
    a, b = 2.5, -0.75
    lhs = extract_syndrome(host + a * u + b * v, host, carriers).s
    rhs = a * extract_syndrome(host + u, host, carriers).s + b * extract_syndrome(host + v, host, carriers).s
    assert np.abs(lhs - rhs).max() < 1e-8


def test_extract_zero_and_unit(setup):
    _, carriers, host = setup
    assert np.abs(extract_syndrome(host, host, carriers).s).max() == 0
    s = extract_syndrome(host + carriers.vectors[2], host, carriers).s
    assert np.abs(s - np.eye(6)[2]).max() < 1e-9
    with pytest.raises(ValueError):
        extract_syndrome(host[:3], host, carriers)


def test_forge_deterministic(setup):
    code, carriers, host = setup
    noise = NoiseSpec("ball", delta=0.5, seed=9)
    assert np.array_equal(forge(code, [1, 2], host, carriers, noise), forge(code, [1, 2], host, carriers, noise))


def test_syndrome_json_round_trip():
    s = Syndrome(np.array([0.5, 1.0, 0.0]))
    back = Syndrome.from_json(s.to_json())
    assert np.array_equal(back.s, s.s)
    with pytest.raises(ValueError):
        Syndrome.from_json('{"n": 2, "s": [1.0]}')


def test_syndrome_extractor_transformer(setup):
    code, carriers, host = setup
    Y = np.stack([forge(code, c, host, carriers) for c in ([1], [2, 3])])
    S = SyndromeExtractor(host, carriers).fit_transform(Y)
    assert S.shape == (2, 6)
    assert np.abs(S[1] - average_signature(code, [2, 3]).to_float()).max() < 1e-9
    assert SyndromeExtractor(host, carriers).get_params()["carriers"] is carriers
