import pytest
import torch

from kapyr import PatchDiscriminator


def test_score_map_shape():
    torch.manual_seed(0)
    disc = PatchDiscriminator(layers=4)
    score = disc(torch.rand(3, 64, 64))
    assert score.shape == (1, 4, 4)
    batched = disc(torch.rand(2, 3, 64, 64))
    assert batched.shape == (2, 1, 4, 4)


def test_layer_count_validation():
    with pytest.raises(ValueError, match="at least 2"):
        PatchDiscriminator(layers=1)


def test_too_small_input():
    disc = PatchDiscriminator(layers=4)
    with pytest.raises(ValueError, match="too small"):
        disc(torch.rand(3, 8, 8))


def test_zero_weights_constant_bias():
    disc = PatchDiscriminator(layers=2)
    with torch.no_grad():
        for p in disc.parameters():
            p.zero_()
        disc.head.bias.fill_(0.37)
    score = disc(torch.rand(3, 16, 16))
    assert torch.allclose(score, torch.full_like(score, 0.37))


def test_deterministic_given_parameters():
    torch.manual_seed(1)
    disc = PatchDiscriminator(layers=2)
    x = torch.rand(3, 16, 16)
    assert torch.equal(disc(x), disc(x))
    # scores must not depend on other batch elements (up to conv backend
    # batching differences, which are below 1e-6)
    pair = torch.stack([x, torch.rand(3, 16, 16)])
    assert torch.allclose(disc(pair)[0], disc(x.unsqueeze(0))[0], atol=1e-6, rtol=1e-5)


def test_input_gradient_matches_finite_differences():
    torch.manual_seed(2)
    disc = PatchDiscriminator(layers=2, base_channels=4).double()
    x = torch.rand(3, 16, 16, dtype=torch.float64, requires_grad=True)
    (analytic,) = torch.autograd.grad(disc(x).mean(), x)
    h = 1e-6
    for idx in [(0, 3, 3), (1, 8, 12), (2, 15, 0)]:
        x_plus = x.detach().clone()
        x_plus[idx] += h
        x_minus = x.detach().clone()
        x_minus[idx] -= h
        fd = (disc(x_plus).mean() - disc(x_minus).mean()).item() / (2 * h)
        a = analytic[idx].item()
        rel = abs(a - fd) / max(abs(a), abs(fd), 1e-6)
        assert rel <= 1e-3, (idx, a, fd)
