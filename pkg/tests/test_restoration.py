"""
U-Net restoration network, sampling and latent-feature injection
"""

import pytest
import torch

from irconstyle.constyle import ConStyleEncoder, LatentBundle, encode
from irconstyle.errors import ConfigError, DimensionError, ModelError
from irconstyle.restoration import (
    AffineInjector,
    Downsample,
    GatedBlock,
    NetConfig,
    Upsample,
    affine_inject,
    build,
    forward,
)
from irconstyle.tensor_engine import Activation, count_parameters, grad_check, ops, seeded

from conftest import tiny_constyle_config, tiny_net_config


def bundle_for(images, seed=0):
    with seeded(seed):
        encoder = ConStyleEncoder(tiny_constyle_config())
    return encode(encoder, images)


def randomize(module, seed=0, scale=0.1):
    generator = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for p in module.parameters():
            p.copy_(torch.randn(p.shape, generator=generator, dtype=p.dtype) * scale)


class TestNetConfig:

    def test_mismatched_block_lists_rejected(self):
        with pytest.raises(ValueError):
            NetConfig(levels=3, blocks_left=[1, 1])

    def test_reference_builds(self):
        net = build(NetConfig.reference())
        report = net.parameter_report()
        assert report["restoration"] > 0 and report["injectors"] > 0
        assert report["restoration"] + report["injectors"] == count_parameters(net)

    def test_stage_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            build(tiny_net_config(levels=2, blocks_left=[1, 1], blocks_right=[1, 1]), tiny_constyle_config())


class TestSampling:

    def test_downsample_shape(self):
        assert Downsample(8, 16)(torch.randn(1, 8, 16, 16)).shape == (1, 16, 8, 8)

    def test_round_trip_shape(self):
        x = torch.randn(2, 8, 6, 10)
        assert Upsample(16, 8)(Downsample(8, 16)(x)).shape == x.shape

    def test_odd_input_rejected(self):
        with pytest.raises(DimensionError):
            Downsample(8, 16)(torch.randn(1, 8, 5, 6))

    def test_gradient_flows(self):
        with seeded(0):
            down, up = Downsample(4, 8).double(), Upsample(8, 4).double()
        x = torch.randn(1, 4, 4, 4, dtype=torch.float64)
        weight = torch.randn(1, 4, 4, 4, dtype=torch.float64)
        assert grad_check(lambda x: ops.sum(ops.mul(up(down(x)), weight)), [x]) < 1e-4


class TestAffineInject:

    def test_zero_init_is_identity(self):
        features = torch.randn(2, 8, 4, 4)
        assert torch.equal(affine_inject(AffineInjector(4, 8), features, torch.randn(2, 4, 4, 4)), features)

    def test_unit_gamma_doubles(self):
        injector = AffineInjector(4, 8)
        with torch.no_grad():
            injector.to_scale.bias.fill_(1.0)
        features = torch.randn(2, 8, 4, 4)
        assert torch.equal(affine_inject(injector, features, torch.randn(2, 4, 4, 4)), 2 * features)

    def test_sensitive_once_weights_are_nonzero(self):
        injector = AffineInjector(4, 8)
        randomize(injector)
        features, latent = torch.randn(2, 8, 4, 4), torch.randn(2, 4, 4, 4)
        changed = affine_inject(injector, features, latent + 0.5)
        assert float((changed - affine_inject(injector, features, latent)).abs().max()) > 0

    def test_scale_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            affine_inject(AffineInjector(4, 8), torch.randn(1, 8, 4, 4), torch.randn(1, 4, 8, 8))


class TestRestorationNet:

    def test_smoke_config(self):
        net = build(tiny_net_config(width=8), tiny_constyle_config())
        images = torch.rand(1, 3, 32, 32)
        assert forward(net, images, bundle_for(images)).shape == images.shape

    def test_shape_preserved_at_128(self):
        net = build(tiny_net_config(), tiny_constyle_config())
        images = torch.rand(1, 3, 128, 128)
        assert forward(net, images, bundle_for(images)).shape == images.shape

    def test_same_seed_same_parameters(self):
        a = build(tiny_net_config(), tiny_constyle_config(), seed=4)
        b = build(tiny_net_config(), tiny_constyle_config(), seed=4)
        assert all(torch.equal(x, y) for x, y in zip(a.parameters(), b.parameters()))

    def test_indivisible_input_rejected(self):
        net = build(tiny_net_config(), tiny_constyle_config())
        with pytest.raises(DimensionError):
            forward(net, torch.rand(1, 3, 20, 16), None, inject=False)

    def test_inject_false_ignores_bundle(self):
        net = build(tiny_net_config(), tiny_constyle_config())
        randomize(net.injectors, seed=1)
        randomize(net.code_fusion, seed=2)
        images = torch.rand(1, 3, 16, 16)
        bundle = bundle_for(images)
        out = forward(net, images, bundle, inject=False)
        assert torch.equal(out, forward(net, images, bundle.zeros_like(), inject=False))
        assert torch.equal(out, forward(net, images, None, inject=False))

    def test_injection_is_sensitive(self):
        net = build(tiny_net_config(), tiny_constyle_config())
        randomize(net.injectors, seed=1)
        randomize(net.code_fusion, seed=2)
        images = torch.rand(1, 3, 16, 16)
        bundle = bundle_for(images)
        diff = forward(net, images, bundle) - forward(net, images, bundle.zeros_like())
        assert float(diff.abs().max()) > 0

    def test_fresh_net_ignores_bundle(self):
        net = build(tiny_net_config(), tiny_constyle_config())
        images = torch.rand(1, 3, 16, 16)
        bundle = bundle_for(images)
        assert torch.equal(forward(net, images, bundle), forward(net, images, bundle, inject=False))

    def test_initial_output_bounded(self):
        net = build(tiny_net_config(), tiny_constyle_config())
        images = torch.rand(2, 3, 32, 32)
        out = forward(net, images, bundle_for(images))
        assert bool(torch.isfinite(out).all())
        assert float((out - images).abs().max()) < 10.0

    def test_gated_blocks(self):
        net = build(tiny_net_config(block_kind="gated"), tiny_constyle_config())
        assert any(isinstance(m, GatedBlock) for m in net.modules())
        images = torch.rand(1, 3, 16, 16)
        assert forward(net, images, bundle_for(images)).shape == images.shape

    def test_end_to_end_gradient(self):
        net = build(tiny_net_config(activation="gelu"), tiny_constyle_config(activation="gelu"), seed=3).double()
        randomize(net.injectors, seed=5)
        randomize(net.code_fusion, seed=6)
        generator = torch.Generator().manual_seed(0)
        bundle = LatentBundle(
            code=torch.nn.functional.normalize(torch.randn(1, 8, generator=generator, dtype=torch.float64), dim=1),
            feature_maps=[torch.randn(1, 4 * 2 ** i, 4 // 2 ** i, 4 // 2 ** i, generator=generator,
                                      dtype=torch.float64) for i in range(3)],
        )
        x = torch.rand(1, 3, 8, 8, generator=generator, dtype=torch.float64)
        weight = torch.randn(1, 3, 8, 8, generator=generator, dtype=torch.float64)
        assert grad_check(lambda x: ops.sum(ops.mul(net(x, bundle), weight)), [x]) < 1e-3

    def test_activation_kind_validated(self):
        with pytest.raises(ModelError):
            Activation("tanh")
