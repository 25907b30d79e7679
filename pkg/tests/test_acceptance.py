"""
Desk-scale training probes; set CONSTYLE_RUN_PROBES=1 to enable
"""

import pytest

from irconstyle.degradations import GaussianNoiseSpec, write_corpus
from irconstyle.trainer import evaluate, run_ablation, train

from conftest import RUN_PROBES, tiny_constyle_config, tiny_net_config, tiny_train_config

pytestmark = [
    pytest.mark.slow,
    pytest.mark.skipif(not RUN_PROBES, reason="set CONSTYLE_RUN_PROBES=1 to run training probes"),
]

SIGMA = GaussianNoiseSpec(sigma=25.0)


@pytest.fixture
def probe_corpus(tmp_path):
    return {
        "train": write_corpus(tmp_path / "train", count=12, size=128, seed=0),
        "eval": write_corpus(tmp_path / "eval", count=4, size=128, seed=100),
    }


def probe_config(probe_corpus, total_iters):
    return tiny_train_config(
        patch=64,
        batch=4,
        total_iters=total_iters,
        queue_capacity=256,
        checkpoint_every=total_iters,
        log_every=100,
        net=tiny_net_config(width=16),
        constyle=tiny_constyle_config(width=16, latent_dim=128, head_width=256, mlp_hidden=1024, queue_capacity=256),
        degradation=SIGMA,
        train_manifest=str(probe_corpus["train"]),
        eval_manifest=str(probe_corpus["eval"]),
    )


class TestProbes:

    def test_noisy_baseline(self, probe_corpus):
        report = evaluate(None, probe_corpus["eval"], SIGMA, seed=0)
        assert report.psnr_db == pytest.approx(20.17, abs=0.5)

    def test_training_beats_noisy_input(self, probe_corpus, tmp_path):
        cfg = probe_config(probe_corpus, 2000)
        state = train(cfg, output_dir=tmp_path / "run")
        restored = evaluate(state.model, probe_corpus["eval"], SIGMA, seed=0)
        noisy = evaluate(None, probe_corpus["eval"], SIGMA, seed=0)
        assert restored.psnr_db - noisy.psnr_db >= 2.0

    def test_ablation_direction(self, probe_corpus, tmp_path):
        report = run_ablation(probe_config(probe_corpus, 500), output_dir=str(tmp_path / "ablation"))
        assert set(report.variants) == {"g1_small_queue", "g2_no_feature_maps", "g3_queue_behind_momentum"}
        # direction only; not asserted
        print(report.model_dump_json())
