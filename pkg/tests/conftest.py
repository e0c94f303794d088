import pytest

from capeval.corpus import Corpus, Example


def make_example(id, text, label="positive", domain="src", split=None):
    return Example(id=id, text=text, label=label, domain=domain, split=split)


@pytest.fixture
def toy_corpus():
    """Small two-target corpus with a validation split on the source."""
    examples = [
        make_example("s1", "this is not good", "negative", "src", "validation"),
        make_example("s2", "i would have liked it", "negative", "src", "validation"),
        make_example("s3", "works better than expected", "positive", "src", "validation"),
        make_example("s4", "solid product overall", "positive", "src", "validation"),
        make_example("s5", "training only example", "positive", "src", "train"),
        make_example("t1", "do not buy", "negative", "tgt_a"),
        make_example("t2", "really great value", "positive", "tgt_a"),
        make_example("t3", "worse than advertised", "negative", "tgt_b"),
        make_example("t4", "happy with it", "positive", "tgt_b"),
    ]
    return Corpus(
        examples=tuple(examples),
        source_domain="src",
        target_domains=("tgt_a", "tgt_b"),
    )
