#!/usr/bin/env python3
"""Walk through slicing a tiny hand-written corpus and scoring two models.

The capability catalog turns a plain corpus into overlapping behavioral
test suites: every example whose text contains one of a capability's
keywords joins that capability's slice.  A model's accuracy on a slice is
its score for that capability; 1 - accuracy is the failure rate.

Run:  python3 demos/01_slice_and_score.py
"""

from capeval.catalog import default_catalog
from capeval.corpus import Corpus, Example
from capeval.evaluation import PredictionSet, build_score_matrix, failure_rate
from capeval.slicer import instantiate

# A ten-example corpus: eight "books" source reviews and two "music"
# target reviews.  Texts are chosen so several catalog capabilities fire.
TEXTS = [
    ("b0", "this novel is not worth the praise", "negative", "books"),
    ("b1", "couldn't put it down, loved every page", "positive", "books"),
    ("b2", "the plot is better than the film version", "positive", "books"),
    ("b3", "i would have enjoyed it with a stronger ending", "negative", "books"),
    ("b4", "really gripping and very well written", "positive", "books"),
    ("b5", "good ideas but the pacing drags", "negative", "books"),
    ("b6", "nothing about this sequel works", "negative", "books"),
    ("b7", "kind of slow, still a decent read", "positive", "books"),
    ("m0", "the remaster sounds worse than the original", "negative", "music"),
    ("m1", "an incredibly catchy record", "positive", "music"),
]

corpus = Corpus(
    examples=tuple(Example(i, t, l, d) for i, t, l, d in TEXTS),
    source_domain="books",
    target_domains=("music",),
)

catalog = default_catalog()
print(f"catalog: {len(catalog.capabilities)} capabilities\n")

# 1. Instantiate the capabilities over the source examples.
slices = instantiate(catalog, corpus.source_examples())
print("slice membership over the books reviews:")
for s in slices:
    members = ", ".join(sorted(s.member_ids)) or "-"
    print(f"  {s.capability_name:<12} coverage {s.coverage:.2f}  [{members}]")

# 2. Score two hand-made models.  Model A gets negation wrong; model B is
# wrong on the comparative examples instead.
truth = {e.id: e.label for e in corpus.examples}
flip = {"positive": "negative", "negative": "positive"}
model_a = PredictionSet(
    "model_a", {i: flip[truth[i]] if i in ("b0", "b1", "b6") else truth[i] for i in truth}
)
model_b = PredictionSet(
    "model_b", {i: flip[truth[i]] if i in ("b2", "m0") else truth[i] for i in truth}
)

scores = build_score_matrix([model_a, model_b], corpus, [s for s in slices if s.member_ids])
print("\ncapability scores (slice accuracies):")
header = "  model     " + "".join(f"{n:>14}" for n in scores.feature_names)
print(header)
for i, model_id in enumerate(scores.model_ids):
    row = "".join(f"{scores.features[i, j]:>14.2f}" for j in range(scores.features.shape[1]))
    print(f"  {model_id:<10}{row}")

print("\nfailure rates on the negation slice:")
negation = next(s for s in slices if s.capability_name == "negation")
src = corpus.source_examples()
members = [e for e in src if e.id in negation.member_ids]
for ps in (model_a, model_b):
    print(f"  {ps.model_id}: {failure_rate(ps, members):.2f}")

print("\ntarget-domain (music) accuracies:")
for i, model_id in enumerate(scores.model_ids):
    print(f"  {model_id}: {scores.targets['music'][i]:.2f}")
