import json

import pytest

import spanforge as sf


def looked_up(split=sf.Split.TRAIN, sid="s1"):
    words = ["looked", "the", "information", "up"]
    toks = [sf.Token(w, head=i - 1 if i else None) for i, w in enumerate(words)]
    return sf.Sentence(sid, toks, [sf.MweAnnotation([0, 3], sf.MweType.VERB)], split)


def test_projection_round_trip():
    p = sf.project(looked_up())
    assert p == {"start": [1, 0, 0, 0], "end": [0, 0, 0, 1], "inside": [0, 0, 0, 0]}
    cfg = sf.ReconstructionConfig()
    cfg.overlap = sf.OverlapPolicy.ALLOW_ALL
    cfg.dep_filter = False
    out = sf.reconstruct(p["start"], p["end"], p["inside"], sf.Thresholds(0.5, 0.5, 0.5), cfg)
    assert [idx for idx, _ in out] == [[0, 3]]


def test_metrics():
    assert sf.micro_prf(268, 119, 113) == {"precision": 69.3, "recall": 70.3, "f1": 69.8}
    gold = sf.Corpus("g", [looked_up(sf.Split.TEST)])
    report = sf.evaluate({"s1": [[0, 3]]}, gold)
    assert report["counts"] == {"tp": 1, "fp": 0, "fn": 0}


def test_distances_and_errors():
    assert sf.dep_distances([None, 0, 1])[0] == [0, 1, 2]
    with pytest.raises(sf.StructureError):
        sf.dep_distances([1, 0])
    with pytest.raises(sf.ValidationError):
        sf.Sentence("x", [sf.Token("a"), sf.Token("b")], [sf.MweAnnotation([1, 1])])
    assert issubclass(sf.IntegrityError, sf.SpanforgeError)


def test_artifact_and_pipeline(tmp_path):
    train = [looked_up(sid=f"t{k}") for k in range(8)]
    test = [looked_up(sf.Split.TEST, sid=f"e{k}") for k in range(2)]
    corpus = sf.Corpus("toy", train + test)
    sf.write_corpus(corpus, tmp_path / "c.jsonl")
    digest = sf.write_artifact(corpus, "v1", tmp_path / "a.json")
    assert sf.verify_artifact(tmp_path / "a.json") == digest
    text = (tmp_path / "a.json").read_text().replace('"start":[1', '"start":[0', 1)
    (tmp_path / "a.json").write_text(text)
    with pytest.raises(sf.IntegrityError):
        sf.verify_artifact(tmp_path / "a.json")

    assert len(sf.augment(sf.Corpus("t", train), "oversample", 0.25, seed=3)) == 10

    manifest = {"corpus": "c.jsonl", "thresholds": {"start": 0.5, "end": 0.5, "inside": 0.5},
                "output_dir": "out", "seed": 1}
    (tmp_path / "run.json").write_text(json.dumps(manifest))
    summary = sf.run_pipeline(tmp_path / "run.json")
    assert summary["micro"]["f1"] == 100.0
    assert (tmp_path / "out" / "manifest.json").exists()
