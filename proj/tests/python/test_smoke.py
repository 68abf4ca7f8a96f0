# Copyright 2026 The csrover Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import pathlib

import pytest

import csrover

CONFIG = json.dumps({
    "seed": 3,
    "corpus": {"synthetic": {"utterances": 120}},
    "profiles": [
        {"name": "A", "match_eng": 0.45, "match_man": 0.85},
        {"name": "B", "match_eng": 0.85, "match_man": 0.45},
    ],
    "ensembles": [{"name": "pair", "members": [{"profile": "A"}, {"profile": "B"}]}],
})


def test_tokenize_and_render():
    tokens = csrover.tokenize("我们 Don't 学习 the C++")
    assert tokens[:3] == [("我", "man"), ("们", "man"), ("don't", "eng")]
    assert csrover.tokenize(csrover.render(tokens)) == tokens
    assert csrover.category(tokens) == "code-switched"


def test_unsupported_script():
    with pytest.raises(csrover.UnsupportedScriptError):
        csrover.tokenize("ab ы")
    with pytest.raises(ValueError):
        csrover.tokenize("ab ы")


def test_align_tie_break():
    ops = csrover.align("我是学生", "我 like 生")
    assert [op[0] for op in ops] == ["match", "sub", "del", "match"]


def test_score():
    report = csrover.score({"u1": "我 like 你"}, {"u1": "我 love 你"})
    assert report["mer_all"] == pytest.approx(100.0 / 3)
    assert report["subs"] == 1
    with pytest.raises(csrover.MissingHypothesisError):
        csrover.score({"u1": "a"}, {})


def test_combine_single_system_is_identity():
    hyp = [("我", "man", 0.9), ("ok", "eng", 0.4)]
    out = csrover.combine({"s1": {"u": hyp}})
    assert [t[:2] for t in out["u"]] == [t[:2] for t in hyp]


def test_combine_max_conf():
    out = csrover.combine({
        "a": {"u": [("x", "eng", 0.9)]},
        "b": {"u": [("y", "eng", 0.3)]},
        "c": {"u": [("y", "eng", 0.4)]},
    })
    assert out["u"][0][0] == "x"
    out = csrover.combine({
        "a": {"u": [("x", "eng", 0.9)]},
        "b": {"u": [("y", "eng", 0.3)]},
        "c": {"u": [("y", "eng", 0.4)]},
    }, alpha=1.0)
    assert out["u"][0][0] == "y"


def test_lm_normalized_and_roundtrip(tmp_path):
    texts = {"a": "我 是 good", "b": "good 我", "c": "是 我 是"}
    lm = csrover.TrigramLM.train(texts)
    history = csrover.tokenize("我")
    total = sum(lm.prob(history, t) for t in lm.vocabulary) + lm.prob(history)
    assert total < 1.0 and total == pytest.approx(1.0, abs=1e-5)
    path = tmp_path / "lm.txt"
    lm.save(str(path))
    again = csrover.TrigramLM.load(str(path))
    assert again.perplexity(texts) == pytest.approx(lm.perplexity(texts))


def test_simulate_deterministic():
    refs = {"u%d" % i: "我 是 the good 学生 ok" for i in range(20)}
    a = csrover.simulate(refs, 0.5, 0.8, seed=11)
    b = csrover.simulate(refs, 0.5, 0.8, seed=11)
    assert a == b
    assert csrover.simulate(refs, 1.0, 1.0)["u0"] and all(
        t[:2] == r for t, r in zip(csrover.simulate(refs, 1.0, 1.0)["u0"], csrover.tokenize(refs["u0"])))


def test_run_ensemble_and_provenance(tmp_path):
    result = csrover.run_ensemble(CONFIG, "pair")
    assert result["system_id"] == "ROVER(A,B)"
    assert result["table"].split("\n")[0].split() == [
        "CER(M)", "WER(E)", "MER(CS)", "MER(All)", "%Eng-as-Man", "%Man-as-Eng", "System"]
    replay = csrover.run_ensemble(result["provenance"], "pair")
    assert replay["report_json"] == result["report_json"]
    path = tmp_path / "config.json"
    path.write_text(CONFIG)
    assert csrover.run_ensemble(str(path), "pair")["report_json"] == result["report_json"]


def test_config_errors():
    with pytest.raises(csrover.ValidationError, match="profiles"):
        csrover.run_ensemble(CONFIG.replace("0.45", "1.45", 1), "pair")
    with pytest.raises(csrover.IoError):
        csrover.run_ensemble("/nonexistent/config.json", "pair")
