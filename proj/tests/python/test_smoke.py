import pytest

import pdanet

MN_3_1 = [[0, 1, 2], [1, 0, 3], [2, 3, 0]]


def test_construct_and_verify():
    p = pdanet.construct_mn(3, 1)
    assert p.rows() == MN_3_1
    assert (p.k, p.f, p.z, p.s) == (3, 3, 1, 3)
    assert p.rate() == "1"
    assert pdanet.verify(MN_3_1)["valid"]


def test_verify_reports_violation():
    r = pdanet.verify([[0, 1, 2], [1, 0, 3], [3, 2, 0]])
    assert not r["valid"]
    assert r["violations"]


def test_parse_round_trip():
    p = pdanet.construct_mn(4, 2)
    assert pdanet.parse_pda(p.to_text()) == p
    with pytest.raises(ValueError):
        pdanet.parse_pda("3 3 1 3\n* 1 2\n")


def test_canonicalize():
    assert pdanet.canonicalize([[0, 7], [7, 0]]) == [[0, 1], [1, 0]]


def test_graph_round_trip_and_subsample():
    p = pdanet.construct_mn(4, 2)
    g = pdanet.pda_to_graph(p)
    assert g.is_strong_coloring()
    assert g.color_count() == 4
    assert pdanet.graph_to_pda(g) == p
    assert pdanet.graph_to_pda(pdanet.parse_graph(g.to_json())) == p
    s = pdanet.subsample(g, 2, 5)
    q = pdanet.graph_to_pda(s)
    assert q.z == p.f - 2
    assert pdanet.verify(q.rows())["valid"]
    with pytest.raises(ValueError):
        pdanet.subsample(g, 3, 5)


def test_greedy_color():
    g = pdanet.pda_to_graph(pdanet.construct_mn(3, 1))
    uncolored = pdanet.parse_graph('{"k":3,"f":3,"edges":[[1,2,null],[1,3,null],[2,1,null],[2,3,null],[3,1,null],[3,2,null]]}')
    assert uncolored.edges() == g.uncolored().edges()
    for shuffled in (False, True):
        c = pdanet.greedy_color(uncolored, shuffled=shuffled, seed=3)
        assert c.is_strong_coloring()
        assert c.color_count() >= g.color_count()


def test_train_and_color():
    g = pdanet.pda_to_graph(pdanet.construct_mn(4, 2))
    corpus = [pdanet.training_pair(pdanet.graph_to_pda(pdanet.subsample(g, 2, i))) for i in range(6)]
    assert len(pdanet.parse_corpus(pdanet.format_corpus(corpus))) == 6
    model, log = pdanet.train(corpus, supervised_epochs=3, hidden=6, seed=2)
    assert log.splitlines()[0].startswith("epoch,")
    assert len(log.splitlines()) == 5
    rows, valid, logprob = pdanet.color_placement(4, 6, 3, model, mask=True)
    assert valid
    assert logprob <= 0.0
    assert pdanet.verify(rows, 3)["valid"]


def test_model_checkpoint(tmp_path):
    m = pdanet.Model.init(hidden=4, embed=3, max_rows=5, max_cols=4, seed=9)
    path = str(tmp_path / "m.json")
    m.save(path)
    assert pdanet.Model.load(path).parameter_count() == m.parameter_count()


def test_simulate():
    r = pdanet.simulate(pdanet.construct_mn(3, 1), 3)
    assert r["all_decoded"]
    assert r["delivery_rate"] == "1"
    assert r["uncoded_rate"] == "2"
    assert r["trials"] == 27
