import json

import pytest

import pyarena


def versus(left, right, seed=0, **extra):
    return {"seed": seed, "character": "default", "agents": {"left": left, "right": right}, **extra}


def test_triad():
    assert pyarena.resolve_interaction("Attack", "Grab") == "LeftWins"
    assert pyarena.resolve_interaction("Grab", "Block") == "LeftWins"
    assert pyarena.resolve_interaction("Block", "Attack") == "LeftWins"
    assert pyarena.resolve_interaction("Attack", "Attack") == "Trade"
    with pytest.raises(pyarena.ConfigError):
        pyarena.resolve_interaction("Dance", "Idle")


def test_game_steps():
    g = pyarena.Game(seed=1)
    assert len(g.legal_actions("left")) == 7
    assert "Grab" in g.legal_actions("right")
    g.advance("MoveRight", "MoveLeft")
    assert g.tick == 1
    s = pyarena.state(g)
    assert s["fighters"][0]["position"] > 40
    assert s["fighters"][1]["position"] < 60
    assert pyarena.observe(g, "left")["own_health"] == 100
    assert g.round_winner() is None
    with pytest.raises(pyarena.ConfigError):
        g.advance("Teleport", "Idle")


def test_plan_is_seeded():
    g = pyarena.Game(seed=2)
    a = g.plan("left", iterations=100, seed=5)
    assert a == g.plan("left", iterations=100, seed=5)
    assert a in g.legal_actions("left")


def test_match_replay_roundtrip():
    text = pyarena.run_match(versus({"kind": "random"}, {"kind": "mcts", "mcts": {"iterations": 20}}, seed=3))
    records = pyarena.replay_records(text)
    assert records[0]["type"] == "header"
    assert records[-1]["type"] == "footer"
    assert len(records[-1]["digest"]) == 64
    assert pyarena.verify_replay(text)
    assert text == pyarena.run_match(versus({"kind": "random"}, {"kind": "mcts", "mcts": {"iterations": 20}}, seed=3))

    tick = next(i for i, r in enumerate(records) if r["type"] == "tick")
    tampered = list(records)
    actions = tampered[tick]["a"]
    actions[0] = "Block" if actions[0] != "Block" else "Idle"
    text2 = "\n".join(json.dumps(r) for r in tampered) + "\n"
    assert not pyarena.verify_replay(text2)


def test_bad_inputs_raise():
    with pytest.raises(pyarena.ConfigError):
        pyarena.run_match(versus({"kind": "oracle"}, {"kind": "random"}))
    with pytest.raises(pyarena.FormatError):
        pyarena.verify_replay("not a replay")
    with pytest.raises(pyarena.EmptyLog):
        pyarena.mine([])


def test_mine_and_tournament():
    texts = [pyarena.run_match(versus({"kind": "fsm", "fsm_file": "fsm/enemy.json"}, {"kind": "random"}, seed=s))
             for s in range(2)]
    fsm = pyarena.mine(texts, max_len=2, pool_size=3)
    assert len(fsm["states"]) == 9
    result = pyarena.run_tournament({"agents": [{"kind": "random", "name": "a"},
                                                {"kind": "input_reading", "difficulty": 1.0, "name": "b"}]},
                                    games=2, seed=1)
    assert result["matches"] == 4
    assert result["standings"][0]["name"] == "b"
