"""Python bindings for the fighting-game agent arena."""

import json

try:
    from . import _arena
except ImportError:
    import _arena

ENGINE_VERSION = _arena.ENGINE_VERSION
REPLAY_FORMAT = _arena.REPLAY_FORMAT
ArenaError = _arena.ArenaError
IllegalAction = _arena.IllegalAction
RoundOver = _arena.RoundOver
TerminalState = _arena.TerminalState
ConfigError = _arena.ConfigError
AgentInitError = _arena.AgentInitError
FormatError = _arena.FormatError
VersionMismatch = _arena.VersionMismatch
EmptyLog = _arena.EmptyLog
Game = _arena.Game
data_dir = _arena.data_dir
resolve_interaction = _arena.resolve_interaction


def state(game):
    """The game's state frame as a dict."""
    return json.loads(game.state_json())


def observe(game, side):
    return json.loads(game.observation_json(side))


def run_match(config, base=None):
    """Plays a match from a config dict; returns the replay as JSON lines."""
    return _arena.run_match_json(json.dumps(config), base or data_dir())


def replay_records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def verify_replay(text):
    return _arena.verify_replay_text(text)


def mine(replays, max_len=3, pool_size=5):
    """Mines an FSM definition dict from replay texts."""
    return json.loads(_arena.mine_json(list(replays), max_len, pool_size))


def run_tournament(roster, games=10, seed=0, workers=1, base=None):
    return json.loads(_arena.run_tournament_json(json.dumps(roster), base or data_dir(), games, seed, workers))
