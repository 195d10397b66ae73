"""Hex and counter wargame: rules engine, recurrent hex-conv networks, MCTS and self-play training."""

from ._hexwar import (
    Action,
    Agent,
    GameState,
    HexCoord,
    Network,
    action_planes,
    initial_state,
    make_agent,
    play_match,
    scenario_json,
    scenario_names,
    search,
    state_channels,
    train,
)

__all__ = [
    "Action",
    "Agent",
    "GameState",
    "HexCoord",
    "Network",
    "action_planes",
    "initial_state",
    "make_agent",
    "play_match",
    "scenario_json",
    "scenario_names",
    "search",
    "state_channels",
    "train",
]
