"""Delay-constrained random access over an unreliable collision channel.

A discrete-time simulator for an ALOHA user sharing a channel with learning
agents, four tabular access schemes (FSQA, FSRA, HSRA, TSRA), and an exact
full-information MDP whose dual-LP optimum upper-bounds the achievable
system timely throughput.
"""

from .agents import (AgentConfig, LearningAgent, ValueTable, act_epsilon_greedy,
                     aloha_act, encode_full, encode_hol, encode_tiny, epsilon,
                     q_learning_update, r_learning_update, reward_with_offset)
from .channel import (Action, Feedback, Observation, SlotOutcome, observation_for,
                      resolve_slot, timely_throughput)
from .env import Environment, UserSpec, agent_user, aloha_user, two_user_env
from .harness import (ExperimentConfig, ExperimentRecord, SummaryRow,
                      convergence_trace, load_config, mean_table, run_single, sweep)
from .mdp import (FullMdpState, GeniePolicy, TransitionModel, build_lp,
                  build_transition_model, d1_genie_value, d1_optimal,
                  enumerate_states, evaluate_policy_by_simulation, extract_policy,
                  lp_upper_bound, solve_lp, transition_row)
from .params import (Bernoulli, DEFAULT_PARAMS, Poisson, SystemParams,
                     sample_arrivals)
from .queues import PacketQueue, QueueEmptyError

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
