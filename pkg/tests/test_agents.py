"""Encoders, exploration schedule, and tabular update arithmetic."""

import numpy as np
import pytest

from dcra.agents import (AgentConfig, LearningAgent, TINY_STATE_COUNT, ValueTable,
                         act_epsilon_greedy, aloha_act, encode_full, encode_hol,
                         encode_tiny, epsilon, full_state_count, hol_state_count,
                         q_learning_update, r_learning_update, reward_with_offset)
from dcra.channel import Action, Observation
from dcra.queues import PacketQueue


class TestEncoders:
    def test_full_zero_state(self):
        assert encode_full((0, 0), Observation.BUSY) == 0

    def test_full_example(self):
        assert encode_full((1, 0), Observation.IDLE) == 6

    def test_full_maximum(self):
        assert encode_full((1, 1), Observation.FAILED) == 15

    def test_hol_examples(self):
        assert encode_hol(0, Observation.BUSY, 3) == 0
        assert encode_hol(2, Observation.SUCCESSFUL, 3) == 9
        assert encode_hol(3, Observation.FAILED, 3) == 15

    def test_hol_out_of_range(self):
        with pytest.raises(ValueError):
            encode_hol(4, Observation.IDLE, 3)

    def test_tiny_examples(self):
        assert encode_tiny(0, Observation.IDLE) == 2
        assert encode_tiny(1, Observation.BUSY) == 4
        assert encode_tiny(1, Observation.FAILED) == 7

    def test_full_bijective_up_to_deadline_six(self):
        for d in range(1, 7):
            seen = set()
            for mask in range(1 << d):
                bits = tuple((mask >> k) & 1 for k in range(d))
                for o in Observation:
                    idx = encode_full(bits, o)
                    assert 0 <= idx < full_state_count(d)
                    seen.add(idx)
            assert len(seen) == full_state_count(d)

    def test_hol_bijective(self):
        for d in range(1, 7):
            seen = {encode_hol(h, o, d) for h in range(d + 1) for o in Observation}
            assert len(seen) == hol_state_count(d)
            assert max(seen) == hol_state_count(d) - 1

    def test_tiny_bijective(self):
        seen = {encode_tiny(f, o) for f in (0, 1) for o in Observation}
        assert seen == set(range(TINY_STATE_COUNT))

    def test_agent_encode_matches_module_encoders(self):
        rng = np.random.default_rng(0)
        for scheme in ("FSRA", "HSRA", "TSRA"):
            agent = LearningAgent(AgentConfig(scheme, 3))
            for _ in range(200):
                counts = [int(rng.integers(0, 2)) for _ in range(3)]
                q = PacketQueue(3, counts)
                o = Observation(int(rng.integers(0, 4)))
                if scheme == "FSRA":
                    want = encode_full(q.presence_bits(), o)
                elif scheme == "HSRA":
                    want = encode_hol(q.hol_lead_time(), o, 3)
                else:
                    want = encode_tiny(q.has_urgent(), o)
                assert agent.encode(q, o) == want

    def test_poisson_counts_clamp_to_presence_bits(self):
        agent = LearningAgent(AgentConfig("FSRA", 2))
        spiky = PacketQueue(2, [3, 0])
        flat = PacketQueue(2, [1, 0])
        assert agent.encode(spiky, Observation.IDLE) == agent.encode(flat, Observation.IDLE)


class TestEpsilon:
    def test_first_slot(self):
        assert epsilon(1) == 1.0

    def test_second_slot(self):
        assert epsilon(2) == 0.995

    def test_floor_binds(self):
        assert epsilon(2000) == 0.01


class TestActEpsilonGreedy:
    def test_exploit_argmax(self):
        table = ValueTable(4)
        table.q[2] = [0.2, 0.7]
        rng = np.random.default_rng(0)
        assert all(act_epsilon_greedy(table, 2, 0.0, rng) == 1 for _ in range(50))

    def test_tie_break_uniform(self):
        table = ValueTable(1)
        rng = np.random.default_rng(1)
        n = 100_000
        ones = sum(act_epsilon_greedy(table, 0, 0.0, rng) for _ in range(n))
        assert abs(ones / n - 0.5) < 0.01

    def test_forced_explore_uniform(self):
        table = ValueTable(1)
        table.q[0] = [5.0, -5.0]
        rng = np.random.default_rng(2)
        n = 100_000
        ones = sum(act_epsilon_greedy(table, 0, 1.0, rng) for _ in range(n))
        assert abs(ones / n - 0.5) < 0.01


class TestQLearningUpdate:
    def test_from_zero(self):
        table = ValueTable(3)
        q_learning_update(table, 0, 1, 1.0, 1)
        assert table.q[0][1] == pytest.approx(0.01)

    def test_zero_reward_no_change(self):
        table = ValueTable(3)
        q_learning_update(table, 0, 0, 0.0, 1)
        assert table.q[0][0] == 0.0

    def test_arithmetic(self):
        table = ValueTable(3)
        table.q[0][1] = 0.5
        table.q[1] = [0.2, 0.1]
        q_learning_update(table, 0, 1, 1.0, 1)
        assert table.q[0][1] == pytest.approx(0.5068)


class TestRLearningUpdate:
    def test_from_zero(self):
        table = ValueTable(3)
        r_learning_update(table, 0, 1, 1.0, 1)
        assert table.q[0][1] == pytest.approx(0.01)
        assert table.rho == pytest.approx(0.01)

    def test_zero_reward_no_change(self):
        table = ValueTable(3)
        r_learning_update(table, 0, 0, 0.0, 1)
        assert table.q[0][0] == 0.0
        assert table.rho == 0.0

    def test_single_difference_drives_both(self):
        table = ValueTable(3)
        table.q[0][1] = 0.5
        table.q[1] = [0.2, 0.0]
        table.rho = 0.3
        r_learning_update(table, 0, 1, 1.0, 1)
        assert table.q[0][1] == pytest.approx(0.504)
        assert table.rho == pytest.approx(0.304)

    def test_per_step_change_is_bounded(self):
        table = ValueTable(8)
        rng = np.random.default_rng(3)
        for _ in range(5000):
            s, sn = int(rng.integers(0, 8)), int(rng.integers(0, 8))
            a = int(rng.integers(0, 2))
            r = float(rng.integers(0, 2)) - float(rng.integers(0, 2))
            q_max = max(abs(v) for row in table.q for v in row)
            bound = table.alpha * (1 + 2 * q_max + abs(table.rho)) + 1e-12
            before = table.q[s][a]
            r_learning_update(table, s, a, r, sn)
            assert abs(table.q[s][a] - before) <= bound


class TestRewardWithOffset:
    def test_plain_ack(self):
        assert reward_with_offset(Observation.SUCCESSFUL, 0.0) == 1.0

    def test_idle_with_offset(self):
        assert reward_with_offset(Observation.IDLE, 0.3) == pytest.approx(-0.3)

    def test_busy_with_offset(self):
        assert reward_with_offset(Observation.BUSY, 0.3) == pytest.approx(0.7)


class TestAlohaAct:
    def test_empty_queue_waits(self):
        rng = np.random.default_rng(0)
        assert aloha_act(1.0, PacketQueue(2, [0, 0]), rng) == Action.WAIT

    def test_certain_transmit(self):
        rng = np.random.default_rng(0)
        assert aloha_act(1.0, PacketQueue(2, [1, 0]), rng) == Action.TRANSMIT

    def test_transmit_frequency(self):
        rng = np.random.default_rng(4)
        queue = PacketQueue(1, [1])
        n = 1_000_000
        hits = sum(aloha_act(0.4, queue, rng) for _ in range(n))
        assert abs(hits / n - 0.4) < 0.002


class TestAgentShell:
    def test_table_dimensions(self):
        for d in (1, 2, 3, 5):
            assert LearningAgent(AgentConfig("FSQA", d)).table.n_states == 4 << d
            assert LearningAgent(AgentConfig("FSRA", d)).table.n_states == 4 << d
            assert LearningAgent(AgentConfig("HSRA", d)).table.n_states == 4 * (d + 1)
            assert LearningAgent(AgentConfig("TSRA", d)).table.n_states == 8

    def test_table_starts_at_zero(self):
        agent = LearningAgent(AgentConfig("TSRA", 4))
        assert agent.table.rho == 0.0
        assert all(row == [0.0, 0.0] for row in agent.table.q)

    def test_bad_scheme_rejected(self):
        with pytest.raises(ValueError):
            AgentConfig("DLQN", 2)
        with pytest.raises(ValueError):
            LearningAgent(AgentConfig("ALOHA", 2))

    def test_offset_validation(self):
        with pytest.raises(ValueError):
            AgentConfig("FSQA", 2, reward_offset=1.5)

    def test_effective_policy_reports_wait_on_empty_states(self):
        agent = LearningAgent(AgentConfig("FSRA", 2))
        for s in range(agent.table.n_states):
            agent.table.q[s] = [0.0, 1.0]  # argmax everywhere TRANSMIT
        policy = agent.effective_policy()
        for s in range(agent.table.n_states):
            bits, _ = agent.state_components(s)
            assert policy[s] == (Action.WAIT if not any(bits) else Action.TRANSMIT)
