import numpy as np
import pytest

from mcselect.core import (Activation, Architecture, CandidatePool,
                           CandidateRecord, SetMetrics)
from mcselect.mcdm import Direction
from mcselect.policies import (AggregationId, PolicyId, competition_ranks,
                               criteria_of, select_global, select_individual,
                               select_local)


def record(neurons=5, act=Activation.RELU, run_id=0, repetition=0, epochs=50,
           train=0.9, validation=0.9, holdout=0.9, test=0.9, dataset="ds"):
    return CandidateRecord(
        dataset_id=dataset, run_id=run_id, repetition=repetition,
        architecture=Architecture(neurons, act), epochs_trained=epochs,
        max_epochs=100, metrics=SetMetrics(train, validation, holdout, test),
        seed=0)


def pool_of(*records):
    return CandidatePool(records=list(records))


def names_and_dirs(policy):
    return [(c.name, c.direction) for c in criteria_of(policy)]


def test_criteria_of_ttvhn():
    assert names_and_dirs(PolicyId.TTVHN) == [
        ("train", Direction.MAXIMIZE), ("validation", Direction.MAXIMIZE),
        ("holdout", Direction.MAXIMIZE), ("neurons", Direction.MINIMIZE)]


def test_criteria_of_single_set():
    assert names_and_dirs(PolicyId.HOLDOUT) == [("holdout", Direction.MAXIMIZE)]


def test_criteria_of_ttvhtnb():
    assert names_and_dirs(PolicyId.TTVHTNB) == [
        ("train", Direction.MAXIMIZE), ("validation", Direction.MAXIMIZE),
        ("holdout", Direction.MAXIMIZE), ("test", Direction.MAXIMIZE),
        ("neurons", Direction.MINIMIZE), ("epochs", Direction.MINIMIZE)]


def test_criteria_epochs_direction_e_vs_b():
    e = dict(names_and_dirs(PolicyId.TTVHNE))
    b = dict(names_and_dirs(PolicyId.TTVHNB))
    assert e["epochs"] is Direction.MAXIMIZE
    assert b["epochs"] is Direction.MINIMIZE


def test_unknown_policy_name():
    with pytest.raises(ValueError, match="valid"):
        PolicyId.from_name("TTXH")


def test_unanimous_optimum_selected_by_every_policy():
    # shared epoch count keeps the optimum unanimous under both the
    # epoch-maximizing and epoch-minimizing policies
    best = record(neurons=1, repetition=0, epochs=50,
                  train=0.99, validation=0.99, holdout=0.99, test=0.99)
    worse = [record(neurons=10 + i, repetition=1 + i, epochs=50,
                    train=0.6, validation=0.6, holdout=0.6, test=0.6)
             for i in range(3)]
    pool = pool_of(best, *worse)
    for policy in PolicyId:
        res = select_individual(policy, pool)
        assert res.selected == best, policy


def test_holdout_tie_broken_by_fewer_neurons():
    a = record(neurons=5, repetition=0, holdout=0.9)
    b = record(neurons=3, repetition=1, holdout=0.9)
    res = select_individual(PolicyId.HOLDOUT, pool_of(a, b))
    assert res.selected == b
    assert "neurons" in res.tiebreak_trace


def test_tiebreak_falls_through_activation_then_repetition():
    a = record(neurons=3, act=Activation.TANH, repetition=0)
    b = record(neurons=3, act=Activation.RELU, repetition=1)
    res = select_individual(PolicyId.HOLDOUT, pool_of(a, b))
    assert res.selected == b  # RELU precedes TANH in enumeration order
    c = record(neurons=3, act=Activation.RELU, repetition=2)
    res2 = select_individual(PolicyId.HOLDOUT, pool_of(c, b))
    assert res2.selected == b
    assert "repetition" in res2.tiebreak_trace


def test_topsis_selection_is_pareto_non_dominated():
    rng = np.random.default_rng(0)
    records = [record(neurons=int(rng.integers(1, 50)), repetition=i,
                      epochs=int(rng.integers(1, 100)),
                      train=rng.random(), validation=rng.random(),
                      holdout=rng.random(), test=rng.random())
               for i in range(30)]
    pool = pool_of(*records)
    for policy in (PolicyId.TTVH, PolicyId.TTVHN, PolicyId.TTVHTNE):
        res = select_individual(policy, pool)
        sel = res.selected
        crit = criteria_of(policy)

        def vec(r):
            vals = []
            for c in crit:
                v = (r.architecture.neurons if c.name == "neurons"
                     else r.epochs_trained if c.name == "epochs"
                     else getattr(r.metrics, c.name))
                vals.append(v if c.direction is Direction.MAXIMIZE else -v)
            return np.array(vals, float)

        sv = vec(sel)
        for r in records:
            rv = vec(r)
            assert not (np.all(rv >= sv) and np.any(rv > sv))


def test_adding_dominated_candidate_keeps_pareto_survivors():
    # a fully dominated addition never joins the non-dominated set and
    # never evicts an existing member (TOPSIS closeness itself may shift
    # because the anti-ideal point and column norms move)
    rng = np.random.default_rng(1)
    records = [record(neurons=int(rng.integers(2, 40)), repetition=i,
                      epochs=int(rng.integers(2, 90)),
                      train=0.3 + 0.6 * rng.random(),
                      validation=0.3 + 0.6 * rng.random(),
                      holdout=0.3 + 0.6 * rng.random(),
                      test=0.3 + 0.6 * rng.random())
               for i in range(15)]
    from mcselect.mcdm import pareto_filter
    from mcselect.policies import decision_matrix
    dominated = record(neurons=100, repetition=99, epochs=1,
                       train=0.01, validation=0.01, holdout=0.01, test=0.01)
    before = pareto_filter(decision_matrix(PolicyId.TTVHN, records))
    after = pareto_filter(decision_matrix(PolicyId.TTVHN, records + [dominated]))
    assert after == before
    res = select_individual(PolicyId.TTVHN, pool_of(*records, dominated))
    assert res.selected != dominated


def test_pool_order_invariance():
    rng = np.random.default_rng(2)
    records = [record(neurons=int(rng.integers(1, 30)), repetition=i,
                      train=rng.random(), validation=rng.random(),
                      holdout=rng.random(), test=rng.random())
               for i in range(12)]
    shuffled = list(records)
    rng.shuffle(shuffled)
    for policy in (PolicyId.HOLDOUT, PolicyId.TTVH):
        assert select_individual(policy, pool_of(*records)).selected == \
            select_individual(policy, pool_of(*shuffled)).selected
        assert select_local(policy, pool_of(*records)).selected == \
            select_local(policy, pool_of(*shuffled)).selected


def test_single_set_argmax_property():
    rng = np.random.default_rng(3)
    records = [record(repetition=i, holdout=rng.random()) for i in range(10)]
    res = select_individual(PolicyId.HOLDOUT, pool_of(*records))
    assert res.selected.metrics.holdout == max(r.metrics.holdout for r in records)


def test_competition_ranks_share_minimum():
    ranks = competition_ranks(np.array([0.9, 0.9, 0.5, 0.7]))
    assert list(ranks) == [1, 1, 4, 3]


def test_local_uniformly_dominant_architecture_wins():
    good = [record(neurons=4, repetition=i, holdout=0.95 - 0.001 * i)
            for i in range(4)]
    bad = [record(neurons=9, repetition=i, holdout=0.5 + 0.001 * i)
           for i in range(4)]
    res = select_local(PolicyId.HOLDOUT, pool_of(*good, *bad))
    assert res.selected.architecture.neurons == 4
    assert res.selected == good[0]  # best individual rank inside the winner


def test_local_averaged_group_count():
    records = [record(neurons=n, act=a, repetition=r,
                      holdout=0.5 + 0.01 * n + 0.001 * r)
               for n in range(1, 6)
               for a in (Activation.RELU, Activation.TANH)
               for r in range(4)]
    res = select_local(PolicyId.HOLDOUT, pool_of(*records))
    assert res.pareto_retained == 10  # distinct architectures compared


def test_local_average_tie_prefers_fewer_neurons():
    a = [record(neurons=7, repetition=i, holdout=0.9) for i in range(2)]
    b = [record(neurons=2, repetition=i, holdout=0.9) for i in range(2)]
    res = select_local(PolicyId.HOLDOUT, pool_of(*a, *b))
    assert res.selected.architecture.neurons == 2
    assert "architecture" in res.tiebreak_trace


def test_global_reduces_to_local_architecture_on_single_run():
    rng = np.random.default_rng(4)
    records = [record(neurons=n, repetition=r, holdout=rng.random())
               for n in (2, 5, 8) for r in range(3)]
    pool = pool_of(*records)
    local = select_local(PolicyId.HOLDOUT, pool)
    global_results = select_global(PolicyId.HOLDOUT, {0: pool})
    assert len(global_results) == 1
    assert global_results[0].selected.architecture == local.selected.architecture


def test_global_unanimous_architecture_chosen_per_run():
    pools = {}
    for run_id in range(3):
        good = [record(neurons=3, run_id=run_id, repetition=i,
                       holdout=0.9 + 0.001 * i) for i in range(2)]
        bad = [record(neurons=8, run_id=run_id, repetition=i, holdout=0.4)
               for i in range(2)]
        pools[run_id] = pool_of(*good, *bad)
    results = select_global(PolicyId.HOLDOUT, pools)
    assert len(results) == 3
    for res in results:
        assert res.selected.architecture.neurons == 3
        assert res.aggregation is AggregationId.GLOBAL


def test_global_missing_architecture_names_run():
    pools = {
        0: pool_of(record(neurons=3, run_id=0, holdout=0.95),
                   record(neurons=8, run_id=0, repetition=1, holdout=0.4)),
        1: pool_of(record(neurons=8, run_id=1, holdout=0.5)),
    }
    with pytest.raises(ValueError, match="run 1"):
        select_global(PolicyId.HOLDOUT, pools)


def test_section_one_pool_holdout_picks_noise_fitter():
    # observed-accuracy arithmetic of the two-model noisy-holdout scenario
    a = record(neurons=50, repetition=0, train=0.81, validation=0.81,
               holdout=0.84, test=0.80)
    b = record(neurons=10, repetition=1, train=0.95, validation=0.95,
               holdout=0.80, test=1.00)
    res = select_individual(PolicyId.HOLDOUT, pool_of(a, b))
    assert res.selected == a
