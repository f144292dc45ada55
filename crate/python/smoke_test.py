"""Smoke test for the simplex_reach extension module.

Build and install first:

    pip install --no-build-isolation ./crates/python
"""

import json
import math

import simplex_reach as sr


def close(a, b, tol):
    return len(a) == len(b) and all(abs(x - y) <= tol for x, y in zip(a, b))


def main():
    d = sr.equidistant_gibbs(0.5, 3)
    assert close(d.entries, [4 / 7, 2 / 7, 1 / 7], 1e-15), d

    g = sr.gibbs([0.0, 1.0, 2.0], 1.0)
    z = sum(math.exp(-k) for k in range(3))
    assert close(g.entries, [math.exp(-k) / z for k in range(3)], 1e-15)
    assert sr.gibbs([0.0, 1.0], math.inf).entries == [0.5, 0.5]

    # steer the zero-temperature chain from its ground state
    b = sr.Generator.zero_temperature(4)
    target = sr.SimplexVector([0.1, 0.2, 0.3, 0.4])
    plan = sr.steer_from_ground(b, target)
    assert plan.dwell_count() <= 3
    err = sr.verify_plan(b, sr.SimplexVector.vertex(4, 0), plan, target)
    assert err < 1e-9, err

    # arbitrary start: relax, then steer
    x0 = sr.SimplexVector.uniform(4)
    plan = sr.plan_relax_and_steer(b, x0, target, 1e-6)
    assert sr.verify_plan(b, x0, plan, target) <= 1e-6

    lifted = sr.plan_lifted(2, 2, x0, target, 1e-5)
    assert sr.verify_plan(sr.Generator.lifted(2, 2), x0, lifted, target) <= 1e-5

    # schedules and trajectories
    swap = sr.Permutation([2, 1, 3, 4])
    assert swap.inverse() == swap
    sched = sr.Schedule([(0.0, swap), (0.5, sr.Permutation.identity(4))])
    traj = sr.run_schedule(b, sr.SimplexVector.vertex(4, 0), sched, 0.1)
    assert traj["events"][0][1] == [2, 1, 3, 4]
    assert abs(sum(traj["final_state"]["entries"]) - 1.0) < 1e-12

    # JSON documents round trip exactly
    again = sr.SteeringPlan.from_json(plan.to_json())
    assert again.to_json() == plan.to_json()
    assert sr.SimplexVector.from_json(target.to_json()) == target
    assert json.loads(sched.to_json())[0]["permutation"] == [2, 1, 3, 4]

    # the thermal chain's fixed point is the Gibbs vector
    bt = sr.Generator.thermal(d)
    assert close(bt.fixed_point().entries, d.entries, 1e-12)
    assert bt.evolve(d, 3.0).l1_distance(d) < 1e-13

    report = sr.bound_sweep(d, trials=50, seed=1)
    assert report["violations"] == [], report["violations"][:3]
    assert report["mode"] == "theorem"

    assert sr.qubit_reachable(sr.SimplexVector([0.5, 0.5]), sr.SimplexVector([0.7, 0.3]), sr.SimplexVector([0.6, 0.4]))

    examples = sr.reproduce_examples()
    for name, rep in examples.items():
        print(f"{name}: max deviation {rep['max_deviation']:.2e}")

    try:
        sr.SimplexVector([0.5, 0.6])
    except ValueError:
        pass
    else:
        raise AssertionError("invalid vector accepted")

    print(f"simplex_reach {sr.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
