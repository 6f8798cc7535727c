"""Smoke test for the divlab Python module.

Build and install the module first:

    pip install --no-build-isolation ./crates/python
    python python/smoke_test.py
"""

import math
import os

import divlab

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "fixtures")


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} +/- {tol}"


def main():
    letters = ["A", "B", "C", "D"]
    q = divlab.Pmf([0.1, 0.878, 0.002, 0.02], letters)
    b = divlab.Pmf.one_hot(letters, "B")
    assert len(q) == 4 and q.letters == letters
    close(q.entropy(), 0.628, 0.0005)
    close(divlab.divergence("js", b, q), 0.064, 0.0005)
    close(divlab.divergence("dnew:k=2", b, q), 0.021, 0.0005)
    assert divlab.divergence("kl", divlab.Pmf.uniform(letters), b) == math.inf
    assert len(divlab.divergence_per_letter("js", b, q)) == 4

    out = divlab.Pmf.one_hot(letters, "C")
    br = divlab.benefit(q, out, b, "js", cost=2.0)
    close(br["benefit"], 0.500, 0.005)
    close(br["ratio"], br["benefit"] / 2.0, 1e-12)

    skewed = divlab.Pmf([0.45, 0.20, 0.15, 0.15, 0.05])
    code = divlab.huffman(skewed)
    assert code.lengths == [1, 3, 3, 3, 3], code
    close(code.avg_length_under(skewed), 2.1, 1e-9)
    lengths, avg = divlab.shannon_literal_lengths(skewed)
    assert lengths == [2, 3, 3, 3, 5] and abs(avg - 2.65) < 1e-9

    worst = divlab.Pmf.worst_case(6, 2 ** -7)
    last = divlab.Pmf.one_hot(worst.letters, worst.letters[-1])
    assert divlab.conceptual_cross_entropy(last, divlab.huffman(worst)) == 5.0
    assert divlab.bound_report(6, 200, seed=1)["passed"]

    table = divlab.curve(["js"], [1.0], points=3)
    assert [r["values"][0] for r in table["rows"]] == [1.0, 0.0, 1.0]
    close(divlab.near_zero(["dnew:k=2"])["rows"][0]["values"][0], 1.0, 1e-6)

    assert "arteries-q" in divlab.scenario_names()
    report = divlab.run_scenario("curved-flat-eps0.01")
    kl = {r["user"]: r["divergence"]["total"] for r in report["rows"]}
    close(kl["MIP"], 6.50, 0.005)

    survey = divlab.analyze_survey(
        os.path.join(FIXTURES, "survey", "walking-time-kcl.csv"),
        os.path.join(FIXTURES, "survey", "walking-time-questions.json"),
        "js",
    )
    close(survey["questions"][0]["mean_benefit"], -2.940, 0.01)

    plan = divlab.run_plan(
        os.path.join(FIXTURES, "mcda", "selection.json"),
        os.path.join(FIXTURES, "mcda", "selection-plan.json"),
    )
    assert [r["candidate"] for r in plan["ranking"] if r["rank"] == 1] == ["dnew:k=2"]

    assert divlab.reproduce_all()["passed"]

    try:
        divlab.Pmf([0.5, 0.6])
    except ValueError:
        pass
    else:
        raise AssertionError("invalid PMF accepted")
    try:
        divlab.Pmf.load("no-such-file.json")
    except OSError:
        pass
    else:
        raise AssertionError("missing file accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
