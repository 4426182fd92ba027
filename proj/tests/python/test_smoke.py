"""Smoke test for the Python bindings: exercises every exported entry point
and checks a few frozen values against the library's own test fixtures."""

import json

import irrhodge


def main():
    kinds = irrhodge.task_kinds()
    assert len(kinds) == 8, kinds
    for k in ("local-verify", "p1-hodge", "p1-degeneration", "p1-uv",
              "charp-cartier", "charp-splitting", "charp-degeneration",
              "filtcx-fuzz"):
        assert k in kinds, k

    # Every kind runs clean on its default parameters.
    for k in kinds:
        report, ok = irrhodge.run_task(k)
        assert ok and report["ok"], (k, report)

    # A concrete instance through the plan engine: f = z + 1/z has a
    # two-dimensional H^1 splitting as 1 + 1 across the two sheaf terms.
    plan = {"tasks": [{"kind": "p1-hodge",
                       "params": {"f": {"num": [1, 0, 1], "den": [0, 1]},
                                  "k_list": [1]}}]}
    report, ok = irrhodge.run_plan(plan)
    assert ok
    table = report["tasks"][0]["tables"][0]
    assert table["k"] == 1 and table["h_total"] == 2, table

    # Reports are byte-identical across job counts.
    raw = json.dumps(plan)
    a, _ = irrhodge._core.run_plan(raw, 1, -1, 1)
    b, _ = irrhodge._core.run_plan(raw, 1, -1, 3)
    assert a == b

    # Filtered-complex primitives round-trip and agree.
    fc = irrhodge.random_filtered_complex(7, 10)
    verdict = irrhodge.triple_equivalence(fc)
    assert verdict["agree"] is True, verdict

    # Schema errors raise, and they raise as ValueError.
    try:
        irrhodge.run_plan({"tasks": [{"kind": "no-such-kind", "params": {}}]})
    except ValueError:
        pass
    else:
        raise AssertionError("unknown kind must raise")
    assert issubclass(irrhodge.PlanError, ValueError)

    # A failed check is an ok=False report, not an exception.
    report, ok = irrhodge.run_task(
        "filtcx-fuzz",
        {"seed": 1, "count": 5, "max_dim": 8, "corrupt_checker": True})
    assert not ok and report["witnesses"], report

    # Renderings.
    report, _ = irrhodge.run_plan(
        {"tasks": [{"kind": "charp-cartier",
                    "params": irrhodge.default_params("charp-cartier")}]})
    text = irrhodge.render(report)
    assert "RESULT: PASS" in text and "charp-cartier" in text
    csv = irrhodge.render(report, format="csv")
    assert csv.splitlines()[0] == "task,kind,check,pass"

    print("python smoke: all assertions passed")


if __name__ == "__main__":
    main()
