import json

import opverify


def test_operad_suite_passes():
    report = json.loads(opverify.run_suite("operad", arity=4))
    assert report["verdict"] == "PASS"
    names = [c["name"] for s in report["suites"] for c in s["checks"]]
    assert names == sorted(names)
    assert opverify.exit_code(json.dumps(report)) == 0


def test_markdown_and_homology():
    text = opverify.run_suite("symseq", arity=3, seed=2)
    assert "## symseq" in opverify.emit_report(text, "markdown")
    sphere = "chain t=0 lo=1 hi=1\ndegree 1 1\nbasis x\nend\n"
    assert opverify.homology(sphere) == [(1, 1)]
    disk = "chain t=0 lo=0 hi=1\ndegree 0 1\nbasis x\ndegree 1 1\nbasis y\nd 1 1 1 1\n0 0 1\nend\n"
    assert opverify.homology(disk) == []


def test_free_operad_dims():
    assert opverify.free_operad_dims(5)[2:] == [1, 3, 15, 105]


def test_usage_errors():
    for bad in [lambda: opverify.run_suite("nope"), lambda: opverify.run_suite("operad", stages=[3, 1])]:
        try:
            bad()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")
