from ffgraphs.suite import CriterionResult, fingerprint, run_criterion, run_suite


def test_result_line_format():
    r = CriterionResult(3, "dense vs character-sum oracle agreement", True, {"x": 1}, 1.5)
    assert r.line() == "criterion  3: PASS  dense vs character-sum oracle agreement"
    assert "seconds" not in r.to_dict()


def test_seeded_criteria_reproduce():
    a, b = run_criterion(7), run_criterion(7)
    assert a.passed and fingerprint(a) == fingerprint(b)


def test_corruption_hook_turns_checks_red():
    for n in (3, 11):
        assert run_criterion(n).passed
        assert not run_criterion(n, corrupt=True).passed


def test_run_suite_logs_each_line():
    seen = []
    out = run_suite([4, 11], log=seen.append)
    assert [r.number for r in out] == [4, 11] and len(seen) == 2
