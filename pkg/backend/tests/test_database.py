from entrosteer.database import get_run_artifact, init_db, list_runs, record_run


def test_record_and_list_runs(ledger):
    first = record_run("check", {"family": "werner"}, '{"lhs": 0.1}', "json", seed=0)
    second = record_run("survey", {"n": 100}, "category,count\n", "csv", seed=5)
    assert second > first

    runs = list_runs()
    assert [r["id"] for r in runs] == [second, first]
    assert "artifact" not in runs[0]
    assert runs[0]["seed"] == 5

    only_check = list_runs("check")
    assert len(only_check) == 1
    assert only_check[0]["config_json"] == '{"family": "werner"}'


def test_artifact_lookup(ledger):
    run_id = record_run("bound", {"d": 2}, "value\n0.5\n", "csv", seed=0)
    assert get_run_artifact(run_id) == "value\n0.5\n"
    assert get_run_artifact(run_id + 100) is None


def test_explicit_path_and_limit(tmp_path):
    path = str(tmp_path / "nested" / "runs.db")
    init_db(path)
    init_db(path)
    assert list_runs(db_path=path) == []
    for k in range(5):
        record_run("entropy", {"k": k}, "", "json", seed=k, db_path=path)
    assert [r["seed"] for r in list_runs(limit=3, db_path=path)] == [4, 3, 2]
