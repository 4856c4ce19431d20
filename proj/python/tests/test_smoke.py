import os

import pytest

import cbc_eval

DATA = os.path.join(os.path.dirname(__file__), "..", "..", "data")
TABLE1 = os.path.join(DATA, "table1.csv")
FIXTURE = os.path.join(DATA, "fixture_spec.json")


@pytest.fixture(scope="module")
def table1():
    return cbc_eval.load_dataset(TABLE1)


def test_table1_parses(table1):
    assert len(table1) == 10
    assert table1.ids[3] == "T103"
    assert table1.ratings[3] == [5, 5, 5, 4, 5, 2]
    assert table1.constraints_ratings[3] == 9
    assert table1.points[0][0] == pytest.approx(1 / 9)


def test_parse_error_has_locator():
    csv = "id,scalability,constraints\nT105,11,6\n"
    with pytest.raises(cbc_eval.ParseError, match="row T105, column scalability: out of range"):
        cbc_eval.parse_dataset(csv)


def test_fit_kmeans_is_seeded(table1):
    a = cbc_eval.fit_kmeans(table1, 3, seed=42)
    b = cbc_eval.fit_kmeans(table1, 3, seed=42)
    assert a == b
    assert len(a["assignment"]) == 10


def test_oracle_matches_reference(table1):
    feasible, sse, labels = cbc_eval.brute_force_min_sse(table1, 2)
    assert feasible
    assert sse == pytest.approx(0.7376543209876543, rel=1e-12)
    assert labels == [0, 0, 1, 0, 0, 0, 1, 1, 1, 0]


def test_deadlock_report(table1):
    spec = cbc_eval.parse_constraint_spec(
        '{"must_link":[["T100","T101"],["T101","T102"]],"cannot_link":[["T100","T102"]]}'
    )
    report = cbc_eval.detect_deadlock(spec, table1, 3)
    assert report["deadlocked"]
    assert report["causes"][0]["must_link_path"] == ["T100", "T101", "T102"]
    exists, _, refutation = cbc_eval.brute_force_feasible_exists(spec, table1, 3)
    assert not exists and refutation


def test_evaluate_fixture(table1):
    spec = cbc_eval.load_constraint_spec(FIXTURE)
    report = cbc_eval.evaluate(table1, spec, timestamp="2000-01-01T00:00:00Z")
    ranking = [entry["id"] for entry in report["ranking"]]
    assert ranking == ["T103", "T101", "T107", "T106", "T105", "T100"]
    assert sorted(e["id"] for e in report["excluded"]) == ["T102", "T104", "T108", "T109"]
    again = cbc_eval.evaluate(table1, spec, timestamp="2000-01-01T00:00:00Z")
    assert again == report


def test_capacity_guard():
    rows = "".join(f"R{i},{1 + i % 10},5\n" for i in range(13))
    big = cbc_eval.parse_dataset("id,a,constraints\n" + rows)
    with pytest.raises(cbc_eval.CapacityError):
        cbc_eval.brute_force_min_sse(big, 2)


def test_unknown_id_is_rejected(table1):
    spec = cbc_eval.parse_constraint_spec('{"must_link":[["T100","T999"]]}')
    with pytest.raises(cbc_eval.ParseError, match="unknown id T999"):
        cbc_eval.evaluate(table1, spec)
