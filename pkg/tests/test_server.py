import pytest
from fastapi.testclient import TestClient

from bookimpact import engine, scoring
from bookimpact.datamodel import METRIC_IDS
from bookimpact.server import create_app


@pytest.fixture()
def client(fixture_state):
    return TestClient(create_app(fixture_state))


def uniform_weights():
    return {m: 1.0 / len(METRIC_IDS) for m in METRIC_IDS}


def test_books_paged(client):
    response = client.get("/books", params={"page": 1, "page_size": 10})
    assert response.status_code == 200
    body = response.json()
    assert body["total"] == 24
    assert len(body["books"]) == 10
    assert body["books"][0]["rank"] == 1
    second = client.get("/books", params={"page": 3, "page_size": 10}).json()
    assert len(second["books"]) == 4


def test_books_bad_paging(client):
    assert client.get("/books", params={"page": 0}).status_code == 400


def test_report_endpoint_matches_analysis(client, fixture_state):
    from bookimpact import analysis

    isbn = sorted(fixture_state.dataset.books)[0]
    body = client.get(f"/books/{isbn}/report").json()
    expected = analysis.report_to_payload(
        analysis.book_report(
            isbn,
            fixture_state.dataset,
            fixture_state.scores,
            fixture_state.vectors,
            window=fixture_state.config.aspect_window,
            profile=fixture_state.config.tokenizer_profile,
            function_labels=fixture_state.function_labels,
        )
    )
    assert body == expected


def test_report_unknown_isbn_404(client):
    assert client.get("/books/missing/report").status_code == 404


def test_weights_endpoint_structure(client):
    body = client.get("/weights").json()
    assert body["provenance"] == "reference"
    assert set(body["global_weights"]) == set(METRIC_IDS)
    assert set(body["groups"]) == {"contents", "reviews", "citations", "usages"}


def test_rankings_keys(client, fixture_state):
    for key in scoring.RANK_KEYS:
        body = client.get("/rankings", params={"key": key}).json()
        assert body["key"] == key
        scores = [entry["score"] for entry in body["ranking"]]
        assert scores == sorted(scores, reverse=True)
    assert client.get("/rankings", params={"key": "nope"}).status_code == 400


def test_disciplines_summary(client):
    body = client.get("/disciplines/summary").json()
    assert len(body["rows"]) == 5
    assert sum(sum(r["counts"]) for r in body["rows"]) == 24


def test_whatif_renormalizes_echo(client):
    doubled = {m: 2.0 / len(METRIC_IDS) for m in METRIC_IDS}  # sums to 2
    body = client.post("/whatif", json={"weights": doubled}).json()
    echoed = body["weights"]
    assert sum(echoed.values()) == pytest.approx(1.0, abs=1e-9)
    for m in METRIC_IDS:
        assert echoed[m] == pytest.approx(1.0 / len(METRIC_IDS), abs=1e-9)


def test_whatif_accepts_flat_list(client):
    body = client.post("/whatif", json={"weights": [1.0] * 15}).json()
    assert sum(body["weights"].values()) == pytest.approx(1.0, abs=1e-9)


def test_whatif_matches_engine_rescore(client, fixture_state):
    from bookimpact.ahp import hierarchy_from_global

    response = client.post("/whatif", json={"weights": uniform_weights()}).json()
    preview = engine.rescore(
        fixture_state, hierarchy_from_global(uniform_weights(), "custom")
    )
    expected = [
        (rank, score.isbn) for rank, score in scoring.rank_books(preview.scores, "total")
    ]
    got = [(entry["rank"], entry["isbn"]) for entry in response["ranking"]]
    assert got == expected


def test_whatif_is_pure_and_does_not_mutate(client):
    before = client.get("/books").json()
    first = client.post("/whatif", json={"weights": uniform_weights()})
    second = client.post("/whatif", json={"weights": uniform_weights()})
    assert first.content == second.content
    assert client.get("/books").json() == before
    assert client.get("/weights").json()["provenance"] == "reference"


def test_whatif_invalid_weights_400(client):
    bad = uniform_weights()
    bad["sale"] = -0.1
    assert client.post("/whatif", json={"weights": bad}).status_code == 400
    assert client.post("/whatif", json={"weights": [1.0] * 7}).status_code == 400
    missing = uniform_weights()
    missing.pop("sale")
    assert client.post("/whatif", json={"weights": missing}).status_code == 400
    assert client.post("/whatif", json={"nope": 1}).status_code == 400


def test_post_weights_swaps_published_state(fixture_state):
    client = TestClient(create_app(fixture_state))
    baseline = client.get("/rankings").json()["ranking"]
    body = client.post("/weights", json={"weights": uniform_weights()}).json()
    assert body["provenance"] == "custom"
    after = client.get("/rankings").json()["ranking"]
    assert client.get("/weights").json()["provenance"] == "custom"
    # what-if under the published uniform weights equals the published ranking
    preview = client.post("/whatif", json={"weights": uniform_weights()}).json()
    assert [e["isbn"] for e in preview["ranking"]] == [e["isbn"] for e in after]
    assert baseline != after or [e["isbn"] for e in baseline] == [e["isbn"] for e in after]


def test_index_page(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "bookimpact" in response.text
